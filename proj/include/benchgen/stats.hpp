#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace benchgen::stats {

struct CorrelationResult {
    double r = 0.0;        // within [-1, 1]
    double p_value = 1.0;  // two-sided
};

struct RegressionFit {
    std::vector<std::string> terms;  // design column order
    std::map<std::string, double> coefficients;
    std::map<std::string, double> std_errors;
    std::map<std::string, double> p_values;
    double residual_stddev = 0.0;
    std::size_t n = 0;
    std::vector<double> residuals;
};

// Named design matrix, one column per term, one row per observation.
struct Design {
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

// Sample Pearson coefficient; p from a two-sided t test with n-2 dof.
// Requires |x| == |y| >= 3 and neither sequence constant.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// Pearson on midranks.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks, ties share the average of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> x);

// Least squares through a column-pivoted Householder QR. Throws
// CollinearityError naming the columns left over once the rank is used up.
RegressionFit ols(const Design& design, std::span<const double> y);

// Pearson between the residuals of x and y after each is regressed on
// `control` plus an intercept; p uses n-3 dof.
CorrelationResult partial_correlation(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> control);

enum class EntropyEstimator {
    PlugIn,
    // Adds (V - 1) / (2 N ln 2) bits; may exceed log2(V).
    MillerMadow,
};

// Shannon entropy in bits of the pooled token distribution of `corpus`
// under text::tokenize.
double word_entropy(std::span<const std::string> corpus, EntropyEstimator estimator = EntropyEstimator::PlugIn);

std::map<std::string, std::size_t> term_counts(std::span<const std::string> corpus);

double mean_pairwise_euclidean(const std::vector<std::vector<double>>& vectors);

// Mean over unordered pairs of the fraction of positions that differ.
double mean_pairwise_hamming(const std::vector<std::vector<bool>>& vectors);

// Standard normal CDF.
double normal_cdf(double z);

// Two-sided p of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

}  // namespace benchgen::stats
