#include "benchgen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "benchgen/error.hpp"
#include "benchgen/text.hpp"

namespace benchgen::stats {

namespace {

void require_pair(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
    if (x.size() != y.size())
        throw ValidationError("length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    if (x.size() < min_n) throw ValidationError("need at least " + std::to_string(min_n) + " observations");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ValidationError("non-finite observation");
    }
}

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

// Sum of squared deviations; throws when the sequence is constant at
// double precision relative to its magnitude.
double centered_ss(std::span<const double> v, double mean, const char* which) {
    double ss = 0.0;
    double scale = 0.0;
    for (const double e : v) {
        ss += (e - mean) * (e - mean);
        scale = std::max(scale, std::abs(e));
    }
    const double floor = double(v.size()) * (1e-14 * scale) * (1e-14 * scale);
    if (ss <= floor) throw DegenerateInputError(std::string("constant input: ") + which);
    return ss;
}

CorrelationResult correlate(std::span<const double> x, std::span<const double> y, double dof) {
    const double mx = mean_of(x);
    const double my = mean_of(y);
    const double sxx = centered_ss(x, mx, "x");
    const double syy = centered_ss(y, my, "y");
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);

    CorrelationResult out;
    out.r = r;
    const double one_minus = 1.0 - r * r;
    if (one_minus <= 0.0) {
        out.p_value = 0.0;
    } else {
        out.p_value = student_t_two_sided_p(r * std::sqrt(dof / one_minus), dof);
    }
    return out;
}

}  // namespace

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    require_pair(x, y, 3);
    return correlate(x, y, double(x.size()) - 2.0);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
    require_pair(x, y, 3);
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    return correlate(rx, ry, double(x.size()) - 2.0);
}

RegressionFit ols(const Design& design, std::span<const double> y) {
    const auto n = static_cast<std::size_t>(design.values.rows());
    const auto k = static_cast<std::size_t>(design.values.cols());
    if (design.names.size() != k) throw ValidationError("design has " + std::to_string(k) + " columns but " +
                                                        std::to_string(design.names.size()) + " names");
    if (y.size() != n) throw ValidationError("response length does not match design rows");
    if (k == 0) throw ValidationError("design has no columns");
    if (n <= k) throw ValidationError("need more observations than terms (n=" + std::to_string(n) +
                                      ", terms=" + std::to_string(k) + ")");
    if (!design.values.allFinite()) throw ValidationError("non-finite design entry");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.values);
    qr.setThreshold(1e-10);
    const auto rank = static_cast<std::size_t>(qr.rank());
    if (rank < k) {
        std::vector<std::string> dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (std::size_t i = rank; i < k; ++i) dependent.push_back(design.names[static_cast<std::size_t>(perm[i])]);
        std::sort(dependent.begin(), dependent.end());
        std::string msg = "collinear design; dependent columns:";
        for (const auto& d : dependent) msg += " " + d;
        throw CollinearityError(msg, dependent);
    }

    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd resid = yv - design.values * beta;
    const double rss = resid.squaredNorm();
    const double dof = double(n - k);
    const double sigma2 = rss / dof;

    // diag((X'X)^-1) from R^-1, undoing the column permutation.
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(kk, kk).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(kk, kk));
    const Eigen::VectorXd diag_perm = r_inv.rowwise().squaredNorm();

    RegressionFit fit;
    fit.terms = design.names;
    fit.n = n;
    fit.residual_stddev = std::sqrt(sigma2);
    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < kk; ++i) {
        const auto col = static_cast<std::size_t>(perm[i]);
        const std::string& name = design.names[col];
        const double coef = beta[static_cast<Eigen::Index>(col)];
        const double se = std::sqrt(sigma2 * diag_perm[i]);
        fit.coefficients[name] = coef;
        fit.std_errors[name] = se;
        if (se > 0.0) {
            fit.p_values[name] = student_t_two_sided_p(coef / se, dof);
        } else {
            fit.p_values[name] = coef == 0.0 ? 1.0 : 0.0;
        }
    }
    return fit;
}

CorrelationResult partial_correlation(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> control) {
    require_pair(x, y, 4);
    require_pair(x, control, 4);
    const auto n = static_cast<Eigen::Index>(x.size());
    Design d{{"intercept", "control"}, Eigen::MatrixXd(n, 2)};
    for (Eigen::Index i = 0; i < n; ++i) {
        d.values(i, 0) = 1.0;
        d.values(i, 1) = control[static_cast<std::size_t>(i)];
    }
    const auto rx = ols(d, x).residuals;
    const auto ry = ols(d, y).residuals;

    // Residuals that vanish relative to the input mean the variable is
    // fully explained by the control.
    auto check = [](std::span<const double> orig, const std::vector<double>& resid, const char* which) {
        const double m = mean_of(orig);
        double ss = 0.0;
        for (const double v : orig) ss += (v - m) * (v - m);
        double rss = 0.0;
        for (const double v : resid) rss += v * v;
        if (ss == 0.0 || rss <= 1e-24 * ss)
            throw DegenerateInputError(std::string("residual of ") + which + " vanishes after controlling");
    };
    check(x, rx, "x");
    check(y, ry, "y");
    return correlate(rx, ry, double(x.size()) - 3.0);
}

std::map<std::string, std::size_t> term_counts(std::span<const std::string> corpus) {
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : corpus) {
        for (auto& tok : text::tokenize(doc)) ++counts[std::move(tok)];
    }
    return counts;
}

double word_entropy(std::span<const std::string> corpus, EntropyEstimator estimator) {
    const auto counts = term_counts(corpus);
    std::size_t total = 0;
    for (const auto& [_, c] : counts) total += c;
    if (total == 0) throw ValidationError("corpus has no tokens");

    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = double(c) / double(total);
        h -= p * std::log2(p);
    }
    if (estimator == EntropyEstimator::MillerMadow)
        h += (double(counts.size()) - 1.0) / (2.0 * double(total) * std::log(2.0));
    return std::max(h, 0.0);
}

double mean_pairwise_euclidean(const std::vector<std::vector<double>>& vectors) {
    if (vectors.size() < 2) throw ValidationError("need at least 2 vectors");
    const std::size_t dim = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != dim) throw ValidationError("dimension mismatch");
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = vectors[i][k] - vectors[j][k];
                d2 += diff * diff;
            }
            sum += std::sqrt(d2);
            ++pairs;
        }
    }
    return sum / double(pairs);
}

double mean_pairwise_hamming(const std::vector<std::vector<bool>>& vectors) {
    if (vectors.size() < 2) throw ValidationError("need at least 2 vectors");
    const std::size_t len = vectors.front().size();
    if (len == 0) throw ValidationError("vectors must be non-empty");
    for (const auto& v : vectors) {
        if (v.size() != len) throw ValidationError("length mismatch");
    }
    std::size_t mismatches = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            for (std::size_t k = 0; k < len; ++k) mismatches += vectors[i][k] != vectors[j][k];
            ++pairs;
        }
    }
    return double(mismatches) / (double(pairs) * double(len));
}

// Phi(z) = erfc(-z / sqrt 2) / 2. The libm erfc is accurate to a few ulp
// over the whole real line, so both tails keep full relative precision
// (no cancellation from 1 - erf).
double normal_cdf(double z) {
    if (!std::isfinite(z)) throw DomainError("normal_cdf: non-finite input");
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw DomainError("t test needs positive degrees of freedom");
    if (std::isnan(t)) throw DomainError("t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(dof);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace benchgen::stats
