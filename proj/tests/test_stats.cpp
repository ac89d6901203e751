#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "benchgen/error.hpp"
#include "benchgen/stats.hpp"
#include "oracles.hpp"

using namespace benchgen;
using V = std::vector<double>;

namespace {

stats::Design design(std::vector<std::string> names, const std::vector<V>& columns) {
    stats::Design d;
    d.names = std::move(names);
    d.values.resize(static_cast<Eigen::Index>(columns.front().size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (std::size_t r = 0; r < columns[c].size(); ++r) d.values(Eigen::Index(r), Eigen::Index(c)) = columns[c][r];
    return d;
}

}  // namespace

TEST(Pearson, ExactLinearity) {
    EXPECT_NEAR(stats::pearson(V{1, 2, 3}, V{2, 4, 6}).r, 1.0, 1e-9);
    EXPECT_NEAR(stats::pearson(V{1, 2, 3}, V{3, 2, 1}).r, -1.0, 1e-9);
}

TEST(Pearson, HandComputedPointEight) {
    const auto r = stats::pearson(V{1, 2, 3, 4}, V{1, 3, 2, 4});
    EXPECT_NEAR(r.r, 0.8, 1e-9);
    const double t = 0.8 * std::sqrt(2.0 / (1 - 0.64));
    EXPECT_NEAR(r.p_value, oracle::student_t_two_sided_p(t, 2), 1e-6);
}

TEST(Pearson, Errors) {
    EXPECT_THROW(stats::pearson(V{1, 1, 1}, V{1, 2, 3}), DegenerateInputError);
    EXPECT_THROW(stats::pearson(V{1, 2, 3}, V{1, 2}), ValidationError);
}

TEST(Spearman, Orderings) {
    EXPECT_NEAR(stats::spearman(V{1, 2, 3}, V{10, 20, 30}).r, 1.0, 1e-9);
    EXPECT_NEAR(stats::spearman(V{1, 2, 3}, V{30, 20, 10}).r, -1.0, 1e-9);
    EXPECT_NEAR(stats::spearman(V{1, 2, 3, 4}, V{1, 3, 2, 4}).r, 0.8, 1e-9);
}

TEST(Spearman, TiesMatchMidrankOracle) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(0, 6);
    for (int round = 0; round < 30; ++round) {
        V x, y;
        for (int i = 0; i < 25; ++i) {
            x.push_back(d(rng));
            y.push_back(d(rng) + 0.5 * x.back());
        }
        EXPECT_EQ(stats::fractional_ranks(x), oracle::midranks(x));
        EXPECT_NEAR(stats::spearman(x, y).r, oracle::spearman_r(x, y), 1e-9);
    }
}

TEST(Correlation, PropertiesOnRandomData) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    for (int round = 0; round < 50; ++round) {
        V x, y;
        for (int i = 0; i < 40; ++i) {
            x.push_back(n01(rng));
            y.push_back(0.3 * x.back() + n01(rng));
        }
        const auto r = stats::pearson(x, y);
        EXPECT_NEAR(r.r, oracle::pearson_r(x, y), 1e-9);
        EXPECT_NEAR(stats::pearson(y, x).r, r.r, 1e-12);
        V y2;
        for (double v : y) y2.push_back(5 - 3 * v);
        EXPECT_NEAR(stats::pearson(x, y2).r, -r.r, 1e-9);
        EXPECT_GE(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
        const double t = r.r * std::sqrt(38 / (1 - r.r * r.r));
        EXPECT_NEAR(r.p_value, oracle::student_t_two_sided_p(t, 38), 1e-6);
    }
}

TEST(Ols, ExactFit) {
    const auto fit = stats::ols(design({"intercept", "x"}, {V{1, 1, 1, 1}, V{0, 1, 2, 3}}), V{1, 3, 5, 7});
    EXPECT_NEAR(fit.coefficients.at("intercept"), 1.0, 1e-9);
    EXPECT_NEAR(fit.coefficients.at("x"), 2.0, 1e-9);
    EXPECT_NEAR(fit.residual_stddev, 0.0, 1e-9);
}

TEST(Ols, PlantedCoefficients) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> n01, noise(0.0, 0.01);
    V a, b, y;
    std::vector<V> rows;
    for (int i = 0; i < 1000; ++i) {
        a.push_back(n01(rng));
        b.push_back(n01(rng));
        y.push_back(3 * a.back() - 2 * b.back() + noise(rng));
        rows.push_back({a.back(), b.back()});
    }
    const auto fit = stats::ols(design({"a", "b"}, {a, b}), y);
    EXPECT_NEAR(fit.coefficients.at("a"), 3.0, 0.01);
    EXPECT_NEAR(fit.coefficients.at("b"), -2.0, 0.01);
    const auto ref = oracle::ols(rows, y);
    EXPECT_NEAR(fit.coefficients.at("a"), ref[0], 1e-9);
    EXPECT_NEAR(fit.coefficients.at("b"), ref[1], 1e-9);
    EXPECT_NEAR(fit.residual_stddev, 0.01, 0.002);
}

TEST(Ols, IdenticalColumnsAreCollinear) {
    try {
        stats::ols(design({"u", "v"}, {V{1, 2, 3, 4}, V{1, 2, 3, 4}}), V{1, 2, 3, 5});
        FAIL() << "expected CollinearityError";
    } catch (const CollinearityError& e) {
        const std::string msg = e.what();
        EXPECT_TRUE(msg.find("u") != std::string::npos || msg.find("v") != std::string::npos) << msg;
    }
}

TEST(PartialCorrelation, ControlEqualsXIsDegenerate) {
    const V c{1, 2, 3, 4, 5};
    EXPECT_THROW(stats::partial_correlation(c, V{2, 1, 4, 3, 6}, c), DegenerateInputError);
}

TEST(PartialCorrelation, MatchesResidualOracle) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    V x, y, c;
    for (int i = 0; i < 200; ++i) {
        c.push_back(n01(rng));
        x.push_back(c.back() + n01(rng));
        y.push_back(-c.back() + 0.5 * x.back() + n01(rng));
    }
    const auto r = stats::partial_correlation(x, y, c);
    const double expect = oracle::pearson_r(oracle::residuals_on(x, c), oracle::residuals_on(y, c));
    EXPECT_NEAR(r.r, expect, 1e-9);
    const double t = expect * std::sqrt(197 / (1 - expect * expect));
    EXPECT_NEAR(r.p_value, oracle::student_t_two_sided_p(t, 197), 1e-6);
}

TEST(PartialCorrelation, IndependentNoiseNotSignificant) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n01;
    V x, y, c;
    for (int i = 0; i < 500; ++i) {
        x.push_back(n01(rng));
        y.push_back(n01(rng));
        c.push_back(n01(rng));
    }
    const auto r = stats::partial_correlation(x, y, c);
    EXPECT_LT(std::abs(r.r), 0.1);
    EXPECT_GT(r.p_value, 0.05);
}

TEST(PartialCorrelation, SharedDependenceThroughControl) {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> n01, small(0, 0.01);
    V x, y, c;
    for (int i = 0; i < 500; ++i) {
        c.push_back(n01(rng));
        x.push_back(c.back() + small(rng));
        y.push_back(c.back() + small(rng));
    }
    EXPECT_GT(stats::pearson(x, y).r, 0.99);
    EXPECT_LT(std::abs(stats::partial_correlation(x, y, c).r), 0.15);
}

TEST(Entropy, Examples) {
    EXPECT_NEAR(stats::word_entropy(std::vector<std::string>{"a a b b"}), 1.0, 1e-9);
    EXPECT_NEAR(stats::word_entropy(std::vector<std::string>{"a a a a"}), 0.0, 1e-9);
    EXPECT_NEAR(stats::word_entropy(std::vector<std::string>{"a b c d e f g h"}), 3.0, 1e-9);
    EXPECT_THROW(stats::word_entropy(std::vector<std::string>{" ,. "}), ValidationError);
}

TEST(Entropy, PooledCountsMatchOracle) {
    const std::vector<std::string> corpus{"the cat sat", "The dog, the cat!", "a bird"};
    // the:3 cat:2 sat:1 dog:1 a:1 bird:1
    EXPECT_NEAR(stats::word_entropy(corpus), oracle::entropy_bits({3, 2, 1, 1, 1, 1}), 1e-12);
    const auto counts = stats::term_counts(corpus);
    EXPECT_EQ(counts.at("the"), 3u);
    EXPECT_EQ(counts.at("cat"), 2u);
    EXPECT_NEAR(stats::word_entropy(corpus, stats::EntropyEstimator::MillerMadow),
                oracle::entropy_bits({3, 2, 1, 1, 1, 1}) + 5.0 / (2 * 9 * std::log(2.0)), 1e-12);
}

TEST(Euclidean, Examples) {
    EXPECT_NEAR(stats::mean_pairwise_euclidean({{0, 0}, {3, 4}}), 5.0, 1e-9);
    EXPECT_NEAR(stats::mean_pairwise_euclidean({{1, 2}, {1, 2}, {1, 2}}), 0.0, 1e-9);
    EXPECT_NEAR(stats::mean_pairwise_euclidean({{0, 0}, {1, 0}, {0, 1}}), (2 + std::sqrt(2.0)) / 3, 1e-9);
    EXPECT_THROW(stats::mean_pairwise_euclidean({{0, 0}, {1}}), ValidationError);
}

TEST(Hamming, Examples) {
    using B = std::vector<bool>;
    EXPECT_NEAR(stats::mean_pairwise_hamming({B{1, 0, 1}, B{1, 0, 1}}), 0.0, 1e-12);
    EXPECT_NEAR(stats::mean_pairwise_hamming({B{1, 1, 1}, B{0, 0, 0}}), 1.0, 1e-12);
    EXPECT_NEAR(stats::mean_pairwise_hamming({B{1, 1, 0}, B{1, 0, 1}, B{0, 1, 1}}), 2.0 / 3.0, 1e-12);
    EXPECT_THROW(stats::mean_pairwise_hamming({B{1, 0}, B{1}}), ValidationError);
}

TEST(NormalCdf, MatchesSeriesOracle) {
    for (double z = -8.0; z <= 8.0; z += 0.25) EXPECT_NEAR(stats::normal_cdf(z), oracle::normal_cdf(z), 1e-9) << z;
    EXPECT_NEAR(stats::normal_cdf(0.0), 0.5, 1e-15);
    EXPECT_THROW(stats::normal_cdf(std::nan("")), DomainError);
}

TEST(StudentT, MatchesQuadratureOracle) {
    for (double dof : {1.0, 2.0, 5.0, 30.0, 498.0})
        for (double t : {0.0, 0.5, 1.0, 2.0, 3.5})
            EXPECT_NEAR(stats::student_t_two_sided_p(t, dof), oracle::student_t_two_sided_p(t, dof), 1e-6)
                << t << " " << dof;
}
