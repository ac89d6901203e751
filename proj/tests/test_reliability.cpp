#include <cmath>

#include <gtest/gtest.h>

#include "benchgen/error.hpp"
#include "benchgen/reliability.hpp"
#include "benchgen/worker_pool.hpp"
#include "oracles.hpp"

using namespace benchgen;
using namespace benchgen::reliability;

TEST(Denoise, Arithmetic) {
    EXPECT_DOUBLE_EQ(denoise_accuracy(0.6, 0.0, 0.25), 0.6);
    EXPECT_NEAR(denoise_accuracy(0.6, 0.2, 0.25), 0.6875, 1e-12);
    EXPECT_THROW(denoise_accuracy(0.1, 0.5, 0.9), InconsistencyError);
    EXPECT_THROW(denoise_accuracy(0.5, 1.0, 0.25), DomainError);
    EXPECT_THROW(denoise_accuracy(1.5, 0.1, 0.25), DomainError);
}

TEST(RankTest, SymmetricNull) {
    for (std::int64_t n : {2, 100, 100000}) {
        const auto r = rank_test({0.5, 0.5, n, 0.0, std::nullopt});
        EXPECT_EQ(r.z, 0.0);
        EXPECT_EQ(r.confidence, 0.5);
        EXPECT_EQ(r.winner, Winner::Tie);
    }
}

TEST(RankTest, NumericOracle) {
    const auto r = rank_test({0.6, 0.5, 100, 0.0, std::nullopt});
    const double z = 0.1 * 10 / std::sqrt(0.24 + 0.25);
    EXPECT_NEAR(r.z, z, 1e-12);
    EXPECT_NEAR(r.z, 1.4285714, 1e-6);
    EXPECT_NEAR(r.confidence, oracle::normal_cdf(z), 1e-9);
    EXPECT_NEAR(r.confidence, 0.9234, 1e-4);
    EXPECT_NEAR(r.p_value, 1 - oracle::normal_cdf(z), 1e-9);
    EXPECT_NEAR(r.p_value, 0.0766, 1e-4);
    EXPECT_EQ(r.winner, Winner::A);
    EXPECT_EQ(rank_test({0.5, 0.6, 100, 0.0, std::nullopt}).winner, Winner::B);
}

TEST(RankTest, NoiseRatioDoesNotEnterZ) {
    const auto base = rank_test({0.6, 0.5, 100, 0.0, std::nullopt});
    for (double k : {0.1, 0.3, 0.5}) {
        const auto r = rank_test({0.6, 0.5, 100, k, 0.25});
        EXPECT_NEAR(r.z, base.z, 1e-12);
        ASSERT_TRUE(r.denoised_a);
        EXPECT_NEAR(*r.denoised_a, (0.6 - k * 0.25) / (1 - k), 1e-12);
    }
    EXPECT_NEAR(rank_test({0.6, 0.5, 100, 0.9, std::nullopt}).z, base.z, 1e-12);
}

TEST(RankTest, Errors) {
    EXPECT_THROW(rank_test({1.0, 1.0, 10, 0.0, std::nullopt}), DegenerateInputError);
    EXPECT_THROW(rank_test({0.5, 0.4, 10, 1.0, std::nullopt}), DomainError);
    EXPECT_THROW(rank_test({0.5, 0.4, 1, 0.0, std::nullopt}), DomainError);
    EXPECT_THROW(rank_test({-0.1, 0.4, 10, 0.0, std::nullopt}), DomainError);
}

TEST(Simulation, EqualAccuraciesGiveCoinFlip) {
    WorkerPool pool(4);
    SimulationParams p;
    p.true_a = p.true_b = 0.6;
    p.n = 500;
    p.k = 0.075;
    p.seed = 3;
    const auto r = validate_by_simulation(p, &pool);
    EXPECT_NEAR(r.empirical_rank_correct_rate, 0.5, 0.02);
}

TEST(Simulation, DeterministicAcrossPoolSizes) {
    SimulationParams p;
    p.true_a = 0.62;
    p.true_b = 0.58;
    p.n = 300;
    p.trials = 2000;
    p.seed = 9;
    WorkerPool one(1), many(8);
    const auto a = validate_by_simulation(p, &one);
    const auto b = validate_by_simulation(p, &many);
    EXPECT_EQ(a.empirical_rank_correct_rate, b.empirical_rank_correct_rate);
    EXPECT_EQ(a.mean_predicted_confidence, b.mean_predicted_confidence);
    EXPECT_EQ(validate_by_simulation(p, nullptr).mean_predicted_confidence, a.mean_predicted_confidence);
}

TEST(Simulation, NoiseOnlyShiftsConfidenceThroughSampling) {
    // Same clean gap; the noisy share answers at the same rate for both models.
    WorkerPool pool(4);
    SimulationParams p;
    p.true_a = 0.65;
    p.true_b = 0.55;
    p.n = 500;
    p.seed = 21;
    p.k = 0.0;
    const auto clean = validate_by_simulation(p, &pool);
    p.k = 0.3;
    const auto noisy = validate_by_simulation(p, &pool);
    // The noisy slice dilutes the observed gap, so both rates fall together.
    EXPECT_LT(noisy.mean_predicted_confidence, clean.mean_predicted_confidence);
    EXPECT_LT(noisy.empirical_rank_correct_rate, clean.empirical_rank_correct_rate);
    EXPECT_NEAR(clean.empirical_rank_correct_rate, clean.mean_predicted_confidence, 0.03);
}

TEST(Simulation, DomainChecks) {
    SimulationParams p;
    p.true_a = 0.6;
    p.true_b = 0.5;
    p.n = 100;
    p.trials = 999;
    EXPECT_THROW(validate_by_simulation(p, nullptr), DomainError);
    p.trials = 1000;
    p.k = 1.0;
    EXPECT_THROW(validate_by_simulation(p, nullptr), DomainError);
}
