#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace benchgen {

class WorkerPool;

namespace reliability {

struct RankTestInput {
    double acc_a = 0.0;
    double acc_b = 0.0;
    std::int64_t n = 0;
    double k = 0.0;            // noise fraction
    std::optional<double> p;   // accuracy on noisy items
};

enum class Winner { A, B, Tie };
std::string to_string(Winner w);

struct RankTestResult {
    double z = 0.0;
    double confidence = 0.5;  // Phi(|z|)
    double p_value = 0.5;     // 1 - Phi(|z|)
    Winner winner = Winner::Tie;
    std::optional<double> denoised_a;
    std::optional<double> denoised_b;
};

// (acc - k p) / (1 - k). DomainError unless k in [0, 1); InconsistencyError
// when the result leaves [0, 1].
double denoise_accuracy(double acc, double k, double p);

// Two-proportion z statistic on observed accuracies. K is validated and
// used for the denoised accuracies only; it never enters z.
RankTestResult rank_test(const RankTestInput& in);

struct SimulationParams {
    double true_a = 0.0;
    double true_b = 0.0;
    std::int64_t n = 0;
    double k = 0.0;
    double p = 0.25;
    std::optional<double> p_b;  // B's accuracy on noisy items when it differs from A's
    std::int64_t trials = 10000;
    std::uint64_t seed = 0;
};

struct SimulationResult {
    double empirical_rank_correct_rate = 0.0;
    double mean_predicted_confidence = 0.0;
    std::int64_t trials = 0;
};

// Each trial draws round((1 - k) n) clean items answered with probability
// true_a / true_b and the rest answered with probability p, then applies
// rank_test. Trials use independent substreams of `seed`, so the result does
// not depend on `pool`. Observed ties count half.
SimulationResult validate_by_simulation(const SimulationParams& params, WorkerPool* pool = nullptr);

}  // namespace reliability
}  // namespace benchgen
