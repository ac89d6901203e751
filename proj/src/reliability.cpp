#include "benchgen/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "benchgen/error.hpp"
#include "benchgen/stats.hpp"
#include "benchgen/worker_pool.hpp"

namespace benchgen::reliability {

namespace {

void require_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must be in [0, 1]");
}

void require_noise(double k) {
    if (!(k >= 0.0 && k < 1.0)) throw DomainError("k must be in [0, 1)");
}

struct TrialSums {
    double correct = 0.0;
    double confidence = 0.0;
};

}  // namespace

std::string to_string(Winner w) {
    switch (w) {
        case Winner::A: return "a";
        case Winner::B: return "b";
        case Winner::Tie: return "tie";
    }
    return "tie";
}

double denoise_accuracy(double acc, double k, double p) {
    require_unit(acc, "accuracy");
    require_unit(p, "p");
    require_noise(k);
    const double v = (acc - k * p) / (1.0 - k);
    if (v < -1e-12 || v > 1.0 + 1e-12)
        throw InconsistencyError("denoised accuracy " + std::to_string(v) + " falls outside [0, 1]");
    return std::clamp(v, 0.0, 1.0);
}

RankTestResult rank_test(const RankTestInput& in) {
    require_unit(in.acc_a, "acc_a");
    require_unit(in.acc_b, "acc_b");
    require_noise(in.k);
    if (in.n < 2) throw DomainError("n must be at least 2");
    const double var = in.acc_a * (1.0 - in.acc_a) + in.acc_b * (1.0 - in.acc_b);
    if (!(var > 0.0)) throw DegenerateInputError("zero variance: both accuracies are 0 or 1");

    RankTestResult r;
    r.z = (in.acc_a - in.acc_b) * std::sqrt(double(in.n)) / std::sqrt(var);
    r.confidence = stats::normal_cdf(std::abs(r.z));
    r.p_value = stats::normal_cdf(-std::abs(r.z));
    r.winner = r.z > 0.0 ? Winner::A : r.z < 0.0 ? Winner::B : Winner::Tie;
    if (in.p) {
        r.denoised_a = denoise_accuracy(in.acc_a, in.k, *in.p);
        r.denoised_b = denoise_accuracy(in.acc_b, in.k, *in.p);
    }
    return r;
}

SimulationResult validate_by_simulation(const SimulationParams& sp, WorkerPool* pool) {
    require_unit(sp.true_a, "true_a");
    require_unit(sp.true_b, "true_b");
    require_unit(sp.p, "p");
    if (sp.p_b) require_unit(*sp.p_b, "p_b");
    require_noise(sp.k);
    if (sp.n < 2) throw DomainError("n must be at least 2");
    if (sp.trials < 1000) throw DomainError("trials must be at least 1000");

    const auto clean = static_cast<std::int64_t>(std::llround((1.0 - sp.k) * double(sp.n)));
    const std::int64_t noisy = sp.n - clean;
    const double p_b = sp.p_b.value_or(sp.p);
    const double n = double(sp.n);

    auto run_trial = [&](std::int64_t t) {
        std::seed_seq seq{static_cast<std::uint32_t>(sp.seed), static_cast<std::uint32_t>(sp.seed >> 32),
                          static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(std::uint64_t(t) >> 32)};
        std::mt19937_64 rng(seq);
        std::binomial_distribution<std::int64_t> ca(clean, sp.true_a), cb(clean, sp.true_b);
        std::binomial_distribution<std::int64_t> na(noisy, sp.p), nb(noisy, p_b);
        const std::int64_t hits_a = ca(rng) + na(rng);
        const std::int64_t hits_b = cb(rng) + nb(rng);
        const double a = double(hits_a) / n;
        const double b = double(hits_b) / n;

        TrialSums s;
        const double var = a * (1.0 - a) + b * (1.0 - b);
        if (var > 0.0) {
            s.confidence = rank_test({a, b, sp.n, sp.k, std::nullopt}).confidence;
        } else {
            s.confidence = hits_a != hits_b ? 1.0 : 0.5;
        }
        if (hits_a == hits_b) {
            s.correct = 0.5;
        } else {
            const bool a_ahead = hits_a > hits_b;
            s.correct = (sp.true_a >= sp.true_b) == a_ahead ? 1.0 : 0.0;
        }
        return s;
    };

    constexpr std::int64_t kChunks = 64;
    const auto chunk_sums = parallel_map(pool, kChunks, [&](std::size_t c) {
        TrialSums total;
        const std::int64_t begin = sp.trials * std::int64_t(c) / kChunks;
        const std::int64_t end = sp.trials * std::int64_t(c + 1) / kChunks;
        for (std::int64_t t = begin; t < end; ++t) {
            const auto s = run_trial(t);
            total.correct += s.correct;
            total.confidence += s.confidence;
        }
        return total;
    });

    TrialSums total;
    for (const auto& c : chunk_sums) {
        total.correct += c.correct;
        total.confidence += c.confidence;
    }
    return SimulationResult{total.correct / double(sp.trials), total.confidence / double(sp.trials), sp.trials};
}

}  // namespace benchgen::reliability
