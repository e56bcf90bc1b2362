#pragma once

// Two-phase (alpha, epsilon)-KL-LUCB.
//
// Phase 1 draws n = ceil((1/alpha) ln(2/delta)) arms from the reservoir and
// samples each once. Phase 2 runs KL-LUCB on that pool: every round samples the
// empirical leader and the challenger with the highest upper confidence bound,
// until B(t) = U_challenger - L_leader <= epsilon.

#include "errors.hpp"
#include "exp_family.hpp"
#include "random.hpp"
#include "reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace infbandit {

struct AlgoConfig {
    double alpha{0.05};
    double epsilon{0.05};
    double delta{0.05};
    double gamma{1.2};
    double k1{12.5};
    std::optional<std::uint64_t> max_samples{10'000'000};

    // Smallest admissible k1: 2 (1 + 1/(gamma - 1)) >= 2 sum_t t^{-gamma}.
    static double min_k1(double gamma) { return 2.0 * (1.0 + 1.0 / (gamma - 1.0)); }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
            throw InvalidInput("epsilon must be a nonnegative finite number");
        if (!(gamma > 1.0) || !std::isfinite(gamma)) throw InvalidInput("gamma must exceed 1");
        if (!(k1 >= min_k1(gamma)) || !std::isfinite(k1))
            throw InvalidInput("k1 must be at least 2 (1 + 1/(gamma - 1))");
        if (max_samples && *max_samples == 0) throw InvalidInput("max_samples must be positive");
    }
};

// n = ceil((1/alpha) ln(2/delta)). The 1e-9 slack keeps exact integers (e.g.
// 2 ln e) from being pushed up by round-off.
inline std::size_t initial_pool_size(double alpha, double delta) {
    const double n = std::log(2.0 / delta) / alpha;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(n - 1e-9)));
}

// beta(t, delta) = log(k1 n t^gamma / delta).
inline double exploration_rate(const AlgoConfig& cfg, std::size_t n, std::uint64_t t) {
    return std::log(cfg.k1) + std::log(static_cast<double>(n)) +
           cfg.gamma * std::log(static_cast<double>(t)) - std::log(cfg.delta);
}

struct ArmStats {
    double mean{0.0}; // true mean; never read by the selection logic
    std::uint64_t pulls{0};
    double reward_sum{0.0};

    double empirical_mean() const { return reward_sum / static_cast<double>(pulls); }
};

struct LucbState {
    std::vector<ArmStats> arms;
    std::uint64_t t{0};
    std::size_t n{0};
    double stopping_index{std::numeric_limits<double>::infinity()};
    std::size_t leader{0};
    std::size_t challenger{0};
    double leader_lower{0.0};
    double challenger_upper{0.0};
    bool budget_exhausted{false};
};

struct PairChoice {
    std::size_t leader{0};
    std::size_t challenger{0};
    double leader_lower{0.0};
    double challenger_upper{0.0};
    double stopping_index() const { return challenger_upper - leader_lower; }
};

struct ConfidenceInterval {
    double lower{0.0};
    double upper{0.0};
};

inline ConfidenceInterval confidence_interval(const LucbState& state, const AlgoConfig& cfg,
                                              const ArmFamily& fam, std::size_t arm) {
    const auto& a = state.arms.at(arm);
    const double level = exploration_rate(cfg, state.n, state.t);
    const double p_hat = a.empirical_mean();
    return {lower_conf(fam, p_hat, a.pulls, level), upper_conf(fam, p_hat, a.pulls, level)};
}

inline LucbState init_phase(const AlgoConfig& cfg, const Reservoir& res, const ArmFamily& fam,
                            Rng& rng) {
    cfg.validate();
    LucbState state;
    state.n = initial_pool_size(cfg.alpha, cfg.delta);
    state.arms.resize(state.n);
    for (auto& arm : state.arms) arm.mean = res.draw_mean(rng);
    for (auto& arm : state.arms) {
        arm.pulls = 1;
        arm.reward_sum = sample(fam, arm.mean, rng);
    }
    state.t = state.n;
    return state;
}

// Leader = argmax empirical mean, challenger = argmax_{a != leader} U_a, both
// breaking ties toward the lowest index. `level` is the exploration rate.
inline PairChoice select_pair(const LucbState& state, const ArmFamily& fam, double level) {
    const auto& arms = state.arms;
    if (arms.size() < 2)
        throw DegeneratePool("a pool of fewer than two arms has no challenger");

    PairChoice choice;
    double best = arms[0].empirical_mean();
    for (std::size_t a = 1; a < arms.size(); ++a) {
        const double p = arms[a].empirical_mean();
        if (p > best) {
            best = p;
            choice.leader = a;
        }
    }

    // U is increasing in the empirical mean at a fixed pull count, so only the
    // best arm of each pull-count class can be the challenger.
    thread_local std::vector<std::size_t> order;
    order.clear();
    for (std::size_t a = 0; a < arms.size(); ++a)
        if (a != choice.leader) order.push_back(a);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (arms[x].pulls != arms[y].pulls) return arms[x].pulls < arms[y].pulls;
        if (arms[x].reward_sum != arms[y].reward_sum)
            return arms[x].reward_sum > arms[y].reward_sum;
        return x < y;
    });

    bool have = false;
    double best_upper = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t a = order[k];
        if (k > 0 && arms[order[k - 1]].pulls == arms[a].pulls) continue;
        const double u = upper_conf(fam, arms[a].empirical_mean(), arms[a].pulls, level);
        if (!have || u > best_upper || (u == best_upper && a < choice.challenger)) {
            have = true;
            best_upper = u;
            choice.challenger = a;
        }
    }
    choice.challenger_upper = best_upper;
    const auto& lead = arms[choice.leader];
    choice.leader_lower = lower_conf(fam, lead.empirical_mean(), lead.pulls, level);
    return choice;
}

inline PairChoice select_pair(const LucbState& state, const AlgoConfig& cfg,
                              const ArmFamily& fam) {
    return select_pair(state, fam, exploration_rate(cfg, state.n, state.t));
}

// Recomputes leader, challenger and B(t) from the current statistics.
inline void refresh(LucbState& state, const AlgoConfig& cfg, const ArmFamily& fam) {
    const PairChoice c = select_pair(state, cfg, fam);
    state.leader = c.leader;
    state.challenger = c.challenger;
    state.leader_lower = c.leader_lower;
    state.challenger_upper = c.challenger_upper;
    state.stopping_index = c.stopping_index();
}

enum class StepOutcome { Sampled, BudgetExhausted };

// Samples the current leader and challenger once each, then refreshes the
// pair and B(t) at the new t. The state must have been refreshed before.
inline StepOutcome step(LucbState& state, const AlgoConfig& cfg, const ArmFamily& fam, Rng& rng) {
    if (cfg.max_samples && state.t + 2 > *cfg.max_samples) {
        state.budget_exhausted = true;
        return StepOutcome::BudgetExhausted;
    }
    for (std::size_t a : {state.leader, state.challenger}) {
        auto& arm = state.arms[a];
        arm.reward_sum += sample(fam, arm.mean, rng);
        ++arm.pulls;
    }
    state.t += 2;
    refresh(state, cfg, fam);
    return StepOutcome::Sampled;
}

struct RunResult {
    std::size_t recommended{0};
    double recommended_mean{0.0};
    double pool_best_mean{0.0};
    std::uint64_t tau{0};
    std::size_t n{0};
    double stopping_index{0.0};
    double leader_lower{0.0};
    double challenger_upper{0.0};
    bool budget_exhausted{false};
    std::vector<double> pool_means;
};

inline bool should_stop(const LucbState& state, const AlgoConfig& cfg) {
    return state.stopping_index <= cfg.epsilon;
}

inline RunResult run(const AlgoConfig& cfg, const Reservoir& res, const ArmFamily& fam, Rng& rng) {
    LucbState state = init_phase(cfg, res, fam, rng);

    if (state.arms.size() >= 2) {
        refresh(state, cfg, fam);
        while (!should_stop(state, cfg)) {
            if (step(state, cfg, fam, rng) == StepOutcome::BudgetExhausted) break;
        }
    }

    RunResult out;
    out.recommended = state.leader;
    out.recommended_mean = state.arms[state.leader].mean;
    out.tau = state.t;
    out.n = state.n;
    out.stopping_index = state.stopping_index;
    out.leader_lower = state.leader_lower;
    out.challenger_upper = state.challenger_upper;
    out.budget_exhausted = state.budget_exhausted;
    out.pool_means.reserve(state.arms.size());
    for (const auto& a : state.arms) out.pool_means.push_back(a.mean);
    out.pool_best_mean = *std::max_element(out.pool_means.begin(), out.pool_means.end());
    return out;
}

} // namespace infbandit
