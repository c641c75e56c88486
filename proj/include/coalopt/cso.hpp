#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace coalopt {

/// Scalar objective with a non-negative constraint violation
/// (0 means feasible).
struct ScalarEval {
    double fitness = 0.0;
    double violation = 0.0;
};

/// Feasibility-rule comparison for maximization: feasible beats infeasible,
/// lower violation beats higher, then higher fitness wins. Returns true when
/// a is strictly better than b.
bool constraint_beats(const ScalarEval& a, const ScalarEval& b);

/// Problem that the swarm maximizes. `evaluate` must be a pure function of
/// the position and safe to call concurrently. `evaluations_used` is the
/// budget meter the optimizer polls; for cached problems it advances only on
/// distinct evaluations, so the swarm keeps iterating until the budget of
/// fresh evaluations is truly spent.
struct ScalarProblem {
    std::function<ScalarEval(std::span<const double>)> evaluate;
    std::function<std::int64_t()> evaluations_used;
};

struct OptimizerConfig {
    int population = 50;
    std::int64_t max_evaluations = 5000;
    double phi = 0.1;
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct SooIndividual {
    std::vector<double> position;
    ScalarEval eval;
};

struct SooProgress {
    int generation = 0;
    double best_fitness = 0.0;
    double best_violation = 0.0;
    std::int64_t evaluations = 0;
};

struct SooResult {
    SooIndividual best;
    std::vector<SooProgress> history;
    std::int64_t evaluations_used = 0;
    /// Last evaluated state of every individual, so position and eval are
    /// always consistent even when the budget ran out mid-generation.
    std::vector<SooIndividual> final_population;
};

/// Competitive swarm optimizer. Each generation pairs the population at
/// random; the winner of each pair is carried over unchanged while the loser
/// moves toward the winner and (weighted by phi) the swarm mean, then is
/// re-evaluated. One individual starts at the lower-bound corner so a
/// known-feasible anchor exists from the first generation. Deterministic for
/// a fixed seed regardless of thread count.
SooResult cso_maximize(const ScalarProblem& problem, std::span<const double> lower,
                       std::span<const double> upper, const OptimizerConfig& config);

}  // namespace coalopt
