#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace coalopt {

/// Vector objectives (all maximized) with a non-negative constraint
/// violation (0 means feasible).
struct MooEval {
    std::vector<double> objectives;
    double violation = 0.0;
};

struct MooPoint {
    std::vector<double> position;
    MooEval eval;
};

/// Problem interface mirroring ScalarProblem: pure concurrent-safe
/// evaluation plus an external budget meter.
struct MooProblem {
    std::function<MooEval(std::span<const double>)> evaluate;
    std::function<std::int64_t()> evaluations_used;
    int num_objectives = 0;
};

struct MooConfig {
    int population = 50;
    std::int64_t max_evaluations = 5000;
    double epsilon_decay = 2.0;
    double crossover_prob = 1.0;
    double crossover_index = 20.0;
    double mutation_index = 20.0;
    std::uint64_t seed = 0;
    int threads = 1;
    /// Optional reference for the hypervolume progress metric.
    std::optional<std::vector<double>> hv_reference;

    void validate() const;
};

enum class DominanceMode {
    /// Feasible dominates infeasible; infeasible compare by violation;
    /// feasible compare by Pareto dominance.
    Constrained,
    /// Same, but violations up to the given epsilon count as feasible.
    EpsilonRelaxed,
};

/// True when a dominates b under the mode (maximization).
bool moo_dominates(const MooEval& a, const MooEval& b, DominanceMode mode,
                   double epsilon = 0.0);

/// Front rank per point, 0 for the non-dominated front.
std::vector<int> nondominated_sort(const std::vector<MooEval>& evals,
                                   DominanceMode mode, double epsilon = 0.0);

/// Relaxation schedule: epsilon0 * (1 - t/T)^decay, floored at zero.
double epsilon_schedule(double epsilon0, std::int64_t t, std::int64_t total,
                        double decay);

struct MooProgress {
    int generation = 0;
    std::size_t archive_size = 0;
    double archive_hypervolume = -1.0;  // -1 when no reference is configured
    double epsilon = 0.0;
    std::int64_t evaluations = 0;
};

struct MooResult {
    /// Feasible, mutually non-dominated archive accumulated over the whole
    /// run; empty when no feasible point was ever evaluated.
    std::vector<MooPoint> front;
    /// Smallest violation seen, for diagnosing an empty front.
    double best_violation = 0.0;
    std::int64_t evaluations_used = 0;
    std::vector<MooProgress> progress;
};

/// Two-population constrained multi-objective optimizer. The main
/// population evolves under strict constrained dominance while an auxiliary
/// population works against a shrinking feasibility relaxation, letting it
/// cross infeasible regions early on. Offspring of both populations enter
/// both environmental selections, and every feasible evaluation feeds one
/// shared non-dominated archive which is returned as the front.
/// Deterministic for a fixed seed regardless of thread count.
MooResult cmoo_optimize(const MooProblem& problem, std::span<const double> lower,
                        std::span<const double> upper, const MooConfig& config);

}  // namespace coalopt
