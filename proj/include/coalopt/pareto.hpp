#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coalopt/cmoo.hpp"
#include "coalopt/coalition.hpp"
#include "coalopt/cso.hpp"
#include "coalopt/objective.hpp"
#include "coalopt/reservoir.hpp"
#include "coalopt/rng.hpp"

namespace coalopt {

/// All weight vectors of the uniform simplex lattice with the given
/// increment, which must be 1/K for an integer K >= 1: every composition
/// (i_1, .., i_m)/K with sum K, ordered lexicographically by components.
/// m = 2, increment 0.1 yields (0,1), (0.1,0.9), .., (1,0); boundary
/// weights (zero entries) are included.
std::vector<std::vector<double>> weight_grid(int num_objectives, double increment);

/// Indices of the maximal elements under componentwise >= with at least
/// one strict inequality (maximization). Order is stable; duplicate
/// vectors keep only their first occurrence.
std::vector<std::size_t> nondominated_indices(
    const std::vector<std::vector<double>>& values);

/// One Pareto-front member: the coalition value vector, the schedule that
/// realizes it, and provenance (producing method, and for the weighted-sum
/// method the weight the point was selected for).
struct FrontPoint {
    std::vector<double> values_mt;  // per coalition, structure order
    double total_mt = 0.0;
    InjectionSchedule schedule;
    double max_rel_pressure = 0.0;
    std::string method;  // "wsm" or "cmoo"
    std::optional<std::vector<double>> weight;
};

/// Per-weight provenance of a weighted-sum run. `mean_values_mt` is the
/// mean coalition-value vector over the run's final population (auxiliary
/// record; front points are bests). An omitted weight found no feasible
/// schedule; its best scalar is NaN and `note` explains the omission.
struct WeightRecord {
    std::vector<double> weight;
    std::uint64_t seed = 0;
    double best_scalar_mt = 0.0;
    std::vector<double> mean_values_mt;
    bool omitted = false;
    std::string note;
};

/// Feasible, mutually non-dominated schedules for one coalition structure.
/// `evaluations_used` counts pressure simulations spent producing it.
/// `best_violation` is the smallest constraint violation any run's best
/// achieved — 0 whenever the front is non-empty, and the diagnostic for
/// why it is empty otherwise.
struct ParetoFront {
    CoalitionStructure structure;
    std::vector<FrontPoint> points;
    std::vector<WeightRecord> weights;  // weighted-sum fronts only
    std::int64_t evaluations_used = 0;
    double best_violation = 0.0;
};

/// Seed of the single-objective run for one weight of a weighted-sum front.
constexpr std::uint64_t wsm_weight_seed(std::uint64_t seed, std::size_t weight_index) {
    return derive_stream(seed, 21, weight_index);
}

/// Weighted-sum front: one constrained swarm run per weight vector
/// (seeded via wsm_weight_seed, budget `soo_config.max_evaluations` each),
/// followed by a pooled re-selection — every weight picks the schedule
/// maximizing its scalarization over all feasible candidates any run
/// produced — and a non-dominated filter. Weights whose runs found no
/// feasible schedule are omitted with a warning record. Runs execute in
/// grid order; the result is deterministic for a fixed seed.
ParetoFront wsm_front(std::shared_ptr<const ResponseBasis> basis,
                      const CoalitionStructure& structure,
                      const ScenarioBounds& bounds,
                      const std::vector<std::vector<double>>& grid,
                      const OptimizerConfig& soo_config);

/// Front from the two-population constrained multi-objective optimizer:
/// its feasible archive, converted to front points and filtered.
ParetoFront cmoo_front(std::shared_ptr<const ResponseBasis> basis,
                       const CoalitionStructure& structure,
                       const ScenarioBounds& bounds, const MooConfig& moo_config);

/// Point maximizing the sum of coalition values; ties keep the first
/// index. Throws ValidationError on an empty front.
const FrontPoint& select_max_total(const ParetoFront& front);

/// Point maximizing the value of the coalition containing the given agent;
/// ties keep the larger total, then the first index. Throws
/// ValidationError on an empty front or an unknown agent.
const FrontPoint& select_max_agent(const ParetoFront& front, int agent_index);

/// Serializes a front as CSV: structure, method, weight vector, one value
/// column per coalition, the total, one rate column per (well, interval),
/// and the peak pressure ratio. Deterministic byte-for-byte.
std::string front_to_csv(const ParetoFront& front, const AgentSet& agents,
                         const ReservoirModel& model);

}  // namespace coalopt
