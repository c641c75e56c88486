#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "coalopt/coalition.hpp"
#include "coalopt/reservoir.hpp"

namespace coalopt {

/// Box bounds and horizon shared by all design vectors of a scenario. A
/// design vector holds one rate per (well, interval) pair, well-major.
struct ScenarioBounds {
    double rate_min_mt_yr = 0.0;
    double rate_max_mt_yr = 0.0;
    int num_intervals = 0;
    double interval_years = 0.0;

    void validate() const;
    int dimensions(int num_wells) const { return num_wells * num_intervals; }
    std::vector<double> lower_bounds(int num_wells) const;
    std::vector<double> upper_bounds(int num_wells) const;
    InjectionSchedule schedule_from_vector(int num_wells,
                                           std::span<const double> x) const;
    std::vector<double> vector_from_schedule(const InjectionSchedule& s) const;
};

/// Objectives and constraint state of one schedule under one structure.
struct ObjectiveReport {
    std::vector<double> coalition_values_mt;
    double total_mt = 0.0;
    double max_rel_pressure = 0.0;
    double violation = 0.0;  // max(0, max_rel_pressure - kRatioLimit)
    bool feasible = false;
};

/// Mass injected by the coalition's wells over the horizon, in Mt.
double coalition_value_mt(const InjectionSchedule& schedule, const Coalition& coalition);

/// Weighted-sum scalarization. Weights must be non-negative, finite, match
/// the value count, and sum to one within 1e-9; zero weights are admitted.
double weighted_sum(std::span<const double> values, std::span<const double> weights);

/// Evaluates schedules against the pressure constraint, caching the
/// expensive pressure result per distinct rate matrix. Concurrent calls for
/// the same schedule run the simulation once and share the result, so
/// evaluations_used() counts distinct simulations regardless of thread
/// interleaving. Coalition values are recomputed per call (they are cheap
/// linear sums), which lets one cache serve any structure.
class Evaluator {
public:
    explicit Evaluator(std::shared_ptr<const ResponseBasis> basis);

    ObjectiveReport evaluate(const InjectionSchedule& schedule,
                             const CoalitionStructure& structure) const;

    /// Maximum pressure ratio for the schedule (cached).
    double max_rel_pressure(const InjectionSchedule& schedule) const;

    /// Number of pressure simulations run so far (cache misses).
    std::int64_t evaluations_used() const { return count_.load(); }

    const ResponseBasis& basis() const { return *basis_; }
    int num_wells() const { return static_cast<int>(basis_->model().wells.size()); }

private:
    std::shared_ptr<const ResponseBasis> basis_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, std::shared_future<double>> cache_;
    mutable std::atomic<std::int64_t> count_{0};
};

}  // namespace coalopt
