#include "coalopt/objective.hpp"

#include <cmath>
#include <cstring>

#include "coalopt/errors.hpp"

namespace coalopt {

void ScenarioBounds::validate() const {
    if (!std::isfinite(rate_min_mt_yr) || !std::isfinite(rate_max_mt_yr) ||
        rate_min_mt_yr < 0 || !(rate_max_mt_yr > rate_min_mt_yr))
        throw ValidationError("rate bounds must satisfy 0 <= rate_min < rate_max");
    if (num_intervals < 1) throw ValidationError("bounds need at least one interval");
    if (!(interval_years > 0)) throw ValidationError("interval length must be positive");
}

std::vector<double> ScenarioBounds::lower_bounds(int num_wells) const {
    return std::vector<double>(dimensions(num_wells), rate_min_mt_yr);
}

std::vector<double> ScenarioBounds::upper_bounds(int num_wells) const {
    return std::vector<double>(dimensions(num_wells), rate_max_mt_yr);
}

InjectionSchedule ScenarioBounds::schedule_from_vector(
    int num_wells, std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimensions(num_wells))
        throw ValidationError("design vector has the wrong dimension");
    InjectionSchedule s;
    s.num_wells = num_wells;
    s.num_intervals = num_intervals;
    s.interval_years = interval_years;
    s.rates_mt_yr.assign(x.begin(), x.end());
    return s;
}

std::vector<double> ScenarioBounds::vector_from_schedule(const InjectionSchedule& s) const {
    if (s.num_intervals != num_intervals || s.interval_years != interval_years)
        throw ValidationError("schedule shape does not match the bounds");
    return s.rates_mt_yr;
}

double coalition_value_mt(const InjectionSchedule& schedule, const Coalition& coalition) {
    if (coalition.members.empty()) throw ValidationError("empty coalition");
    double sum = 0.0;
    for (int w : coalition.members) {
        if (w < 0 || w >= schedule.num_wells)
            throw ValidationError("coalition member " + std::to_string(w) +
                                  " has no well in the schedule");
        sum += schedule.total_for_well(w);
    }
    return sum;
}

double weighted_sum(std::span<const double> values, std::span<const double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw ValidationError("weight vector length must match the value count");
    double wsum = 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0)
            throw ValidationError("weights must be finite and non-negative");
        if (!std::isfinite(values[i]))
            throw ValidationError("objective values must be finite");
        wsum += weights[i];
        dot += weights[i] * values[i];
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ValidationError("weights must sum to one");
    return dot;
}

Evaluator::Evaluator(std::shared_ptr<const ResponseBasis> basis)
    : basis_(std::move(basis)) {
    if (!basis_) throw ValidationError("evaluator needs a response basis");
}

double Evaluator::max_rel_pressure(const InjectionSchedule& schedule) const {
    schedule.validate(num_wells());
    std::string key(reinterpret_cast<const char*>(schedule.rates_mt_yr.data()),
                    schedule.rates_mt_yr.size() * sizeof(double));
    std::promise<double> promise;
    std::shared_future<double> future;
    bool owner = false;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            future = it->second;
        } else {
            owner = true;
            future = promise.get_future().share();
            cache_.emplace(std::move(key), future);
        }
    }
    if (owner) {
        try {
            const double value = basis_->max_relative_pressure(schedule);
            count_.fetch_add(1, std::memory_order_relaxed);
            promise.set_value(value);
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

ObjectiveReport Evaluator::evaluate(const InjectionSchedule& schedule,
                                    const CoalitionStructure& structure) const {
    if (structure.agent_count() != num_wells())
        throw ValidationError("structure agent count does not match the well count");
    ObjectiveReport report;
    report.max_rel_pressure = max_rel_pressure(schedule);
    report.coalition_values_mt.reserve(structure.coalition_count());
    for (const auto& c : structure.coalitions())
        report.coalition_values_mt.push_back(coalition_value_mt(schedule, c));
    report.total_mt = 0.0;
    for (double v : report.coalition_values_mt) report.total_mt += v;
    report.violation = std::max(0.0, report.max_rel_pressure - kRatioLimit);
    report.feasible = report.max_rel_pressure <= kRatioLimit;
    return report;
}

}  // namespace coalopt
