#include "coalopt/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coalopt/errors.hpp"
#include "coalopt/io.hpp"
#include "coalopt/log.hpp"

namespace coalopt {

namespace {

void append_compositions(int remaining_slots, int remaining_units, int total_units,
                         std::vector<double>& prefix,
                         std::vector<std::vector<double>>& out) {
    if (remaining_slots == 1) {
        prefix.push_back(static_cast<double>(remaining_units) /
                         static_cast<double>(total_units));
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int units = 0; units <= remaining_units; ++units) {
        prefix.push_back(static_cast<double>(units) / static_cast<double>(total_units));
        append_compositions(remaining_slots - 1, remaining_units - units,
                            total_units, prefix, out);
        prefix.pop_back();
    }
}

std::vector<double> coalition_values(const InjectionSchedule& schedule,
                                     const CoalitionStructure& structure) {
    std::vector<double> values;
    values.reserve(structure.coalition_count());
    for (const auto& c : structure.coalitions())
        values.push_back(coalition_value_mt(schedule, c));
    return values;
}

double sum(const std::vector<double>& values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

void check_front_inputs(const std::shared_ptr<const ResponseBasis>& basis,
                        const CoalitionStructure& structure,
                        const ScenarioBounds& bounds) {
    if (!basis) throw ValidationError("front computation needs a response basis");
    bounds.validate();
    const int num_wells = static_cast<int>(basis->model().wells.size());
    if (structure.agent_count() != num_wells)
        throw ValidationError("structure agent count does not match the well count");
    if (structure.coalition_count() < 1)
        throw ValidationError("structure has no coalitions");
}

std::string join_weight(const std::vector<double>& weight) {
    std::string text;
    for (std::size_t i = 0; i < weight.size(); ++i) {
        if (i > 0) text += ';';
        text += format_double(weight[i]);
    }
    return text;
}

}  // namespace

std::vector<std::vector<double>> weight_grid(int num_objectives, double increment) {
    if (num_objectives < 1) throw ValidationError("need at least one objective");
    if (!(increment > 0) || !(increment <= 1))
        throw ValidationError("weight increment must lie in (0, 1]");
    const long long k = std::llround(1.0 / increment);
    if (k < 1 || std::abs(increment - 1.0 / static_cast<double>(k)) > 1e-12)
        throw ValidationError("weight increment must be the reciprocal of an integer");
    if (num_objectives == 1) return {{1.0}};
    std::vector<std::vector<double>> grid;
    std::vector<double> prefix;
    append_compositions(num_objectives, static_cast<int>(k), static_cast<int>(k),
                        prefix, grid);
    return grid;
}

std::vector<std::size_t> nondominated_indices(
    const std::vector<std::vector<double>>& values) {
    const std::size_t n = values.size();
    for (const auto& v : values)
        if (v.size() != values.front().size())
            throw ValidationError("objective vectors must share one dimension");
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < n && !drop; ++j) {
            if (j == i) continue;
            bool weakly = true;
            bool strictly = false;
            for (std::size_t k = 0; k < values[i].size(); ++k) {
                if (values[j][k] < values[i][k]) {
                    weakly = false;
                    break;
                }
                if (values[j][k] > values[i][k]) strictly = true;
            }
            if (weakly && (strictly || j < i)) drop = true;
        }
        if (!drop) kept.push_back(i);
    }
    return kept;
}

ParetoFront wsm_front(std::shared_ptr<const ResponseBasis> basis,
                      const CoalitionStructure& structure,
                      const ScenarioBounds& bounds,
                      const std::vector<std::vector<double>>& grid,
                      const OptimizerConfig& soo_config) {
    check_front_inputs(basis, structure, bounds);
    soo_config.validate();
    const int num_wells = static_cast<int>(basis->model().wells.size());
    const int m = structure.coalition_count();
    if (grid.empty()) throw ValidationError("weight grid is empty");
    for (const auto& w : grid)
        if (static_cast<int>(w.size()) != m)
            throw ValidationError("weight dimension does not match the coalition count");

    const std::vector<double> lower = bounds.lower_bounds(num_wells);
    const std::vector<double> upper = bounds.upper_bounds(num_wells);

    ParetoFront front;
    front.structure = structure;
    front.best_violation = std::numeric_limits<double>::infinity();

    struct Candidate {
        std::vector<double> position;
        std::vector<double> values;
    };
    std::vector<Candidate> pool;

    for (std::size_t wi = 0; wi < grid.size(); ++wi) {
        const std::vector<double>& weight = grid[wi];
        Evaluator evaluator(basis);
        ScalarProblem problem;
        problem.evaluate = [&](std::span<const double> x) {
            const InjectionSchedule s = bounds.schedule_from_vector(num_wells, x);
            const ObjectiveReport report = evaluator.evaluate(s, structure);
            return ScalarEval{weighted_sum(report.coalition_values_mt, weight),
                              report.violation};
        };
        problem.evaluations_used = [&] { return evaluator.evaluations_used(); };

        OptimizerConfig run_config = soo_config;
        run_config.seed = wsm_weight_seed(soo_config.seed, wi);
        const SooResult result = cso_maximize(problem, lower, upper, run_config);
        front.evaluations_used += evaluator.evaluations_used();
        front.best_violation = std::min(front.best_violation, result.best.eval.violation);

        WeightRecord record;
        record.weight = weight;
        record.seed = run_config.seed;
        std::vector<double> mean(m, 0.0);
        for (const auto& member : result.final_population) {
            const std::vector<double> values = coalition_values(
                bounds.schedule_from_vector(num_wells, member.position), structure);
            for (int j = 0; j < m; ++j) mean[j] += values[j];
        }
        for (double& v : mean)
            v /= static_cast<double>(result.final_population.size());
        record.mean_values_mt = std::move(mean);

        if (result.best.eval.violation > 0) {
            record.omitted = true;
            record.best_scalar_mt = std::numeric_limits<double>::quiet_NaN();
            record.note = "no feasible schedule found; weight omitted";
            log_warn("weight " + join_weight(weight) + ": " + record.note);
        } else {
            record.best_scalar_mt = result.best.eval.fitness;
            pool.push_back({result.best.position,
                            coalition_values(bounds.schedule_from_vector(
                                                 num_wells, result.best.position),
                                             structure)});
            for (const auto& member : result.final_population)
                if (member.eval.violation == 0)
                    pool.push_back({member.position,
                                    coalition_values(bounds.schedule_from_vector(
                                                         num_wells, member.position),
                                                     structure)});
        }
        front.weights.push_back(std::move(record));
    }

    // Every weight re-selects from the pooled feasible candidates of all
    // runs, so each retained point maximizes its own scalarization over
    // everything the whole front computation ever produced.
    Evaluator reporter(basis);
    std::vector<FrontPoint> candidates;
    for (std::size_t wi = 0; wi < grid.size(); ++wi) {
        if (front.weights[wi].omitted) continue;
        std::size_t best_index = 0;
        double best_scalar = -std::numeric_limits<double>::infinity();
        for (std::size_t pi = 0; pi < pool.size(); ++pi) {
            const double scalar = weighted_sum(pool[pi].values, grid[wi]);
            if (scalar > best_scalar) {
                best_scalar = scalar;
                best_index = pi;
            }
        }
        FrontPoint point;
        point.schedule = bounds.schedule_from_vector(num_wells, pool[best_index].position);
        point.values_mt = pool[best_index].values;
        point.total_mt = sum(point.values_mt);
        point.max_rel_pressure = reporter.max_rel_pressure(point.schedule);
        point.method = "wsm";
        point.weight = grid[wi];
        candidates.push_back(std::move(point));
    }
    front.evaluations_used += reporter.evaluations_used();

    std::vector<std::vector<double>> candidate_values;
    candidate_values.reserve(candidates.size());
    for (const auto& c : candidates) candidate_values.push_back(c.values_mt);
    for (std::size_t index : nondominated_indices(candidate_values))
        front.points.push_back(std::move(candidates[index]));
    return front;
}

ParetoFront cmoo_front(std::shared_ptr<const ResponseBasis> basis,
                       const CoalitionStructure& structure,
                       const ScenarioBounds& bounds, const MooConfig& moo_config) {
    check_front_inputs(basis, structure, bounds);
    const int num_wells = static_cast<int>(basis->model().wells.size());

    Evaluator evaluator(basis);
    MooProblem problem;
    problem.num_objectives = structure.coalition_count();
    problem.evaluate = [&](std::span<const double> x) {
        const InjectionSchedule s = bounds.schedule_from_vector(num_wells, x);
        const ObjectiveReport report = evaluator.evaluate(s, structure);
        return MooEval{report.coalition_values_mt, report.violation};
    };
    problem.evaluations_used = [&] { return evaluator.evaluations_used(); };

    const MooResult result =
        cmoo_optimize(problem, bounds.lower_bounds(num_wells),
                      bounds.upper_bounds(num_wells), moo_config);

    ParetoFront front;
    front.structure = structure;
    front.best_violation = result.best_violation;
    std::vector<FrontPoint> candidates;
    for (const auto& archived : result.front) {
        FrontPoint point;
        point.schedule = bounds.schedule_from_vector(num_wells, archived.position);
        point.values_mt = archived.eval.objectives;
        point.total_mt = sum(point.values_mt);
        point.max_rel_pressure = evaluator.max_rel_pressure(point.schedule);
        point.method = "cmoo";
        candidates.push_back(std::move(point));
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const FrontPoint& a, const FrontPoint& b) {
                  return a.values_mt > b.values_mt;
              });
    std::vector<std::vector<double>> candidate_values;
    candidate_values.reserve(candidates.size());
    for (const auto& c : candidates) candidate_values.push_back(c.values_mt);
    for (std::size_t index : nondominated_indices(candidate_values))
        front.points.push_back(std::move(candidates[index]));
    front.evaluations_used = evaluator.evaluations_used();
    return front;
}

const FrontPoint& select_max_total(const ParetoFront& front) {
    if (front.points.empty())
        throw ValidationError("cannot select from an empty front");
    std::size_t best = 0;
    for (std::size_t i = 1; i < front.points.size(); ++i)
        if (front.points[i].total_mt > front.points[best].total_mt) best = i;
    return front.points[best];
}

const FrontPoint& select_max_agent(const ParetoFront& front, int agent_index) {
    if (front.points.empty())
        throw ValidationError("cannot select from an empty front");
    if (agent_index < 0 || agent_index >= front.structure.agent_count())
        throw ValidationError("agent index " + std::to_string(agent_index) +
                              " is not part of the structure");
    const int column = front.structure.coalition_of(agent_index);
    std::size_t best = 0;
    for (std::size_t i = 1; i < front.points.size(); ++i) {
        const double value = front.points[i].values_mt[column];
        const double best_value = front.points[best].values_mt[column];
        if (value > best_value ||
            (value == best_value &&
             front.points[i].total_mt > front.points[best].total_mt))
            best = i;
    }
    return front.points[best];
}

std::string front_to_csv(const ParetoFront& front, const AgentSet& agents,
                         const ReservoirModel& model) {
    std::string csv = "structure,method,weight_vector";
    for (const auto& coalition : front.structure.coalitions())
        csv += "," + csv_field("value_" + coalition.to_text(agents));
    csv += ",total_mt";
    const int intervals =
        front.points.empty() ? 0 : front.points.front().schedule.num_intervals;
    for (const auto& well : model.wells)
        for (int k = 0; k < intervals; ++k)
            csv += ",rate_" + agents.label(well.agent_index) + "_" +
                   std::to_string(k + 1);
    csv += ",max_rel_pressure\n";

    const std::string structure_text = front.structure.to_text(agents);
    for (const auto& point : front.points) {
        csv += csv_field(structure_text) + "," + point.method + ",";
        if (point.weight) csv += csv_field(join_weight(*point.weight));
        for (double v : point.values_mt) csv += "," + format_double(v);
        csv += "," + format_double(point.total_mt);
        for (int w = 0; w < point.schedule.num_wells; ++w)
            for (int k = 0; k < point.schedule.num_intervals; ++k)
                csv += "," + format_double(point.schedule.rate(w, k));
        csv += "," + format_double(point.max_rel_pressure) + "\n";
    }
    return csv;
}

}  // namespace coalopt
