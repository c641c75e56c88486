#include "coalopt/orchestrator.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "coalopt/errors.hpp"
#include "coalopt/io.hpp"
#include "coalopt/log.hpp"
#include "coalopt/rng.hpp"

namespace coalopt {

namespace {

// Seed streams: 0 = grand-coalition run, 1 = weighted-sum runs, 2 = the
// multi-objective runs; the third component is the structure's plan index.
std::uint64_t grand_seed(std::uint64_t seed) { return derive_stream(seed, 0, 0); }
std::uint64_t wsm_seed(std::uint64_t seed, std::size_t si) {
    return derive_stream(seed, 1, si);
}
std::uint64_t cmoo_seed(std::uint64_t seed, std::size_t si) {
    return derive_stream(seed, 2, si);
}

struct GrandResult {
    std::optional<FrontPoint> point;
    std::int64_t evaluations = 0;
    std::string error;
};

GrandResult solve_grand(const std::shared_ptr<const ResponseBasis>& basis,
                        const CoalitionStructure& grand, const ScenarioBounds& bounds,
                        OptimizerConfig config, std::uint64_t seed) {
    config.seed = seed;
    Evaluator evaluator(basis);
    const int n = evaluator.num_wells();
    ScalarProblem problem;
    problem.evaluate = [&](std::span<const double> x) {
        const auto report = evaluator.evaluate(bounds.schedule_from_vector(n, x), grand);
        return ScalarEval{report.total_mt, report.violation};
    };
    problem.evaluations_used = [&] { return evaluator.evaluations_used(); };
    const std::vector<double> lower = bounds.lower_bounds(n);
    const std::vector<double> upper = bounds.upper_bounds(n);
    const SooResult result = cso_maximize(problem, lower, upper, config);

    GrandResult out;
    out.evaluations = evaluator.evaluations_used();
    if (result.best.eval.violation > 0.0) {
        out.error = "grand coalition: no feasible schedule found (best violation " +
                    format_double(result.best.eval.violation) + ")";
        return out;
    }
    const InjectionSchedule schedule =
        bounds.schedule_from_vector(n, result.best.position);
    const ObjectiveReport report = evaluator.evaluate(schedule, grand);
    FrontPoint point;
    point.values_mt = report.coalition_values_mt;
    point.total_mt = report.total_mt;
    point.schedule = schedule;
    point.max_rel_pressure = report.max_rel_pressure;
    point.method = "soo";
    out.point = std::move(point);
    return out;
}

const FrontPoint& select_point(const ParetoFront& front, const Criterion& criterion) {
    return criterion.kind == Criterion::Kind::MaxTotal
               ? select_max_total(front)
               : select_max_agent(front, criterion.agent_index);
}

}  // namespace

Criterion parse_criterion(const std::string& text, const AgentSet& agents) {
    Criterion c;
    if (text == "max-total") {
        c.kind = Criterion::Kind::MaxTotal;
        c.text = text;
        return c;
    }
    const std::string prefix = "max-agent:";
    if (text.rfind(prefix, 0) == 0) {
        c.kind = Criterion::Kind::MaxAgent;
        c.agent_index = agents.index_of(text.substr(prefix.size()));
        c.text = prefix + agents.label(c.agent_index);
        return c;
    }
    throw ValidationError("unknown criterion '" + text +
                          "' (use max-total or max-agent:<label>)");
}

void StudyPlan::validate() const {
    if (agents.count() < 1) throw ValidationError("study plan needs at least one agent");
    if (structures.empty())
        throw ValidationError("study plan admits no coalition structure");
    for (const auto& structure : structures)
        if (structure.agent_count() != agents.count())
            throw ValidationError("structure agent count does not match the agent set");
    if (methods.empty()) throw ValidationError("study plan needs at least one method");
    for (const auto& method : methods) {
        if (method != "wsm" && method != "cmoo")
            throw ValidationError("unknown method '" + method + "'");
        if (std::count(methods.begin(), methods.end(), method) != 1)
            throw ValidationError("method '" + method + "' listed twice");
    }
    if (criteria.empty())
        throw ValidationError("study plan needs at least one criterion");
    for (const auto& criterion : criteria)
        if (criterion.kind == Criterion::Kind::MaxAgent &&
            (criterion.agent_index < 0 || criterion.agent_index >= agents.count()))
            throw ValidationError("criterion '" + criterion.text +
                                  "' names an agent outside the agent set");
    soo.validate();
    moo.validate();
    if (max_structures < 1)
        throw ValidationError("max_structures must be at least 1");
    const bool wsm_enabled =
        std::find(methods.begin(), methods.end(), "wsm") != methods.end();
    if (wsm_enabled) {
        for (const auto& structure : structures) {
            const int m = structure.coalition_count();
            if (m < 2) continue;  // grand coalition is solved directly
            const auto it = weight_increments.find(m);
            if (it == weight_increments.end())
                throw ValidationError("no weight increment for coalition count " +
                                      std::to_string(m));
            weight_grid(m, it->second);  // validates the increment
        }
    }
}

StudyPlan plan_from_config(const ScenarioConfig& config) {
    config.validate();
    StudyPlan plan;
    plan.agents = config.agents();
    const StructureFilter filter = config.filter(plan.agents);
    for (auto& structure : enumerate_structures(plan.agents))
        if (filter.admits(structure)) plan.structures.push_back(std::move(structure));
    plan.methods = config.methods;
    plan.soo = config.soo;
    plan.moo = config.moo;
    plan.weight_increments = config.weight_increments;
    for (const auto& text : config.criteria)
        plan.criteria.push_back(parse_criterion(text, plan.agents));
    plan.seed = config.seed;
    plan.max_structures = config.max_structures;
    plan.validate();
    return plan;
}

StudyReport run_study(const StudyPlan& plan, const ReservoirModel& model,
                      const ScenarioBounds& bounds) {
    plan.validate();
    model.validate();
    bounds.validate();
    if (static_cast<int>(model.wells.size()) != plan.agents.count())
        throw ValidationError("model well count does not match the plan's agent set");
    if (static_cast<int>(plan.structures.size()) > plan.max_structures)
        throw CapacityError(
            "study plan holds " + std::to_string(plan.structures.size()) +
            " coalition structures, above the cap of " +
            std::to_string(plan.max_structures) +
            "; raise max_structures or narrow the run with structure filters");

    const auto basis =
        std::make_shared<const ResponseBasis>(model, bounds.num_intervals,
                                              bounds.interval_years);
    const int n = plan.agents.count();

    StudyReport report;
    report.agents = plan.agents;

    // The grand coalition is solved once, by direct single-objective search.
    std::vector<int> everyone(n);
    std::iota(everyone.begin(), everyone.end(), 0);
    const CoalitionStructure grand_structure(n, {Coalition{std::move(everyone)}});
    const GrandResult grand = solve_grand(basis, grand_structure, bounds, plan.soo,
                                          grand_seed(plan.seed));
    report.grand = grand.point;
    report.grand_evaluations = grand.evaluations;
    report.ledger.push_back({grand_structure.canonical_key(),
                             grand_structure.to_text(plan.agents), "soo",
                             grand.evaluations});
    if (!grand.point) {
        report.errors.push_back(grand.error);
        log_warn(grand.error);
    }

    for (std::size_t si = 0; si < plan.structures.size(); ++si) {
        const CoalitionStructure& structure = plan.structures[si];
        StructureRun run;
        run.structure = structure;
        if (structure.is_grand()) {
            if (report.grand) {
                ParetoFront front;
                front.structure = structure;
                front.points = {*report.grand};
                front.evaluations_used = grand.evaluations;
                run.fronts.emplace_back("soo", std::move(front));
            } else {
                run.failures.push_back({"soo", grand.error, grand.evaluations});
            }
            report.runs.push_back(std::move(run));
            continue;
        }
        for (const auto& method : plan.methods) {
            const std::string key = structure.canonical_key();
            const std::string text = structure.to_text(plan.agents);
            try {
                ParetoFront front;
                if (method == "wsm") {
                    OptimizerConfig config = plan.soo;
                    config.seed = wsm_seed(plan.seed, si);
                    const auto grid =
                        weight_grid(structure.coalition_count(),
                                    plan.weight_increments.at(structure.coalition_count()));
                    front = wsm_front(basis, structure, bounds, grid, config);
                } else {
                    MooConfig config = plan.moo;
                    config.seed = cmoo_seed(plan.seed, si);
                    front = cmoo_front(basis, structure, bounds, config);
                }
                report.ledger.push_back({key, text, method, front.evaluations_used});
                if (front.points.empty()) {
                    run.failures.push_back({method,
                                            "empty front: no feasible schedule found",
                                            front.evaluations_used});
                } else {
                    run.fronts.emplace_back(method, std::move(front));
                }
            } catch (const std::exception& e) {
                report.ledger.push_back({key, text, method, 0});
                run.failures.push_back({method, e.what(), 0});
                log_warn("structure " + text + ", method " + method + ": " + e.what());
            }
        }
        report.runs.push_back(std::move(run));
    }

    for (const auto& criterion : plan.criteria) {
        for (const auto& run : report.runs) {
            for (const auto& [method, front] : run.fronts) {
                const FrontPoint& point = select_point(front, criterion);
                for (int j = 0; j < run.structure.coalition_count(); ++j) {
                    ComparisonRow row;
                    row.criterion = criterion.text;
                    row.method = method;
                    row.structure_text = run.structure.to_text(plan.agents);
                    row.coalition_text =
                        run.structure.coalitions()[j].to_text(plan.agents);
                    row.value_mt = point.values_mt[j];
                    row.total_mt = point.total_mt;
                    row.max_rel_pressure = point.max_rel_pressure;
                    report.table.push_back(std::move(row));
                }
            }
        }
    }

    report.total_evaluations = 0;
    for (const auto& row : report.ledger) report.total_evaluations += row.evaluations;
    report.complete = report.errors.empty() &&
                      std::all_of(report.runs.begin(), report.runs.end(),
                                  [](const StructureRun& r) { return r.failures.empty(); });
    return report;
}

GrandCheck verify_grand_on_front(const ParetoFront& front,
                                 const InjectionSchedule& grand_schedule,
                                 double tolerance_mt) {
    if (front.points.empty())
        throw ValidationError("cannot verify the grand solution against an empty front");
    if (!(tolerance_mt >= 0.0))
        throw ValidationError("verification tolerance must be non-negative");
    if (grand_schedule.num_wells != front.structure.agent_count())
        throw ValidationError("schedule well count does not match the front's structure");
    grand_schedule.validate(grand_schedule.num_wells);

    const auto& coalitions = front.structure.coalitions();
    const int m = front.structure.coalition_count();
    std::vector<double> grand_values(m);
    for (int j = 0; j < m; ++j)
        grand_values[j] = coalition_value_mt(grand_schedule, coalitions[j]);

    // Two margins, both in Mt: the strongest domination of the grand
    // decomposition by a front point, and the distance from the
    // decomposition to the nearest covering point.
    double dominate = 0.0;
    double coverage = std::numeric_limits<double>::infinity();
    for (const auto& point : front.points) {
        if (static_cast<int>(point.values_mt.size()) != m)
            throw ValidationError("front point dimension does not match the structure");
        double margin = std::numeric_limits<double>::infinity();
        double shortfall = 0.0;
        for (int j = 0; j < m; ++j) {
            margin = std::min(margin, point.values_mt[j] - grand_values[j]);
            shortfall = std::max(shortfall, grand_values[j] - point.values_mt[j]);
        }
        dominate = std::max(dominate, margin);
        coverage = std::min(coverage, std::max(0.0, shortfall));
    }

    GrandCheck check;
    check.gap_mt = std::max(dominate, coverage);
    check.ok = check.gap_mt <= tolerance_mt;
    return check;
}

void write_study_directory(const StudyReport& report, const ScenarioConfig& config,
                           const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const AgentSet& agents = report.agents;
    const ReservoirModel model = config.model();

    write_text_file(dir / "scenario.json", serialize_config(config));

    nlohmann::json manifest;
    manifest["scenario_hash"] = scenario_hash(config);
    manifest["seed"] = config.seed;
    manifest["complete"] = report.complete;
    manifest["total_evaluations"] = report.total_evaluations;
    manifest["criteria"] = config.criteria;
    manifest["methods"] = config.methods;
    manifest["errors"] = report.errors;
    if (report.grand) {
        manifest["grand"] = {{"total_mt", report.grand->total_mt},
                             {"max_rel_pressure", report.grand->max_rel_pressure},
                             {"evaluations", report.grand_evaluations}};
    } else {
        manifest["grand"] = nullptr;
    }

    nlohmann::json structures = nlohmann::json::array();
    for (const auto& run : report.runs) {
        const std::string key = run.structure.canonical_key();
        nlohmann::json entry;
        entry["key"] = key;
        entry["text"] = run.structure.to_text(agents);
        nlohmann::json fronts = nlohmann::json::object();
        for (const auto& [method, front] : run.fronts) {
            const std::string file = "front_" + key + "_" + method + ".csv";
            write_text_file(dir / file, front_to_csv(front, agents, model));
            fronts[method] = {{"file", file},
                              {"points", front.points.size()},
                              {"evaluations", front.evaluations_used}};
        }
        entry["fronts"] = std::move(fronts);
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& failure : run.failures)
            failures.push_back({{"method", failure.method}, {"error", failure.error}});
        entry["failures"] = std::move(failures);
        structures.push_back(std::move(entry));
    }
    manifest["structures"] = std::move(structures);
    manifest["files"] = {{"scenario", "scenario.json"},
                         {"comparison_table", "comparison_table.csv"},
                         {"budget_ledger", "budget_ledger.csv"}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

    std::string table =
        "criterion,method,structure,coalition,value_mt,total_mt,max_rel_pressure\n";
    for (const auto& row : report.table) {
        table += csv_field(row.criterion) + "," + csv_field(row.method) + "," +
                 csv_field(row.structure_text) + "," + csv_field(row.coalition_text) +
                 "," + format_double(row.value_mt) + "," + format_double(row.total_mt) +
                 "," + format_double(row.max_rel_pressure) + "\n";
    }
    write_text_file(dir / "comparison_table.csv", table);

    std::string ledger = "structure_key,structure,method,evaluations\n";
    for (const auto& row : report.ledger) {
        ledger += csv_field(row.structure_key) + "," + csv_field(row.structure_text) +
                  "," + csv_field(row.method) + "," + std::to_string(row.evaluations) +
                  "\n";
    }
    ledger += "total,,," + std::to_string(report.total_evaluations) + "\n";
    write_text_file(dir / "budget_ledger.csv", ledger);
}

}  // namespace coalopt
