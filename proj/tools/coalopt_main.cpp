#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coalopt/coalition.hpp"
#include "coalopt/config.hpp"
#include "coalopt/errors.hpp"
#include "coalopt/io.hpp"
#include "coalopt/log.hpp"
#include "coalopt/orchestrator.hpp"
#include "coalopt/pareto.hpp"
#include "coalopt/validation.hpp"

using namespace coalopt;
namespace fs = std::filesystem;

namespace {

// Exit codes, also documented in the README: 0 success, 1 failed validation
// checks, 2 invalid input or configuration (including capacity refusals),
// 3 numerical failure, 4 empty front, 5 incomplete study.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEmptyFront = 4;
constexpr int kExitIncomplete = 5;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

ScenarioConfig load_config(const GlobalOptions& options) {
    ScenarioConfig config = options.config_path.empty()
                                ? default_desk_config()
                                : parse_config(read_text_file(options.config_path));
    if (options.seed) config.seed = *options.seed;
    if (options.threads) {
        config.soo.threads = *options.threads;
        config.moo.threads = *options.threads;
    }
    config.validate();
    return config;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_enumerate(const GlobalOptions& options, int numbered, bool list_all) {
    const AgentSet agents =
        numbered > 0 ? AgentSet::numbered(numbered) : load_config(options).agents();
    std::cout << "agents: " << agents.count() << "\n";
    std::vector<CoalitionStructure> structures;
    try {
        structures = enumerate_structures(agents);
    } catch (const CapacityError&) {
        // Too many to list; the count itself is still cheap.
        std::cout << "structures: " << bell_number(agents.count()) << "\n";
        std::cout << "(structure list omitted beyond 12 agents)\n";
        return kExitOk;
    }
    std::cout << "structures: " << structures.size() << "\n";
    if (static_cast<int>(structures.size()) <= 64 || list_all) {
        for (const auto& s : structures)
            std::cout << s.canonical_key() << "\t" << s.to_text(agents) << "\n";
    } else {
        std::cout << "(pass --all to list all " << structures.size()
                  << " structures)\n";
    }
    return kExitOk;
}

int cmd_simulate(const GlobalOptions& options, const std::string& schedule_path,
                 const std::string& structure_text, const std::string& snapshot_dir) {
    const ScenarioConfig config = load_config(options);
    const AgentSet agents = config.agents();
    const ReservoirModel model = config.model();
    const int n = agents.count();

    const InjectionSchedule schedule =
        parse_schedule_csv(read_text_file(schedule_path), n,
                           config.bounds.num_intervals, config.bounds.interval_years);
    for (int w = 0; w < n; ++w)
        for (int k = 0; k < schedule.num_intervals; ++k)
            if (schedule.rate(w, k) < config.bounds.rate_min_mt_yr ||
                schedule.rate(w, k) > config.bounds.rate_max_mt_yr)
                log_warn("rate for well " + agents.label(w) + ", interval " +
                         std::to_string(k + 1) + " (" +
                         format_double(schedule.rate(w, k)) +
                         " Mt/yr) lies outside the scenario bounds");

    const CoalitionStructure structure =
        structure_text.empty()
            ? CoalitionStructure(n, {Coalition{[n] {
                  std::vector<int> everyone(n);
                  for (int a = 0; a < n; ++a) everyone[a] = a;
                  return everyone;
              }()}})
            : parse_structure(structure_text, agents);

    const PressureHistory history = simulate(model, schedule);
    const double mrp = max_relative_pressure(history, model);
    std::cout << "max_rel_pressure: " << format_double(mrp) << "\n";
    std::cout << "verdict: " << (mrp <= kRatioLimit ? "feasible" : "infeasible")
              << "\n";
    double total = 0.0;
    for (const auto& coalition : structure.coalitions()) {
        const double value = coalition_value_mt(schedule, coalition);
        total += value;
        std::cout << "coalition " << coalition.to_text(agents) << ": "
                  << format_double(value) << " Mt\n";
    }
    std::cout << "total: " << format_double(total) << " Mt\n";

    if (!snapshot_dir.empty()) {
        const fs::path dir(snapshot_dir);
        std::string times = "snapshot,time_years\n";
        for (std::size_t s = 0; s < history.fields_pa.size(); ++s) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%03zu.csv", s);
            std::string grid;
            for (int j = 0; j < history.ny; ++j) {
                for (int i = 0; i < history.nx; ++i) {
                    if (i > 0) grid += ",";
                    grid += format_double(history.fields_pa[s][j * history.nx + i]);
                }
                grid += "\n";
            }
            write_text_file(dir / name, grid);
            times += std::string(name) + "," +
                     format_double(history.times_s[s] / kSecondsPerYear) + "\n";
        }
        write_text_file(dir / "snapshots.csv", times);
        std::cout << "snapshots: " << history.fields_pa.size() << " files in "
                  << dir.string() << "\n";
    }
    return kExitOk;
}

int cmd_optimize(const GlobalOptions& options, const std::string& method,
                 const std::string& structure_text, const std::string& out_dir) {
    const ScenarioConfig config = load_config(options);
    const AgentSet agents = config.agents();
    const ReservoirModel model = config.model();
    const CoalitionStructure structure = parse_structure(structure_text, agents);
    const int m = structure.coalition_count();

    const auto basis = std::make_shared<const ResponseBasis>(
        model, config.bounds.num_intervals, config.bounds.interval_years);

    ParetoFront front;
    if (method == "wsm") {
        const double increment =
            m >= 2 ? [&] {
                const auto it = config.weight_increments.find(m);
                if (it == config.weight_increments.end())
                    throw ValidationError("no weight increment for coalition count " +
                                          std::to_string(m));
                return it->second;
            }()
                   : 1.0;
        OptimizerConfig soo = config.soo;
        soo.seed = config.seed;
        front = wsm_front(basis, structure, config.bounds, weight_grid(m, increment),
                          soo);
    } else {
        MooConfig moo = config.moo;
        moo.seed = config.seed;
        front = cmoo_front(basis, structure, config.bounds, moo);
    }

    if (front.points.empty()) {
        std::cerr << "empty front: no feasible schedule found (best violation "
                  << format_double(front.best_violation) << ")\n";
        return kExitEmptyFront;
    }

    const fs::path dir(out_dir);
    const std::string key = structure.canonical_key();
    const std::string front_file = "front_" + key + "_" + method + ".csv";
    write_text_file(dir / front_file, front_to_csv(front, agents, model));

    std::string plot;
    for (const auto& point : front.points) {
        for (double value : point.values_mt) plot += format_double(value) + " ";
        plot += format_double(point.total_mt) + "\n";
    }
    const std::string plot_file = "plot_" + key + "_" + method + ".dat";
    write_text_file(dir / plot_file, plot);

    nlohmann::json manifest;
    manifest["scenario_hash"] = scenario_hash(config);
    manifest["seed"] = config.seed;
    manifest["method"] = method;
    manifest["structure"] = {{"key", key}, {"text", structure.to_text(agents)}};
    manifest["points"] = front.points.size();
    manifest["evaluations"] = front.evaluations_used;
    manifest["weights"] = front.weights.size();
    manifest["files"] = {{"front", front_file}, {"plot", plot_file}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "structure: " << structure.to_text(agents) << "\n";
    std::cout << "method: " << method << "\n";
    std::cout << "points: " << front.points.size() << "\n";
    std::cout << "evaluations: " << front.evaluations_used << "\n";
    std::cout << "best total: " << format_double(select_max_total(front).total_mt)
              << " Mt\n";
    std::cout << "out: " << dir.string() << "\n";
    return kExitOk;
}

int cmd_study(const GlobalOptions& options, const std::string& out_dir) {
    const ScenarioConfig config = load_config(options);
    const StudyPlan plan = plan_from_config(config);
    const StudyReport report = run_study(plan, config.model(), config.bounds);
    const fs::path dir =
        out_dir.empty() ? fs::path("study_" + scenario_hash(config)) : fs::path(out_dir);
    write_study_directory(report, config, dir);

    std::cout << "structures: " << report.runs.size() << "\n";
    int fronts = 0, failures = 0;
    for (const auto& run : report.runs) {
        fronts += static_cast<int>(run.fronts.size());
        failures += static_cast<int>(run.failures.size());
    }
    std::cout << "fronts: " << fronts << "\n";
    std::cout << "failures: " << failures << "\n";
    for (const auto& run : report.runs)
        for (const auto& failure : run.failures)
            std::cout << "  " << run.structure.to_text(report.agents) << " ["
                      << failure.method << "]: " << failure.error << "\n";
    if (report.grand)
        std::cout << "grand total: " << format_double(report.grand->total_mt)
                  << " Mt\n";
    std::cout << "evaluations: " << report.total_evaluations << "\n";
    std::cout << "out: " << dir.string() << "\n";
    if (!report.complete) {
        std::cerr << "study incomplete: " << failures << " failed sub-run(s)\n";
        return kExitIncomplete;
    }
    return kExitOk;
}

int cmd_validate(const GlobalOptions& options, const std::string& suite) {
    const ScenarioConfig config = load_config(options);
    const auto checks = run_validation(config, suite);
    bool all_passed = true;
    for (const auto& check : checks) {
        std::cout << format_check(check) << "\n";
        all_passed = all_passed && check.passed;
    }
    std::cout << (all_passed ? "validation passed" : "validation FAILED") << "\n";
    return all_passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coalopt: Pareto-optimal CO2 injection schedules for well-operator "
                 "coalitions"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions options;
    app.add_option("--config", options.config_path,
                   "Scenario JSON file (default: the built-in desk scenario)");
    app.add_option("--seed", options.seed, "Override the scenario seed");
    app.add_option("--threads", options.threads,
                   "Worker threads for the optimizers (results do not depend on it)");

    auto* enumerate = app.add_subcommand(
        "enumerate", "List coalition structures and their count");
    int numbered = 0;
    bool list_all = false;
    enumerate->add_option("--agents", numbered,
                          "Use this many numbered agents instead of the scenario's");
    enumerate->add_flag("--all", list_all, "List structures even when there are many");

    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Evaluate one injection schedule against the pressure limit");
    std::string schedule_path, structure_text, snapshot_dir;
    simulate_cmd->add_option("--schedule", schedule_path,
                             "Rate matrix: one line per well, one rate per interval")
        ->required();
    simulate_cmd->add_option("--structure", structure_text,
                             "Structure key or text for the value split "
                             "(default: grand coalition)");
    simulate_cmd->add_option("--snapshots", snapshot_dir,
                             "Write per-substep pressure fields into this directory");

    auto* optimize = app.add_subcommand(
        "optimize", "Compute the Pareto front for one coalition structure");
    std::string method = "wsm", opt_structure, opt_out = "front_out";
    optimize->add_option("--method", method, "Front method")
        ->check(CLI::IsMember({"wsm", "cmoo"}));
    optimize->add_option("--structure", opt_structure,
                         "Structure key (e.g. 001) or text (e.g. {W1,W2}|{W3})")
        ->required();
    optimize->add_option("--out", opt_out, "Output directory");

    auto* study = app.add_subcommand(
        "study", "Run every admitted structure and write the full report");
    std::string study_out;
    study->add_option("--out", study_out,
                      "Output directory (default: study_<scenario-hash>)");

    auto* validate = app.add_subcommand("validate", "Run the validation suites");
    std::string suite = "all";
    validate->add_option("--suite", suite, "Suite to run")
        ->check(CLI::IsMember({"theis", "superposition", "oracle-front", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    if (enumerate->parsed())
        return guarded([&] { return cmd_enumerate(options, numbered, list_all); });
    if (simulate_cmd->parsed())
        return guarded([&] {
            return cmd_simulate(options, schedule_path, structure_text, snapshot_dir);
        });
    if (optimize->parsed())
        return guarded(
            [&] { return cmd_optimize(options, method, opt_structure, opt_out); });
    if (study->parsed()) return guarded([&] { return cmd_study(options, study_out); });
    if (validate->parsed()) return guarded([&] { return cmd_validate(options, suite); });
    return kExitInvalid;  // unreachable: require_subcommand(1)
}
