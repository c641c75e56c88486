#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coalopt/coalition.hpp"
#include "coalopt/config.hpp"
#include "coalopt/pareto.hpp"

namespace coalopt {

/// One selection rule applied to every front of a study.
struct Criterion {
    enum class Kind { MaxTotal, MaxAgent };

    Kind kind = Kind::MaxTotal;
    int agent_index = -1;  // MaxAgent only
    std::string text;      // canonical form, e.g. "max-total", "max-agent:W2"

    bool operator==(const Criterion& other) const {
        return kind == other.kind && agent_index == other.agent_index;
    }
};

/// Parses "max-total" or "max-agent:<label>"; throws ValidationError on
/// anything else or an unknown label.
Criterion parse_criterion(const std::string& text, const AgentSet& agents);

/// Everything run_study needs besides the physics: which structures to
/// solve, with which methods and budgets, and how to pick reported points.
struct StudyPlan {
    AgentSet agents;
    std::vector<CoalitionStructure> structures;
    std::vector<std::string> methods;  // subset of {"wsm", "cmoo"}
    OptimizerConfig soo;
    MooConfig moo;
    std::map<int, double> weight_increments;  // by coalition count
    std::vector<Criterion> criteria;
    std::uint64_t seed = 0;
    int max_structures = 64;

    /// At least one structure, method, and criterion; consistent agent
    /// counts; a weight increment for every multi-coalition size that the
    /// weighted-sum method will encounter.
    void validate() const;
};

/// Enumerates the structures admitted by the config's filters and bundles
/// them with its optimizer settings, criteria, and seed.
StudyPlan plan_from_config(const ScenarioConfig& config);

/// A method that produced no usable front for one structure, with the
/// simulations it spent before giving up (0 when it aborted early).
struct MethodFailure {
    std::string method;
    std::string error;
    std::int64_t evaluations = 0;
};

/// All fronts computed for one coalition structure, keyed by method tag
/// ("soo" for the grand structure, otherwise "wsm" / "cmoo").
struct StructureRun {
    CoalitionStructure structure;
    std::vector<std::pair<std::string, ParetoFront>> fronts;
    std::vector<MethodFailure> failures;
};

/// One line of the cross-structure comparison: the value of one coalition
/// at the point a criterion selected from one front.
struct ComparisonRow {
    std::string criterion;
    std::string method;
    std::string structure_text;
    std::string coalition_text;
    double value_mt = 0.0;
    double total_mt = 0.0;
    double max_rel_pressure = 0.0;
};

/// Pressure-simulation count of one optimization run.
struct LedgerRow {
    std::string structure_key;
    std::string structure_text;
    std::string method;
    std::int64_t evaluations = 0;
};

/// Aggregated result of a full study. `grand` is the grand-coalition
/// optimum (present unless the scenario admits no feasible schedule);
/// `runs` follow the plan's structure order. `complete` is false when any
/// sub-run failed or produced an empty front.
struct StudyReport {
    AgentSet agents;
    std::optional<FrontPoint> grand;
    std::int64_t grand_evaluations = 0;
    std::vector<StructureRun> runs;
    std::vector<ComparisonRow> table;
    std::vector<LedgerRow> ledger;
    std::int64_t total_evaluations = 0;
    std::vector<std::string> errors;  // study-level problems
    bool complete = true;
};

/// Runs the whole study: solves the grand coalition once by constrained
/// single-objective search, then computes a front per (multi-coalition
/// structure, method), applies every criterion to every front, and
/// assembles the comparison table and budget ledger. Sub-run errors and
/// empty fronts are recorded per structure and the study continues.
/// Deterministic for a fixed plan. Throws CapacityError when the plan
/// holds more structures than `max_structures` before any simulation.
StudyReport run_study(const StudyPlan& plan, const ReservoirModel& model,
                      const ScenarioBounds& bounds);

/// Result of checking the grand-coalition optimum against one front.
struct GrandCheck {
    bool ok = false;
    double gap_mt = 0.0;
};

/// Checks that the grand-coalition schedule's decomposition into the
/// front's coalition values lies on the front: no front point may dominate
/// it by more than the tolerance in every component, and some front point
/// must match it up to the tolerance in every component. `gap_mt` is the
/// larger of the two margins (0 when the decomposition sits exactly on the
/// front). Throws ValidationError on an empty front or mismatched sizes.
GrandCheck verify_grand_on_front(const ParetoFront& front,
                                 const InjectionSchedule& grand_schedule,
                                 double tolerance_mt);

/// Writes the study artifacts into `dir` (created if needed):
/// scenario.json, manifest.json, front_<key>_<method>.csv per front,
/// comparison_table.csv, and budget_ledger.csv. Byte-deterministic for a
/// fixed report and config.
void write_study_directory(const StudyReport& report, const ScenarioConfig& config,
                           const std::filesystem::path& dir);

}  // namespace coalopt
