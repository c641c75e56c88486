#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coalopt/cmoo.hpp"
#include "coalopt/coalition.hpp"
#include "coalopt/cso.hpp"
#include "coalopt/objective.hpp"
#include "coalopt/reservoir.hpp"

namespace coalopt {

/// One injection well tied to an agent label.
struct WellConfig {
    std::string agent;
    int i = 0;
    int j = 0;
};

/// Complete description of a study scenario: uniform reservoir, schedule
/// shape and rate box, agents, optimizer settings, and the study plan
/// (methods, selection criteria, structure filters, seed). Parsed from and
/// serialized to a versioned JSON document.
struct ScenarioConfig {
    int spec_version = 1;

    // reservoir block (uniform properties)
    int nx = 0;
    int ny = 0;
    double dx_m = 0.0;
    double dy_m = 0.0;
    double thickness_m = 0.0;
    double permeability_md = 0.0;
    double porosity = 0.0;
    double viscosity_pas = 0.0;
    double total_compressibility_per_pa = 0.0;
    double co2_density_kg_m3 = 0.0;
    double initial_pressure_pa = 0.0;
    double overburden_pressure_pa = 0.0;
    int substeps_per_interval = 1;
    std::vector<WellConfig> wells;

    // schedule block
    ScenarioBounds bounds;

    // agents block
    std::vector<std::string> agent_labels;

    // optimizer block (seeds are derived from the study seed at run time)
    OptimizerConfig soo;
    MooConfig moo;
    std::map<int, double> weight_increments;  // by coalition count

    // study block
    std::uint64_t seed = 0;
    std::vector<std::string> methods;   // "wsm" and/or "cmoo"
    std::vector<std::string> criteria;  // "max-total", "max-agent:<label>"
    int max_structures = 64;
    std::vector<std::string> structure_allow;  // coalition texts
    std::vector<std::string> structure_deny;

    /// Cross-field validation: all physical, optimizer, and study
    /// invariants. Throws ValidationError with the offending field.
    void validate() const;

    AgentSet agents() const;
    ReservoirModel model() const;
    StructureFilter filter(const AgentSet& agents) const;
};

/// Parses a JSON document; throws ValidationError naming the missing or
/// ill-typed field. The result is already validated.
ScenarioConfig parse_config(const std::string& json_text);

/// Canonical JSON serialization (sorted keys, two-space indent, trailing
/// newline). parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ScenarioConfig& config);

/// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& config);

/// Built-in desk-scale scenario: three operators on a 50 km homogeneous
/// aquifer, 15-year horizon in five 3-year intervals, rates 0.24..7 Mt/yr,
/// and the optimizer budgets used throughout the test suite.
ScenarioConfig default_desk_config();

}  // namespace coalopt
