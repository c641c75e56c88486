#include "coalopt/config.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "coalopt/errors.hpp"
#include "coalopt/pareto.hpp"

namespace coalopt {

namespace {

using nlohmann::json;

const json& member(const json& parent, const char* key, const std::string& context) {
    if (!parent.is_object())
        throw ValidationError("config: '" + context + "' must be an object");
    const auto it = parent.find(key);
    if (it == parent.end())
        throw ValidationError("config: missing field '" + context + "." + key + "'");
    return *it;
}

template <typename T>
T field(const json& parent, const char* key, const std::string& context) {
    try {
        return member(parent, key, context).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("config: field '" + context + "." + key +
                              "' has the wrong type");
    }
}

bool is_known_method(const std::string& method) {
    return method == "wsm" || method == "cmoo";
}

void check_criterion(const std::string& text, const AgentSet& agents) {
    if (text == "max-total") return;
    const std::string prefix = "max-agent:";
    if (text.rfind(prefix, 0) == 0) {
        agents.index_of(text.substr(prefix.size()));
        return;
    }
    throw ValidationError("config: unknown criterion '" + text +
                          "' (use max-total or max-agent:<label>)");
}

}  // namespace

void ScenarioConfig::validate() const {
    if (spec_version != 1)
        throw ValidationError("config: unsupported spec_version " +
                              std::to_string(spec_version));
    const AgentSet agent_set = agents();
    if (static_cast<int>(wells.size()) != agent_set.count())
        throw ValidationError("config: well count must equal agent count");
    model().validate();
    bounds.validate();
    soo.validate();
    moo.validate();
    for (const auto& [m, increment] : weight_increments) {
        if (m < 2 || m > agent_set.count())
            throw ValidationError("config: weight increment given for coalition count " +
                                  std::to_string(m) +
                                  ", which cannot arise for these agents");
        weight_grid(m, increment);  // validates the increment
    }
    if (methods.empty()) throw ValidationError("config: at least one method required");
    for (const auto& method : methods) {
        if (!is_known_method(method))
            throw ValidationError("config: unknown method '" + method + "'");
        if (std::count(methods.begin(), methods.end(), method) != 1)
            throw ValidationError("config: method '" + method + "' listed twice");
    }
    if (criteria.empty()) throw ValidationError("config: at least one criterion required");
    for (const auto& criterion : criteria) check_criterion(criterion, agent_set);
    if (max_structures < 1)
        throw ValidationError("config: max_structures must be at least 1");
    filter(agent_set);  // validates the coalition texts
}

AgentSet ScenarioConfig::agents() const { return AgentSet(agent_labels); }

ReservoirModel ScenarioConfig::model() const {
    ReservoirModel m = ReservoirModel::uniform(
        nx, ny, dx_m, dy_m, thickness_m, permeability_md * kMilliDarcyM2, porosity,
        viscosity_pas, total_compressibility_per_pa, co2_density_kg_m3,
        initial_pressure_pa, overburden_pressure_pa);
    m.substeps_per_interval = substeps_per_interval;
    const AgentSet agent_set = agents();
    m.wells.reserve(wells.size());
    for (const auto& well : wells)
        m.wells.push_back({agent_set.index_of(well.agent), well.i, well.j});
    // Schedules index wells by agent, so keep the two orders identical.
    std::sort(m.wells.begin(), m.wells.end(),
              [](const WellSpec& a, const WellSpec& b) {
                  return a.agent_index < b.agent_index;
              });
    return m;
}

StructureFilter ScenarioConfig::filter(const AgentSet& agent_set) const {
    StructureFilter f;
    for (const auto& text : structure_allow)
        f.allow.push_back(parse_coalition(text, agent_set));
    for (const auto& text : structure_deny)
        f.deny.push_back(parse_coalition(text, agent_set));
    return f;
}

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: not valid JSON: ") + e.what());
    }
    ScenarioConfig c;
    c.spec_version = field<int>(root, "spec_version", "");

    const json& reservoir = member(root, "reservoir", "");
    c.nx = field<int>(reservoir, "nx", "reservoir");
    c.ny = field<int>(reservoir, "ny", "reservoir");
    c.dx_m = field<double>(reservoir, "dx_m", "reservoir");
    c.dy_m = field<double>(reservoir, "dy_m", "reservoir");
    c.thickness_m = field<double>(reservoir, "thickness_m", "reservoir");
    c.permeability_md = field<double>(reservoir, "permeability_md", "reservoir");
    c.porosity = field<double>(reservoir, "porosity", "reservoir");
    c.viscosity_pas = field<double>(reservoir, "viscosity_pas", "reservoir");
    c.total_compressibility_per_pa =
        field<double>(reservoir, "total_compressibility_per_pa", "reservoir");
    c.co2_density_kg_m3 = field<double>(reservoir, "co2_density_kg_m3", "reservoir");
    c.initial_pressure_pa = field<double>(reservoir, "initial_pressure_pa", "reservoir");
    c.overburden_pressure_pa =
        field<double>(reservoir, "overburden_pressure_pa", "reservoir");
    c.substeps_per_interval = field<int>(reservoir, "substeps_per_interval", "reservoir");
    const json& wells = member(reservoir, "wells", "reservoir");
    if (!wells.is_array() || wells.empty())
        throw ValidationError("config: 'reservoir.wells' must be a non-empty array");
    for (const json& well : wells) {
        WellConfig w;
        w.agent = field<std::string>(well, "agent", "reservoir.wells[]");
        w.i = field<int>(well, "i", "reservoir.wells[]");
        w.j = field<int>(well, "j", "reservoir.wells[]");
        c.wells.push_back(std::move(w));
    }

    const json& schedule = member(root, "schedule", "");
    c.bounds.num_intervals = field<int>(schedule, "num_intervals", "schedule");
    c.bounds.interval_years = field<double>(schedule, "interval_years", "schedule");
    c.bounds.rate_min_mt_yr = field<double>(schedule, "rate_min_mt_yr", "schedule");
    c.bounds.rate_max_mt_yr = field<double>(schedule, "rate_max_mt_yr", "schedule");

    c.agent_labels = field<std::vector<std::string>>(root, "agents", "");

    const json& optimizer = member(root, "optimizer", "");
    const json& soo = member(optimizer, "soo", "optimizer");
    c.soo.population = field<int>(soo, "population", "optimizer.soo");
    c.soo.max_evaluations =
        field<std::int64_t>(soo, "max_evaluations", "optimizer.soo");
    c.soo.phi = field<double>(soo, "phi", "optimizer.soo");
    c.soo.threads = field<int>(soo, "threads", "optimizer.soo");
    const json& moo = member(optimizer, "moo", "optimizer");
    c.moo.population = field<int>(moo, "population", "optimizer.moo");
    c.moo.max_evaluations =
        field<std::int64_t>(moo, "max_evaluations", "optimizer.moo");
    c.moo.epsilon_decay = field<double>(moo, "epsilon_decay", "optimizer.moo");
    c.moo.crossover_prob = field<double>(moo, "crossover_prob", "optimizer.moo");
    c.moo.crossover_index = field<double>(moo, "crossover_index", "optimizer.moo");
    c.moo.mutation_index = field<double>(moo, "mutation_index", "optimizer.moo");
    c.moo.threads = field<int>(moo, "threads", "optimizer.moo");
    const json& increments = member(optimizer, "weight_increments", "optimizer");
    if (!increments.is_object())
        throw ValidationError("config: 'optimizer.weight_increments' must be an object");
    for (const auto& [key, value] : increments.items()) {
        int m = 0;
        try {
            std::size_t used = 0;
            m = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ValidationError("config: weight_increments key '" + key +
                                  "' is not a coalition count");
        }
        if (!value.is_number())
            throw ValidationError("config: weight_increments['" + key +
                                  "'] must be a number");
        c.weight_increments[m] = value.get<double>();
    }

    const json& study = member(root, "study", "");
    c.seed = field<std::uint64_t>(study, "seed", "study");
    c.methods = field<std::vector<std::string>>(study, "methods", "study");
    c.criteria = field<std::vector<std::string>>(study, "criteria", "study");
    c.max_structures = field<int>(study, "max_structures", "study");
    c.structure_allow =
        field<std::vector<std::string>>(study, "structure_allow", "study");
    c.structure_deny =
        field<std::vector<std::string>>(study, "structure_deny", "study");

    c.validate();
    return c;
}

std::string serialize_config(const ScenarioConfig& c) {
    json root;
    root["spec_version"] = c.spec_version;

    json reservoir;
    reservoir["nx"] = c.nx;
    reservoir["ny"] = c.ny;
    reservoir["dx_m"] = c.dx_m;
    reservoir["dy_m"] = c.dy_m;
    reservoir["thickness_m"] = c.thickness_m;
    reservoir["permeability_md"] = c.permeability_md;
    reservoir["porosity"] = c.porosity;
    reservoir["viscosity_pas"] = c.viscosity_pas;
    reservoir["total_compressibility_per_pa"] = c.total_compressibility_per_pa;
    reservoir["co2_density_kg_m3"] = c.co2_density_kg_m3;
    reservoir["initial_pressure_pa"] = c.initial_pressure_pa;
    reservoir["overburden_pressure_pa"] = c.overburden_pressure_pa;
    reservoir["substeps_per_interval"] = c.substeps_per_interval;
    json wells = json::array();
    for (const auto& well : c.wells)
        wells.push_back({{"agent", well.agent}, {"i", well.i}, {"j", well.j}});
    reservoir["wells"] = std::move(wells);
    root["reservoir"] = std::move(reservoir);

    root["schedule"] = {{"num_intervals", c.bounds.num_intervals},
                        {"interval_years", c.bounds.interval_years},
                        {"rate_min_mt_yr", c.bounds.rate_min_mt_yr},
                        {"rate_max_mt_yr", c.bounds.rate_max_mt_yr}};

    root["agents"] = c.agent_labels;

    json increments;
    for (const auto& [m, increment] : c.weight_increments)
        increments[std::to_string(m)] = increment;
    root["optimizer"] = {
        {"soo",
         {{"population", c.soo.population},
          {"max_evaluations", c.soo.max_evaluations},
          {"phi", c.soo.phi},
          {"threads", c.soo.threads}}},
        {"moo",
         {{"population", c.moo.population},
          {"max_evaluations", c.moo.max_evaluations},
          {"epsilon_decay", c.moo.epsilon_decay},
          {"crossover_prob", c.moo.crossover_prob},
          {"crossover_index", c.moo.crossover_index},
          {"mutation_index", c.moo.mutation_index},
          {"threads", c.moo.threads}}},
        {"weight_increments", std::move(increments)}};

    root["study"] = {{"seed", c.seed},
                     {"methods", c.methods},
                     {"criteria", c.criteria},
                     {"max_structures", c.max_structures},
                     {"structure_allow", c.structure_allow},
                     {"structure_deny", c.structure_deny}};

    return root.dump(2) + "\n";
}

std::string scenario_hash(const ScenarioConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char byte : text) {
        hash ^= byte;
        hash *= 0x100000001B3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(hash));
    return std::string(buffer);
}

ScenarioConfig default_desk_config() {
    ScenarioConfig c;
    c.nx = 50;
    c.ny = 50;
    c.dx_m = 1000.0;
    c.dy_m = 1000.0;
    c.thickness_m = 100.0;
    c.permeability_md = 200.0;
    c.porosity = 0.2;
    c.viscosity_pas = 6.0e-4;
    c.total_compressibility_per_pa = 1.0e-9;
    c.co2_density_kg_m3 = 700.0;
    c.initial_pressure_pa = 9.81e6;
    c.overburden_pressure_pa = 1.308e7;
    c.substeps_per_interval = 12;
    c.wells = {{"W1", 12, 12}, {"W2", 25, 30}, {"W3", 38, 12}};
    c.bounds.rate_min_mt_yr = 0.24;
    c.bounds.rate_max_mt_yr = 7.0;
    c.bounds.num_intervals = 5;
    c.bounds.interval_years = 3.0;
    c.agent_labels = {"W1", "W2", "W3"};
    c.soo.population = 50;
    c.soo.max_evaluations = 5000;
    c.soo.phi = 0.1;
    c.soo.threads = 1;
    c.moo.population = 50;
    c.moo.max_evaluations = 5000;
    c.moo.epsilon_decay = 2.0;
    c.moo.crossover_prob = 1.0;
    c.moo.crossover_index = 20.0;
    c.moo.mutation_index = 20.0;
    c.moo.threads = 1;
    c.weight_increments = {{2, 0.1}, {3, 0.2}};
    c.seed = 2024;
    c.methods = {"wsm", "cmoo"};
    c.criteria = {"max-total", "max-agent:W1"};
    c.max_structures = 64;
    return c;
}

}  // namespace coalopt
