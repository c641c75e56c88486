#include "coalopt/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "coalopt/errors.hpp"
#include "coalopt/io.hpp"
#include "coalopt/objective.hpp"
#include "coalopt/pareto.hpp"
#include "coalopt/reservoir.hpp"
#include "coalopt/rng.hpp"

namespace coalopt {

namespace {

// Fixed 50x50 km benchmark grid carrying the scenario's rock and fluid
// properties. The suites probe physics, not geometry, so the grid stays
// the same whatever the scenario's own grid looks like.
ReservoirModel benchmark_model(const ScenarioConfig& config,
                               std::vector<WellSpec> wells, int substeps) {
    ReservoirModel m = ReservoirModel::uniform(
        50, 50, 1000.0, 1000.0, config.thickness_m,
        config.permeability_md * kMilliDarcyM2, config.porosity,
        config.viscosity_pas, config.total_compressibility_per_pa,
        config.co2_density_kg_m3, config.initial_pressure_pa,
        config.overburden_pressure_pa);
    m.wells = std::move(wells);
    m.substeps_per_interval = substeps;
    return m;
}

double max_rise(const PressureHistory& h, double initial_pa) {
    double rise = 0.0;
    for (const auto& field : h.fields_pa)
        for (double p : field) rise = std::max(rise, std::abs(p - initial_pa));
    return rise;
}

double max_gap(const PressureHistory& a, const PressureHistory& b) {
    double gap = 0.0;
    for (std::size_t s = 0; s < a.fields_pa.size(); ++s)
        for (std::size_t c = 0; c < a.fields_pa[s].size(); ++c)
            gap = std::max(gap, std::abs(a.fields_pa[s][c] - b.fields_pa[s][c]));
    return gap;
}

}  // namespace

std::vector<ValidationCheck> validate_theis(const ScenarioConfig& config) {
    const ReservoirModel model = benchmark_model(config, {{0, 25, 25}}, 64);
    const InjectionSchedule schedule = InjectionSchedule::constant(1, 1, 1.0, 1.0);
    const PressureHistory history = simulate(model, schedule);

    const int obs = model.cell_index(35, 25);  // 10 cells before boundary influence
    const double fd_rise =
        history.fields_pa.back()[obs] - config.initial_pressure_pa;
    const double q = 1.0 * kKgPerMegatonne /
                     (kSecondsPerYear * config.co2_density_kg_m3);
    const double analytic = theis_pressure_rise(
        q, config.permeability_md * kMilliDarcyM2, config.thickness_m,
        config.viscosity_pas, config.porosity, config.total_compressibility_per_pa,
        10000.0, kSecondsPerYear);
    const double rel_error = std::abs(fd_rise - analytic) / analytic;

    ValidationCheck check;
    check.suite = "theis";
    check.name = "fd-vs-theis-10km";
    check.measured = rel_error;
    check.limit = 0.05;
    check.passed = rel_error <= check.limit;
    check.detail = "fd rise " + format_double(fd_rise) + " Pa vs analytic " +
                   format_double(analytic) + " Pa, 10 km from the well after 1 year";
    return {check};
}

std::vector<ValidationCheck> validate_superposition(const ScenarioConfig& config) {
    const ReservoirModel both =
        benchmark_model(config, {{0, 15, 25}, {1, 35, 25}}, 12);
    const ReservoirModel only_a = benchmark_model(config, {{0, 15, 25}}, 12);
    const ReservoirModel only_b = benchmark_model(config, {{0, 35, 25}}, 12);

    InjectionSchedule two = InjectionSchedule::constant(2, 1, 3.0, 0.0);
    two.rate(0, 0) = 2.0;
    two.rate(1, 0) = 3.0;
    const PressureHistory h_both = simulate(both, two);
    const PressureHistory h_a =
        simulate(only_a, InjectionSchedule::constant(1, 1, 3.0, 2.0));
    PressureHistory summed = h_a;
    const PressureHistory h_b =
        simulate(only_b, InjectionSchedule::constant(1, 1, 3.0, 3.0));
    for (std::size_t s = 0; s < summed.fields_pa.size(); ++s)
        for (std::size_t c = 0; c < summed.fields_pa[s].size(); ++c)
            summed.fields_pa[s][c] +=
                h_b.fields_pa[s][c] - config.initial_pressure_pa;

    const double rise = max_rise(h_both, config.initial_pressure_pa);
    const double gap = max_gap(summed, h_both) / (rise > 0 ? rise : 1.0);

    ValidationCheck check;
    check.suite = "superposition";
    check.name = "two-well-linearity";
    check.measured = gap;
    check.limit = 1e-8;
    check.passed = gap <= check.limit;
    check.detail = "two-well field vs summed single-well fields, relative to the "
                   "peak rise";
    return {check};
}

std::vector<ValidationCheck> validate_oracle_front(const ScenarioConfig& config) {
    if (config.wells.size() < 2)
        throw ValidationError("oracle-front suite needs at least two wells");
    ReservoirModel model = config.model();
    model.wells.resize(2);  // the reduced problem keeps the first two wells

    ScenarioBounds bounds = config.bounds;
    bounds.num_intervals = 1;

    const auto basis = std::make_shared<const ResponseBasis>(model, 1,
                                                             bounds.interval_years);
    const CoalitionStructure structure(2, {Coalition{{0}}, Coalition{{1}}});

    // Exhaustive 21x21 lattice, non-dominated feasible subset.
    const int kn = 21;
    const double step =
        (bounds.rate_max_mt_yr - bounds.rate_min_mt_yr) / (kn - 1);
    Evaluator evaluator(basis);
    std::vector<std::vector<double>> feasible_values;
    for (int i = 0; i < kn; ++i) {
        for (int j = 0; j < kn; ++j) {
            InjectionSchedule s{2, 1, bounds.interval_years,
                                {bounds.rate_min_mt_yr + i * step,
                                 bounds.rate_min_mt_yr + j * step}};
            const ObjectiveReport report = evaluator.evaluate(s, structure);
            if (report.violation == 0.0)
                feasible_values.push_back(report.coalition_values_mt);
        }
    }
    std::vector<std::vector<double>> lattice_front;
    for (std::size_t idx : nondominated_indices(feasible_values))
        lattice_front.push_back(feasible_values[idx]);

    OptimizerConfig soo;
    soo.population = 20;
    soo.max_evaluations = 1000;
    soo.seed = derive_stream(config.seed, 31, 0);
    soo.threads = config.soo.threads;
    const ParetoFront front =
        wsm_front(basis, structure, bounds, weight_grid(2, 0.1), soo);

    // Worst distance, in lattice cells, from a lattice-front point to the
    // nearest swarm point that matches or dominates it.
    const double cell_mt = step * bounds.interval_years;
    double worst_cells = lattice_front.empty()
                             ? std::numeric_limits<double>::infinity()
                             : 0.0;
    for (const auto& lattice_point : lattice_front) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& point : front.points) {
            double shortfall = 0.0;
            for (std::size_t j = 0; j < lattice_point.size(); ++j)
                shortfall = std::max(shortfall,
                                     lattice_point[j] - point.values_mt[j]);
            nearest = std::min(nearest, std::max(0.0, shortfall) / cell_mt);
        }
        worst_cells = std::max(worst_cells, nearest);
    }

    ValidationCheck coverage;
    coverage.suite = "oracle-front";
    coverage.name = "lattice-front-coverage";
    coverage.measured = worst_cells;
    coverage.limit = 1.0;
    coverage.passed = worst_cells <= coverage.limit;
    coverage.detail = std::to_string(lattice_front.size()) +
                      " lattice-front points vs " +
                      std::to_string(front.points.size()) +
                      " swarm points, worst shortfall in lattice cells";

    double worst_mrp = 0.0;
    for (const auto& point : front.points)
        worst_mrp = std::max(worst_mrp, point.max_rel_pressure);
    ValidationCheck feasible;
    feasible.suite = "oracle-front";
    feasible.name = "front-feasibility";
    feasible.measured = worst_mrp;
    feasible.limit = 0.9 + 1e-9;
    feasible.passed = !front.points.empty() && worst_mrp <= feasible.limit;
    feasible.detail = "worst pressure ratio across the swarm front";

    return {coverage, feasible};
}

std::vector<ValidationCheck> run_validation(const ScenarioConfig& config,
                                            const std::string& suite) {
    config.validate();
    if (suite == "theis") return validate_theis(config);
    if (suite == "superposition") return validate_superposition(config);
    if (suite == "oracle-front") return validate_oracle_front(config);
    if (suite == "all") {
        std::vector<ValidationCheck> checks = validate_theis(config);
        for (auto& c : validate_superposition(config)) checks.push_back(std::move(c));
        for (auto& c : validate_oracle_front(config)) checks.push_back(std::move(c));
        return checks;
    }
    throw ValidationError("unknown validation suite '" + suite +
                          "' (theis, superposition, oracle-front, all)");
}

std::string format_check(const ValidationCheck& check) {
    std::string line = check.passed ? "[PASS] " : "[FAIL] ";
    line += check.suite + "/" + check.name + ": " + format_double(check.measured) +
            " (limit " + format_double(check.limit) + ") - " + check.detail;
    return line;
}

}  // namespace coalopt
