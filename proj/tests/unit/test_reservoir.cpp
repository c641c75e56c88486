#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "coalopt/errors.hpp"
#include "coalopt/reservoir.hpp"
#include "coalopt/rng.hpp"
#include "test_models.hpp"

using namespace coalopt;

namespace {

double relative_field_gap(const PressureHistory& a, const PressureHistory& b,
                          const std::vector<double>& reference_initial) {
    REQUIRE(a.fields_pa.size() == b.fields_pa.size());
    double max_diff = 0.0;
    double max_rise = 0.0;
    for (std::size_t s = 0; s < a.fields_pa.size(); ++s) {
        for (std::size_t c = 0; c < a.fields_pa[s].size(); ++c) {
            max_diff = std::max(max_diff,
                                std::abs(a.fields_pa[s][c] - b.fields_pa[s][c]));
            max_rise = std::max(max_rise,
                                std::abs(b.fields_pa[s][c] - reference_initial[c]));
        }
    }
    return max_rise > 0 ? max_diff / max_rise : max_diff;
}

}  // namespace

TEST_SUITE("reservoir") {

TEST_CASE("zero rates leave every snapshot exactly at the initial state") {
    auto model = testmodels::three_well_aquifer();
    auto schedule = InjectionSchedule::constant(3, 5, 3.0, 0.0);
    auto history = simulate(model, schedule);
    REQUIRE(history.fields_pa.size() == 61);
    for (const auto& field : history.fields_pa)
        CHECK(field == model.initial_pressure_pa);
    CHECK(max_relative_pressure(history, model) == 0.75);
}

// ============================================================================
// Analytic benchmark: a single constant-rate well in a large grid behaves
// like a line source; the finite-difference pressure rise 10 km away after
// one year must stay within 5% of the Theis solution.
// ============================================================================
TEST_CASE("single-well pressure rise matches the Theis solution within 5%") {
    auto model = testmodels::uniform_aquifer(50, 50, {{0, 25, 25}},
                                             /*dx=*/1000.0, /*substeps=*/64);
    auto schedule = InjectionSchedule::constant(1, 1, 1.0, 1.0);
    auto history = simulate(model, schedule);

    const int obs = model.cell_index(35, 25);  // 10 cells = 10 km from the well
    const double fd_rise = history.fields_pa.back()[obs] - 9.81e6;
    const double q = 1.0 * kKgPerMegatonne / (kSecondsPerYear * 700.0);
    const double analytic = theis_pressure_rise(q, 1.9738466e-13, 100.0, 6.0e-4,
                                                0.2, 1.0e-9, 10000.0,
                                                kSecondsPerYear);
    const double rel_error = std::abs(fd_rise - analytic) / analytic;
    MESSAGE("theis rise ", analytic, " Pa, fd rise ", fd_rise, " Pa, rel error ",
            rel_error);
    CHECK(rel_error <= 0.05);
}

TEST_CASE("refining the grid and time step drives the Theis error down") {
    std::vector<double> errors;
    for (int level = 0; level < 3; ++level) {
        const int scale = 1 << level;
        const int nx = 50 * scale;
        const int center = nx / 2;
        auto model = testmodels::uniform_aquifer(
            nx, nx, {{0, center, center}}, 1000.0 / scale, 16 * scale);
        auto schedule = InjectionSchedule::constant(1, 1, 1.0, 1.0);
        auto history = simulate(model, schedule);
        const int obs = model.cell_index(center + 10 * scale, center);
        const double fd_rise = history.fields_pa.back()[obs] - 9.81e6;
        const double q = 1.0 * kKgPerMegatonne / (kSecondsPerYear * 700.0);
        const double analytic = theis_pressure_rise(q, 1.9738466e-13, 100.0, 6.0e-4,
                                                    0.2, 1.0e-9, 10000.0,
                                                    kSecondsPerYear);
        errors.push_back(std::abs(fd_rise - analytic) / analytic);
    }
    MESSAGE("refinement errors ", errors[0], " ", errors[1], " ", errors[2]);
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] < errors[1]);
    CHECK(errors[2] > 0.0);
}

// ============================================================================
// Linearity: the two-well solution equals the sum of single-well rises on
// top of the shared initial state.
// ============================================================================
TEST_CASE("two-well field equals superposed single-well fields within 1e-8") {
    auto both = testmodels::uniform_aquifer(50, 50, {{0, 15, 25}, {1, 35, 25}});
    auto only_a = testmodels::uniform_aquifer(50, 50, {{0, 15, 25}});
    auto only_b = testmodels::uniform_aquifer(50, 50, {{0, 35, 25}});

    InjectionSchedule two = InjectionSchedule::constant(2, 1, 3.0, 0.0);
    two.rate(0, 0) = 2.0;
    two.rate(1, 0) = 3.0;
    auto h_both = simulate(both, two);
    auto h_a = simulate(only_a, InjectionSchedule::constant(1, 1, 3.0, 2.0));
    auto h_b = simulate(only_b, InjectionSchedule::constant(1, 1, 3.0, 3.0));

    PressureHistory summed = h_a;
    for (std::size_t s = 0; s < summed.fields_pa.size(); ++s)
        for (std::size_t c = 0; c < summed.fields_pa[s].size(); ++c)
            summed.fields_pa[s][c] += h_b.fields_pa[s][c] - 9.81e6;

    const double gap = relative_field_gap(summed, h_both, both.initial_pressure_pa);
    MESSAGE("superposition relative gap ", gap);
    CHECK(gap <= 1e-8);
}

TEST_CASE("injected volume balances stored compressibility volume to 1e-6") {
    auto model = testmodels::three_well_aquifer();
    InjectionSchedule schedule = InjectionSchedule::constant(3, 5, 3.0, 0.5);
    schedule.rate(1, 2) = 1.5;
    schedule.rate(2, 4) = 0.24;
    auto history = simulate(model, schedule);

    const double cell_volume = model.dx_m * model.dy_m * model.thickness_m;
    const double dt =
        3.0 * kSecondsPerYear / model.substeps_per_interval;
    for (std::size_t s = 1; s < history.fields_pa.size(); ++s) {
        double stored = 0.0;
        for (int c = 0; c < model.cell_count(); ++c)
            stored += model.porosity[c] * model.total_compressibility_per_pa *
                      cell_volume * (history.fields_pa[s][c] - 9.81e6);
        double injected = 0.0;
        for (std::size_t sub = 1; sub <= s; ++sub) {
            const int interval = (static_cast<int>(sub) - 1) / model.substeps_per_interval;
            for (int w = 0; w < 3; ++w)
                injected += schedule.rate(w, interval) * kKgPerMegatonne /
                            (kSecondsPerYear * 700.0) * dt;
        }
        CHECK(std::abs(stored - injected) <= 1e-6 * injected);
    }
}

TEST_CASE("raising any rate never lowers the maximum relative pressure") {
    auto model = testmodels::three_well_aquifer();
    SplitMix64 rng(derive_stream(20250801, 7));
    for (int trial = 0; trial < 5; ++trial) {
        InjectionSchedule lo = InjectionSchedule::constant(3, 5, 3.0, 0.0);
        InjectionSchedule hi = lo;
        for (std::size_t r = 0; r < lo.rates_mt_yr.size(); ++r) {
            lo.rates_mt_yr[r] = rng.uniform_in(0.0, 2.0);
            hi.rates_mt_yr[r] = lo.rates_mt_yr[r] + rng.uniform_in(0.0, 1.0);
        }
        const double mrp_lo = max_relative_pressure(simulate(model, lo), model);
        const double mrp_hi = max_relative_pressure(simulate(model, hi), model);
        CHECK(mrp_hi >= mrp_lo - 1e-12);
    }
}

TEST_CASE("simulation output is bitwise deterministic") {
    auto model = testmodels::three_well_aquifer();
    InjectionSchedule schedule = InjectionSchedule::constant(3, 5, 3.0, 0.7);
    schedule.rate(0, 1) = 1.9;
    auto a = simulate(model, schedule);
    auto b = simulate(model, schedule);
    REQUIRE(a.fields_pa.size() == b.fields_pa.size());
    for (std::size_t s = 0; s < a.fields_pa.size(); ++s)
        CHECK(a.fields_pa[s] == b.fields_pa[s]);
}

TEST_CASE("max relative pressure grows with the injection rate") {
    auto model = testmodels::three_well_aquifer();
    const double mrp_low = max_relative_pressure(
        simulate(model, InjectionSchedule::constant(3, 5, 3.0, 0.24)), model);
    const double mrp_high = max_relative_pressure(
        simulate(model, InjectionSchedule::constant(3, 5, 3.0, 7.0)), model);
    CHECK(mrp_low > 0.75);
    CHECK(mrp_high > mrp_low);
    CHECK(mrp_high > kRatioLimit);
    MESSAGE("mrp at 0.24 Mt/yr ", mrp_low, ", at 7 Mt/yr ", mrp_high);
}

TEST_CASE("response basis reproduces direct simulation") {
    auto model = testmodels::three_well_aquifer();
    ResponseBasis basis(model, 5, 3.0);

    SplitMix64 rng(derive_stream(20250801, 11));
    for (int trial = 0; trial < 3; ++trial) {
        InjectionSchedule schedule = InjectionSchedule::constant(3, 5, 3.0, 0.0);
        for (auto& r : schedule.rates_mt_yr) r = rng.uniform_in(0.24, 2.5);

        auto direct = simulate(model, schedule);
        auto fast = basis.history(schedule);
        const double gap = relative_field_gap(fast, direct, model.initial_pressure_pa);
        MESSAGE("basis history gap ", gap);
        CHECK(gap <= 1e-8);

        const double mrp_direct = max_relative_pressure(direct, model);
        const double mrp_fast = basis.max_relative_pressure(schedule);
        CHECK(std::abs(mrp_direct - mrp_fast) <= 1e-9);
    }
}

TEST_CASE("response basis on a non-uniform initial field still matches") {
    auto model = testmodels::uniform_aquifer(30, 30, {{0, 10, 15}, {1, 20, 15}});
    // Tilt the initial pressure so the source-free evolution is non-trivial.
    for (int j = 0; j < model.ny; ++j)
        for (int i = 0; i < model.nx; ++i)
            model.initial_pressure_pa[model.cell_index(i, j)] += 1000.0 * i;
    ResponseBasis basis(model, 2, 3.0);
    InjectionSchedule schedule = InjectionSchedule::constant(2, 2, 3.0, 0.8);
    schedule.rate(1, 1) = 1.6;
    auto direct = simulate(model, schedule);
    auto fast = basis.history(schedule);
    const double gap = relative_field_gap(fast, direct, model.initial_pressure_pa);
    CHECK(gap <= 1e-8);
    CHECK(std::abs(basis.max_relative_pressure(schedule) -
                   max_relative_pressure(direct, model)) <= 1e-9);
}

TEST_CASE("model validation rejects inconsistent input") {
    auto good = testmodels::three_well_aquifer();
    CHECK_NOTHROW(good.validate());

    auto bad = good;
    bad.nx = 2;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = good;
    bad.wells[0].i = 0;  // boundary cell
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = good;
    bad.wells[1] = bad.wells[0];
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = good;
    bad.permeability_m2[5] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = good;
    bad.overburden_pressure_pa[40] = bad.initial_pressure_pa[40];
    CHECK_THROWS_AS(bad.validate(), ValidationError);

    bad = good;
    bad.porosity.pop_back();
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("schedule validation rejects inconsistent input") {
    auto model = testmodels::three_well_aquifer();
    auto schedule = InjectionSchedule::constant(2, 5, 3.0, 1.0);
    CHECK_THROWS_AS(simulate(model, schedule), ValidationError);

    schedule = InjectionSchedule::constant(3, 5, 3.0, 1.0);
    schedule.rates_mt_yr[4] = -0.1;
    CHECK_THROWS_AS(simulate(model, schedule), ValidationError);

    schedule = InjectionSchedule::constant(3, 5, 3.0, 1.0);
    schedule.rates_mt_yr[0] = std::nan("");
    CHECK_THROWS_AS(simulate(model, schedule), ValidationError);

    schedule = InjectionSchedule::constant(3, 5, 0.0, 1.0);
    CHECK_THROWS_AS(simulate(model, schedule), ValidationError);
}

TEST_CASE("history CSV dump covers every cell of every snapshot") {
    auto model = testmodels::uniform_aquifer(5, 4, {{0, 2, 2}}, 1000.0, 2);
    auto history = simulate(model, InjectionSchedule::constant(1, 1, 1.0, 0.5));
    auto path = std::filesystem::temp_directory_path() / "coalopt_history_test.csv";
    write_history_csv(history, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "time_s,i,j,pressure_pa");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3 * 20);  // initial state plus two substeps, 20 cells each
    std::filesystem::remove(path);
}

}  // TEST_SUITE
