#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace coalopt {

inline constexpr double kSecondsPerYear = 365.0 * 86400.0;
inline constexpr double kKgPerMegatonne = 1.0e9;
inline constexpr double kMilliDarcyM2 = 9.869233e-16;

/// Feasibility limit on reservoir pressure over overburden pressure.
inline constexpr double kRatioLimit = 0.9;

/// Injection well fixed to one grid cell, owned by one agent.
struct WellSpec {
    int agent_index = -1;
    int i = 0;
    int j = 0;
};

/// Two-dimensional single-phase slightly-compressible reservoir described on
/// a regular cell-centered grid. Cell (i, j) maps to flat index j*nx + i.
/// Per-cell fields allow heterogeneous rock; pressures are in Pa,
/// permeability in m^2.
struct ReservoirModel {
    int nx = 0;
    int ny = 0;
    double dx_m = 0.0;
    double dy_m = 0.0;
    double thickness_m = 0.0;
    double viscosity_pas = 0.0;
    double total_compressibility_per_pa = 0.0;
    double co2_density_kg_m3 = 0.0;
    int substeps_per_interval = 1;
    std::vector<double> permeability_m2;
    std::vector<double> porosity;
    std::vector<double> initial_pressure_pa;
    std::vector<double> overburden_pressure_pa;
    std::vector<WellSpec> wells;

    int cell_count() const { return nx * ny; }
    int cell_index(int i, int j) const { return j * nx + i; }

    /// Uniform-property model; per-cell fields filled with the given values.
    static ReservoirModel uniform(int nx, int ny, double dx_m, double dy_m,
                                  double thickness_m, double permeability_m2,
                                  double porosity, double viscosity_pas,
                                  double total_compressibility_per_pa,
                                  double co2_density_kg_m3,
                                  double initial_pressure_pa,
                                  double overburden_pressure_pa);

    /// Throws ValidationError on inconsistent dimensions, non-physical
    /// values, or ill-placed wells (wells must sit on distinct interior
    /// cells).
    void validate() const;
};

/// Piecewise-constant injection plan: rates_mt_yr[w*num_intervals + k] is
/// the mass rate of well w during interval k in Mt/yr.
struct InjectionSchedule {
    int num_wells = 0;
    int num_intervals = 0;
    double interval_years = 0.0;
    std::vector<double> rates_mt_yr;

    double rate(int well, int interval) const {
        return rates_mt_yr[well * num_intervals + interval];
    }
    double& rate(int well, int interval) {
        return rates_mt_yr[well * num_intervals + interval];
    }

    /// Mass injected by one well over the whole horizon, in Mt.
    double total_for_well(int well) const;

    double horizon_years() const { return interval_years * num_intervals; }

    static InjectionSchedule constant(int num_wells, int num_intervals,
                                      double interval_years, double rate_mt_yr);

    /// Throws ValidationError unless dimensions are consistent and all rates
    /// are finite and non-negative.
    void validate(int expected_wells) const;
};

/// Pressure fields at the end of every implicit substep, plus the initial
/// state at times_s[0] = 0.
struct PressureHistory {
    int nx = 0;
    int ny = 0;
    std::vector<double> times_s;
    std::vector<std::vector<double>> fields_pa;
};

/// Integrates the pressure equation over the schedule horizon with backward
/// Euler on the model grid (five-point stencil, harmonic-mean face
/// transmissibilities, no-flow boundaries, direct sparse factorization).
/// Mass rates become volumetric sources through the stored CO2 density.
/// Pure function of its inputs; repeated calls give identical output.
PressureHistory simulate(const ReservoirModel& model, const InjectionSchedule& schedule);

/// Largest reservoir-over-overburden pressure ratio across all snapshots
/// and cells.
double max_relative_pressure(const PressureHistory& history, const ReservoirModel& model);

/// Writes the whole history as one CSV (header time_s,i,j,pressure_pa,
/// row-major cell order within each snapshot).
void write_history_csv(const PressureHistory& history, const std::filesystem::path& path);

/// Exponential integral E1(x) for x > 0: series for x <= 1, continued
/// fraction beyond; relative accuracy well under 1e-10.
double exponential_integral_e1(double x);

/// Analytic line-source (Theis) pressure rise for a constant volumetric
/// rate Q starting at t = 0, observed at radius r:
///   dp = Q mu / (4 pi k H) * E1(phi mu ct r^2 / (4 k t)).
/// All arguments must be positive.
double theis_pressure_rise(double q_m3_s, double permeability_m2, double thickness_m,
                           double viscosity_pas, double porosity,
                           double total_compressibility_per_pa, double radius_m,
                           double time_s);

/// Precomputed step-response basis for a fixed model and schedule shape.
/// Because the discrete pressure equation is linear, the response to a unit
/// volumetric rate at each well, started at t = 0, spans every schedule's
/// solution; evaluating a schedule then costs a few vector updates per
/// substep instead of a linear solve. Results match simulate() to solver
/// rounding. Immutable after construction and safe to share across threads.
class ResponseBasis {
public:
    ResponseBasis(const ReservoirModel& model, int num_intervals, double interval_years);

    double max_relative_pressure(const InjectionSchedule& schedule) const;

    /// Superposed full history (for dumps and cross-checks against
    /// simulate()).
    PressureHistory history(const InjectionSchedule& schedule) const;

    int total_substeps() const { return total_substeps_; }
    const ReservoirModel& model() const { return model_; }

private:
    void check_schedule(const InjectionSchedule& schedule) const;
    const double* base_field(int substep) const;
    std::vector<std::vector<double>> step_deltas(const InjectionSchedule& schedule) const;

    ReservoirModel model_;
    int num_intervals_;
    double interval_years_;
    int total_substeps_;
    double dt_s_;
    bool stationary_base_;
    std::vector<std::vector<double>> base_;       // zero-source evolution (1 field if stationary)
    std::vector<std::vector<double>> response_;   // per well, (S+1) x n contiguous
    std::vector<double> inv_overburden_;
};

}  // namespace coalopt
