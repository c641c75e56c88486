#include "coalopt/reservoir.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include "coalopt/errors.hpp"
#include "coalopt/io.hpp"

namespace coalopt {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;

void axpy(double a, const double* x, double* y, int n) {
    for (int c = 0; c < n; ++c) y[c] += a * x[c];
}

/// Backward-Euler step operator for the discrete pressure equation
///   accum .* (p_next - p) = -L p_next + q,
/// assembled once per time-step size and factorized with a direct sparse
/// Cholesky (LDLT) so every step is an exact triangular solve.
class FdSystem {
public:
    FdSystem(const ReservoirModel& m, double dt_s) : n_(m.cell_count()) {
        const double volume = m.dx_m * m.dy_m * m.thickness_m;
        accum_.resize(n_);
        for (int c = 0; c < n_; ++c)
            accum_[c] = m.porosity[c] * m.total_compressibility_per_pa * volume / dt_s;

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(5 * n_);
        std::vector<double> diag(accum_.begin(), accum_.end());
        auto couple = [&](int a, int b, double t) {
            diag[a] += t;
            diag[b] += t;
            trip.emplace_back(a, b, -t);
            trip.emplace_back(b, a, -t);
        };
        for (int j = 0; j < m.ny; ++j) {
            for (int i = 0; i < m.nx; ++i) {
                const int c = m.cell_index(i, j);
                if (i + 1 < m.nx)
                    couple(c, m.cell_index(i + 1, j),
                           face_transmissibility(m, c, m.cell_index(i + 1, j), true));
                if (j + 1 < m.ny)
                    couple(c, m.cell_index(i, j + 1),
                           face_transmissibility(m, c, m.cell_index(i, j + 1), false));
            }
        }
        for (int c = 0; c < n_; ++c) trip.emplace_back(c, c, diag[c]);

        Eigen::SparseMatrix<double> a(n_, n_);
        a.setFromTriplets(trip.begin(), trip.end());
        solver_.compute(a);
        if (solver_.info() != Eigen::Success)
            throw NumericalError("pressure system factorization failed");
    }

    static double face_transmissibility(const ReservoirModel& m, int c1, int c2,
                                        bool x_face) {
        const double k1 = m.permeability_m2[c1];
        const double k2 = m.permeability_m2[c2];
        const double harmonic = 2.0 * k1 * k2 / (k1 + k2);
        const double geometry = x_face ? m.dy_m * m.thickness_m / m.dx_m
                                       : m.dx_m * m.thickness_m / m.dy_m;
        return harmonic / m.viscosity_pas * geometry;
    }

    void step(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
              Eigen::VectorXd& out) const {
        out = solver_.solve((accum_.array() * p.array()).matrix() + q);
    }

    const Eigen::VectorXd& accum() const { return accum_; }

private:
    int n_;
    Eigen::VectorXd accum_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

/// True when the initial pressure field is an exact steady state of the
/// discrete operator (net face flux identically zero in floating point),
/// which holds in particular for any uniform field.
bool initial_state_is_stationary(const ReservoirModel& m) {
    std::vector<double> net(m.cell_count(), 0.0);
    auto flow = [&](int a, int b, double t) {
        const double f = t * (m.initial_pressure_pa[a] - m.initial_pressure_pa[b]);
        net[a] += f;
        net[b] -= f;
    };
    for (int j = 0; j < m.ny; ++j) {
        for (int i = 0; i < m.nx; ++i) {
            const int c = m.cell_index(i, j);
            if (i + 1 < m.nx)
                flow(c, m.cell_index(i + 1, j),
                     FdSystem::face_transmissibility(m, c, m.cell_index(i + 1, j), true));
            if (j + 1 < m.ny)
                flow(c, m.cell_index(i, j + 1),
                     FdSystem::face_transmissibility(m, c, m.cell_index(i, j + 1), false));
        }
    }
    return std::all_of(net.begin(), net.end(), [](double v) { return v == 0.0; });
}

double volumetric_rate_m3_s(double rate_mt_yr, double density_kg_m3) {
    return rate_mt_yr * kKgPerMegatonne / (kSecondsPerYear * density_kg_m3);
}

}  // namespace

ReservoirModel ReservoirModel::uniform(int nx, int ny, double dx_m, double dy_m,
                                       double thickness_m, double permeability_m2,
                                       double porosity, double viscosity_pas,
                                       double total_compressibility_per_pa,
                                       double co2_density_kg_m3,
                                       double initial_pressure_pa,
                                       double overburden_pressure_pa) {
    ReservoirModel m;
    m.nx = nx;
    m.ny = ny;
    m.dx_m = dx_m;
    m.dy_m = dy_m;
    m.thickness_m = thickness_m;
    m.viscosity_pas = viscosity_pas;
    m.total_compressibility_per_pa = total_compressibility_per_pa;
    m.co2_density_kg_m3 = co2_density_kg_m3;
    const int n = nx * ny;
    m.permeability_m2.assign(n, permeability_m2);
    m.porosity.assign(n, porosity);
    m.initial_pressure_pa.assign(n, initial_pressure_pa);
    m.overburden_pressure_pa.assign(n, overburden_pressure_pa);
    return m;
}

void ReservoirModel::validate() const {
    if (nx < 3 || ny < 3)
        throw ValidationError("grid must be at least 3x3 cells");
    if (!(dx_m > 0) || !(dy_m > 0) || !(thickness_m > 0))
        throw ValidationError("cell sizes and thickness must be positive");
    if (!(viscosity_pas > 0) || !(total_compressibility_per_pa > 0) ||
        !(co2_density_kg_m3 > 0))
        throw ValidationError("fluid properties must be positive");
    if (substeps_per_interval < 1)
        throw ValidationError("substeps_per_interval must be at least 1");
    const std::size_t n = static_cast<std::size_t>(cell_count());
    if (permeability_m2.size() != n || porosity.size() != n ||
        initial_pressure_pa.size() != n || overburden_pressure_pa.size() != n)
        throw ValidationError("per-cell field size does not match the grid");
    for (std::size_t c = 0; c < n; ++c) {
        if (!(permeability_m2[c] > 0) || !std::isfinite(permeability_m2[c]))
            throw ValidationError("permeability must be positive and finite");
        if (!(porosity[c] > 0) || porosity[c] > 1)
            throw ValidationError("porosity must lie in (0, 1]");
        if (!std::isfinite(initial_pressure_pa[c]) || initial_pressure_pa[c] < 0)
            throw ValidationError("initial pressure must be finite and non-negative");
        if (!(overburden_pressure_pa[c] > initial_pressure_pa[c]))
            throw ValidationError("overburden pressure must exceed initial pressure");
    }
    if (wells.empty()) throw ValidationError("model needs at least one well");
    std::set<int> cells;
    std::set<int> agents;
    for (const auto& w : wells) {
        if (w.i < 1 || w.i > nx - 2 || w.j < 1 || w.j > ny - 2)
            throw ValidationError("well cells must be interior to the grid");
        if (!cells.insert(cell_index(w.i, w.j)).second)
            throw ValidationError("two wells share one grid cell");
        if (w.agent_index < 0 || !agents.insert(w.agent_index).second)
            throw ValidationError("well agent indices must be distinct and non-negative");
    }
}

double InjectionSchedule::total_for_well(int well) const {
    double sum = 0.0;
    for (int k = 0; k < num_intervals; ++k) sum += rate(well, k) * interval_years;
    return sum;
}

InjectionSchedule InjectionSchedule::constant(int num_wells, int num_intervals,
                                              double interval_years, double rate_mt_yr) {
    InjectionSchedule s;
    s.num_wells = num_wells;
    s.num_intervals = num_intervals;
    s.interval_years = interval_years;
    s.rates_mt_yr.assign(static_cast<std::size_t>(num_wells) * num_intervals, rate_mt_yr);
    return s;
}

void InjectionSchedule::validate(int expected_wells) const {
    if (num_wells != expected_wells)
        throw ValidationError("schedule covers " + std::to_string(num_wells) +
                              " wells, model has " + std::to_string(expected_wells));
    if (num_intervals < 1) throw ValidationError("schedule needs at least one interval");
    if (!(interval_years > 0)) throw ValidationError("interval length must be positive");
    if (rates_mt_yr.size() != static_cast<std::size_t>(num_wells) * num_intervals)
        throw ValidationError("schedule rate matrix has the wrong size");
    for (double r : rates_mt_yr)
        if (!std::isfinite(r) || r < 0)
            throw ValidationError("schedule rates must be finite and non-negative");
}

PressureHistory simulate(const ReservoirModel& model, const InjectionSchedule& schedule) {
    model.validate();
    schedule.validate(static_cast<int>(model.wells.size()));

    const int n = model.cell_count();
    const int sub = model.substeps_per_interval;
    const int total = sub * schedule.num_intervals;
    const double dt_s = schedule.interval_years * kSecondsPerYear / sub;

    PressureHistory h;
    h.nx = model.nx;
    h.ny = model.ny;
    h.times_s.reserve(total + 1);
    h.fields_pa.reserve(total + 1);
    h.times_s.push_back(0.0);
    h.fields_pa.push_back(model.initial_pressure_pa);

    const bool all_zero = std::all_of(schedule.rates_mt_yr.begin(),
                                      schedule.rates_mt_yr.end(),
                                      [](double r) { return r == 0.0; });
    if (all_zero && initial_state_is_stationary(model)) {
        // Zero source on a stationary field: the exact discrete solution
        // never moves, so skip the solves entirely.
        for (int s = 1; s <= total; ++s) {
            h.times_s.push_back(s * dt_s);
            h.fields_pa.push_back(model.initial_pressure_pa);
        }
        return h;
    }

    FdSystem sys(model, dt_s);

    std::vector<Eigen::VectorXd> sources(schedule.num_intervals,
                                         Eigen::VectorXd::Zero(n));
    for (std::size_t w = 0; w < model.wells.size(); ++w) {
        const int cell = model.cell_index(model.wells[w].i, model.wells[w].j);
        for (int k = 0; k < schedule.num_intervals; ++k)
            sources[k][cell] += volumetric_rate_m3_s(
                schedule.rate(static_cast<int>(w), k), model.co2_density_kg_m3);
    }

    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(
        model.initial_pressure_pa.data(), n);
    Eigen::VectorXd next(n);
    for (int s = 1; s <= total; ++s) {
        const int k = (s - 1) / sub;
        sys.step(p, sources[k], next);
        if (!next.allFinite())
            throw NumericalError("non-finite pressure after substep " +
                                 std::to_string(s));
        p.swap(next);
        h.times_s.push_back(s * dt_s);
        h.fields_pa.emplace_back(p.data(), p.data() + n);
    }
    return h;
}

double max_relative_pressure(const PressureHistory& history, const ReservoirModel& model) {
    if (history.nx != model.nx || history.ny != model.ny)
        throw ValidationError("history grid does not match the model");
    const int n = model.cell_count();
    double mrp = 0.0;
    for (const auto& field : history.fields_pa) {
        if (static_cast<int>(field.size()) != n)
            throw ValidationError("history field size does not match the grid");
        for (int c = 0; c < n; ++c)
            mrp = std::max(mrp, field[c] / model.overburden_pressure_pa[c]);
    }
    return mrp;
}

void write_history_csv(const PressureHistory& history, const std::filesystem::path& path) {
    std::string out = "time_s,i,j,pressure_pa\n";
    for (std::size_t s = 0; s < history.fields_pa.size(); ++s) {
        const std::string t = format_double(history.times_s[s]);
        const auto& field = history.fields_pa[s];
        for (int j = 0; j < history.ny; ++j) {
            for (int i = 0; i < history.nx; ++i) {
                out += t;
                out += ',';
                out += std::to_string(i);
                out += ',';
                out += std::to_string(j);
                out += ',';
                out += format_double(field[j * history.nx + i]);
                out += '\n';
            }
        }
    }
    write_text_file(path, out);
}

double exponential_integral_e1(double x) {
    if (!(x > 0) || !std::isfinite(x))
        throw ValidationError("E1 is evaluated for positive finite arguments only");
    if (x > 700.0) return 0.0;  // e^-x underflows; the tail is below 1e-306
    if (x <= 1.0) {
        // Power series -gamma - ln x + sum (-1)^(n+1) x^n / (n n!).
        double sum = -kEulerGamma - std::log(x);
        double powterm = 1.0;
        for (int n = 1; n <= 80; ++n) {
            powterm *= x / n;
            const double add = (n % 2 == 1 ? powterm : -powterm) / n;
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    // Continued fraction with the modified Lentz algorithm.
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 300; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x);
}

double theis_pressure_rise(double q_m3_s, double permeability_m2, double thickness_m,
                           double viscosity_pas, double porosity,
                           double total_compressibility_per_pa, double radius_m,
                           double time_s) {
    for (double v : {q_m3_s, permeability_m2, thickness_m, viscosity_pas, porosity,
                     total_compressibility_per_pa, radius_m, time_s})
        if (!(v > 0) || !std::isfinite(v))
            throw ValidationError("Theis arguments must all be positive and finite");
    const double u = porosity * viscosity_pas * total_compressibility_per_pa *
                     radius_m * radius_m / (4.0 * permeability_m2 * time_s);
    if (u > 700.0) return 0.0;
    return q_m3_s * viscosity_pas /
           (4.0 * M_PI * permeability_m2 * thickness_m) * exponential_integral_e1(u);
}

ResponseBasis::ResponseBasis(const ReservoirModel& model, int num_intervals,
                             double interval_years)
    : model_(model), num_intervals_(num_intervals), interval_years_(interval_years) {
    model_.validate();
    if (num_intervals_ < 1) throw ValidationError("basis needs at least one interval");
    if (!(interval_years_ > 0)) throw ValidationError("interval length must be positive");

    const int n = model_.cell_count();
    total_substeps_ = model_.substeps_per_interval * num_intervals_;
    dt_s_ = interval_years_ * kSecondsPerYear / model_.substeps_per_interval;

    inv_overburden_.resize(n);
    for (int c = 0; c < n; ++c)
        inv_overburden_[c] = 1.0 / model_.overburden_pressure_pa[c];

    FdSystem sys(model_, dt_s_);
    const Eigen::VectorXd zero_q = Eigen::VectorXd::Zero(n);

    stationary_base_ = initial_state_is_stationary(model_);
    if (stationary_base_) {
        base_.push_back(model_.initial_pressure_pa);
    } else {
        base_.reserve(total_substeps_ + 1);
        base_.push_back(model_.initial_pressure_pa);
        Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(
            model_.initial_pressure_pa.data(), n);
        Eigen::VectorXd next(n);
        for (int s = 1; s <= total_substeps_; ++s) {
            sys.step(p, zero_q, next);
            if (!next.allFinite())
                throw NumericalError("non-finite base pressure after substep " +
                                     std::to_string(s));
            p.swap(next);
            base_.emplace_back(p.data(), p.data() + n);
        }
    }

    response_.resize(model_.wells.size());
    for (std::size_t w = 0; w < model_.wells.size(); ++w) {
        auto& resp = response_[w];
        resp.assign(static_cast<std::size_t>(total_substeps_ + 1) * n, 0.0);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
        q[model_.cell_index(model_.wells[w].i, model_.wells[w].j)] = 1.0;
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd next(n);
        for (int s = 1; s <= total_substeps_; ++s) {
            sys.step(p, q, next);
            if (!next.allFinite())
                throw NumericalError("non-finite well response after substep " +
                                     std::to_string(s));
            p.swap(next);
            std::memcpy(resp.data() + static_cast<std::size_t>(s) * n, p.data(),
                        sizeof(double) * n);
        }
    }
}

void ResponseBasis::check_schedule(const InjectionSchedule& schedule) const {
    schedule.validate(static_cast<int>(model_.wells.size()));
    if (schedule.num_intervals != num_intervals_ ||
        schedule.interval_years != interval_years_)
        throw ValidationError("schedule shape does not match the response basis");
}

const double* ResponseBasis::base_field(int substep) const {
    return stationary_base_ ? base_[0].data() : base_[substep].data();
}

std::vector<std::vector<double>> ResponseBasis::step_deltas(
    const InjectionSchedule& schedule) const {
    std::vector<std::vector<double>> deltas(model_.wells.size());
    for (std::size_t w = 0; w < model_.wells.size(); ++w) {
        deltas[w].resize(num_intervals_);
        double prev = 0.0;
        for (int k = 0; k < num_intervals_; ++k) {
            const double vol = volumetric_rate_m3_s(
                schedule.rate(static_cast<int>(w), k), model_.co2_density_kg_m3);
            deltas[w][k] = vol - prev;
            prev = vol;
        }
    }
    return deltas;
}

double ResponseBasis::max_relative_pressure(const InjectionSchedule& schedule) const {
    check_schedule(schedule);
    const int n = model_.cell_count();
    const int sub = model_.substeps_per_interval;
    const auto deltas = step_deltas(schedule);

    double mrp = 0.0;
    const double* p0 = base_field(0);
    for (int c = 0; c < n; ++c) mrp = std::max(mrp, p0[c] * inv_overburden_[c]);

    std::vector<double> p(n);
    for (int s = 1; s <= total_substeps_; ++s) {
        std::memcpy(p.data(), base_field(s), sizeof(double) * n);
        for (std::size_t w = 0; w < deltas.size(); ++w) {
            const auto& dw = deltas[w];
            const double* resp = response_[w].data();
            for (int k = 0; k * sub < s && k < num_intervals_; ++k) {
                if (dw[k] == 0.0) continue;
                axpy(dw[k], resp + static_cast<std::size_t>(s - k * sub) * n,
                     p.data(), n);
            }
        }
        double local = 0.0;
        for (int c = 0; c < n; ++c) local = std::max(local, p[c] * inv_overburden_[c]);
        mrp = std::max(mrp, local);
    }
    return mrp;
}

PressureHistory ResponseBasis::history(const InjectionSchedule& schedule) const {
    check_schedule(schedule);
    const int n = model_.cell_count();
    const int sub = model_.substeps_per_interval;
    const auto deltas = step_deltas(schedule);

    PressureHistory h;
    h.nx = model_.nx;
    h.ny = model_.ny;
    h.times_s.reserve(total_substeps_ + 1);
    h.fields_pa.reserve(total_substeps_ + 1);
    h.times_s.push_back(0.0);
    h.fields_pa.push_back(model_.initial_pressure_pa);

    for (int s = 1; s <= total_substeps_; ++s) {
        std::vector<double> p(base_field(s), base_field(s) + n);
        for (std::size_t w = 0; w < deltas.size(); ++w) {
            const auto& dw = deltas[w];
            const double* resp = response_[w].data();
            for (int k = 0; k * sub < s && k < num_intervals_; ++k) {
                if (dw[k] == 0.0) continue;
                axpy(dw[k], resp + static_cast<std::size_t>(s - k * sub) * n,
                     p.data(), n);
            }
        }
        h.times_s.push_back(s * dt_s_);
        h.fields_pa.push_back(std::move(p));
    }
    return h;
}

}  // namespace coalopt
