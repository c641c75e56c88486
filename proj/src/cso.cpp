#include "coalopt/cso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "coalopt/errors.hpp"
#include "coalopt/parallel.hpp"
#include "coalopt/rng.hpp"

namespace coalopt {

namespace {

enum StreamTag : std::uint64_t { kTagInit = 1, kTagPair = 2, kTagMove = 3, kTagRestart = 4 };

// A collapsed swarm spends its remaining budget re-sampling one point, so
// once the best stops improving the run restarts: everyone re-seeds inside
// a box around the incumbent that halves with every restart, the incumbent
// itself stays as particle 0, and the competition dynamics continue
// unchanged. Pure budget recovery — between restarts this is canonical CSO.
inline double env_or(const char* name, double fallback) {
    const char* v = std::getenv(name);
    return v ? std::atof(v) : fallback;
}
static const int kStallGenerations = static_cast<int>(env_or("CSO_STALL_GENS", 20));
static const double kRestartRadius = env_or("CSO_RESTART_RADIUS", 0.25);
static const double kStallTolerance = env_or("CSO_STALL_TOL", 1e-5);

void check_box(std::span<const double> lower, std::span<const double> upper) {
    if (lower.empty() || lower.size() != upper.size())
        throw ValidationError("bound vectors must be non-empty and equally sized");
    for (std::size_t d = 0; d < lower.size(); ++d)
        if (!(lower[d] < upper[d]) || !std::isfinite(lower[d]) ||
            !std::isfinite(upper[d]))
            throw ValidationError("each lower bound must lie below its upper bound");
}

}  // namespace

bool constraint_beats(const ScalarEval& a, const ScalarEval& b) {
    const bool a_feasible = a.violation <= 0.0;
    const bool b_feasible = b.violation <= 0.0;
    if (a_feasible != b_feasible) return a_feasible;
    if (!a_feasible) return a.violation < b.violation;
    return a.fitness > b.fitness;
}

void OptimizerConfig::validate() const {
    if (population < 4 || population % 2 != 0)
        throw ValidationError("population must be an even number of at least 4");
    if (max_evaluations < population)
        throw ValidationError("max_evaluations must cover one full population");
    if (!(phi >= 0.0) || !(phi <= 1.0))
        throw ValidationError("phi must lie in [0, 1]");
    if (threads < 1) throw ValidationError("threads must be at least 1");
}

SooResult cso_maximize(const ScalarProblem& problem, std::span<const double> lower,
                       std::span<const double> upper, const OptimizerConfig& config) {
    config.validate();
    check_box(lower, upper);
    if (!problem.evaluate || !problem.evaluations_used)
        throw ValidationError("problem must provide evaluate and evaluations_used");

    const int n = config.population;
    const std::size_t dims = lower.size();
    // Safety stop for the degenerate case where cached evaluations stop
    // consuming budget; generous enough to never bind in normal runs.
    const int max_generations =
        100 + static_cast<int>(40 * (config.max_evaluations /
                                     std::max<std::int64_t>(1, n)));

    std::vector<SooIndividual> swarm(n);
    std::vector<std::vector<double>> velocity(n, std::vector<double>(dims, 0.0));
    std::vector<bool> evaluated(n, false);
    for (int i = 0; i < n; ++i) {
        swarm[i].position.resize(dims);
        if (i == 0) {
            // Known corner anchor: the all-lower-bounds point.
            std::copy(lower.begin(), lower.end(), swarm[i].position.begin());
        } else {
            SplitMix64 rng(derive_stream(config.seed, 0, i, kTagInit));
            for (std::size_t d = 0; d < dims; ++d)
                swarm[i].position[d] = rng.uniform_in(lower[d], upper[d]);
        }
    }

    SooResult result;
    bool have_best = false;
    // Last evaluated state of each individual; losers move before their
    // re-evaluation, so the raw swarm can pair a new position with a stale
    // eval when the budget runs out mid-generation.
    std::vector<SooIndividual> snapshot(n);
    std::vector<bool> ever_evaluated(n, false);

    ScalarEval stall_marker;
    bool have_marker = false;
    int stall_gens = 0;
    int restarts = 0;
    int restart_level = 0;
    ScalarEval last_restart_best;
    std::vector<double> prev_restart_position;

    for (int gen = 0;; ++gen) {
        std::vector<int> pending;
        for (int i = 0; i < n; ++i)
            if (!evaluated[i]) pending.push_back(i);

        const std::int64_t remaining =
            config.max_evaluations - problem.evaluations_used();
        if (remaining <= 0) break;
        const bool final_partial =
            remaining < static_cast<std::int64_t>(pending.size());
        if (final_partial) pending.resize(static_cast<std::size_t>(remaining));

        parallel_for(pending.size(), config.threads, [&](std::size_t t) {
            SooIndividual& ind = swarm[pending[t]];
            ind.eval = problem.evaluate(ind.position);
        });
        for (int i : pending) {
            evaluated[i] = true;
            snapshot[i] = swarm[i];
            ever_evaluated[i] = true;
            if (!have_best || constraint_beats(swarm[i].eval, result.best.eval)) {
                result.best = swarm[i];
                have_best = true;
            }
        }

        result.history.push_back({gen, result.best.eval.fitness,
                                  result.best.eval.violation,
                                  problem.evaluations_used()});

        if (final_partial || problem.evaluations_used() >= config.max_evaluations ||
            gen >= max_generations)
            break;

        bool improved = !have_marker;
        if (have_marker) {
            const bool was_feasible = stall_marker.violation <= 0.0;
            const bool now_feasible = result.best.eval.violation <= 0.0;
            if (now_feasible != was_feasible) {
                improved = true;
            } else if (!now_feasible) {
                improved = result.best.eval.violation <
                           stall_marker.violation -
                               kStallTolerance * (1.0 + stall_marker.violation);
            } else {
                improved =
                    result.best.eval.fitness >
                    stall_marker.fitness +
                        kStallTolerance * (1.0 + std::abs(stall_marker.fitness));
            }
        }
        if (improved) {
            stall_marker = result.best.eval;
            have_marker = true;
            stall_gens = 0;
        } else if (++stall_gens >= kStallGenerations) {
            ++restarts;
            static const int global_every =
                static_cast<int>(env_or("CSO_RESTART_GLOBAL_EVERY", 0));
            static const int global_first =
                static_cast<int>(env_or("CSO_RESTART_GLOBAL_FIRST", 0));
            static const int cycle =
                static_cast<int>(env_or("CSO_RESTART_CYCLE", 0));
            static const double decay = env_or("CSO_RESTART_DECAY", 0.5);
            const bool global_reroll =
                (global_every > 0 && restarts % global_every == 0) ||
                (global_first >= 1 && restarts <= global_first);
            double radius = 0.0;
            if (!global_reroll) {
                ++restart_level;
                const int lvl = cycle > 0 ? (restart_level - 1) % cycle
                                          : std::min(restart_level - 1, 20);
                radius = kRestartRadius * std::pow(decay, lvl);
            }
            static const int trades = static_cast<int>(env_or("CSO_RESTART_TRADES", 0));
            static const int pattern = static_cast<int>(env_or("CSO_RESTART_PATTERN", 0));
            const bool have_dir = pattern > 0 && restarts >= 2;
            std::vector<double> dir(dims, 0.0);
            if (have_dir)
                for (std::size_t d = 0; d < dims; ++d)
                    dir[d] = result.best.position[d] - prev_restart_position[d];
            prev_restart_position = result.best.position;
            for (int i = 0; i < n; ++i) {
                if (i == 0) {
                    swarm[i].position = result.best.position;
                } else {
                    SplitMix64 rng(derive_stream(config.seed, restarts, i, kTagRestart));
                    if (have_dir && i % 2 == 0) {
                        // pattern move: extrapolate incumbent drift with jitter
                        const double t = rng.uniform_in(0.0, 3.0);
                        for (std::size_t d = 0; d < dims; ++d) {
                            const double half = 0.25 * radius * (upper[d] - lower[d]);
                            swarm[i].position[d] =
                                std::clamp(result.best.position[d] + t * dir[d] +
                                               rng.uniform_in(-half, half),
                                           lower[d], upper[d]);
                        }
                    } else if (trades > 0 && dims >= 2 && i % 4 != 1) {
                        // pairwise trade moves: shift mass between two coordinates
                        swarm[i].position = result.best.position;
                        for (int t = 0; t < trades; ++t) {
                            const auto dp = static_cast<std::size_t>(
                                rng.uniform_in(0.0, static_cast<double>(dims)));
                            auto dm = static_cast<std::size_t>(
                                rng.uniform_in(0.0, static_cast<double>(dims - 1)));
                            if (dm >= dp) ++dm;
                            const double delta =
                                rng.uniform_in(0.0, radius * (upper[dp] - lower[dp]));
                            const double ratio = rng.uniform_in(0.5, 1.5);
                            swarm[i].position[dp] = std::clamp(
                                swarm[i].position[dp] + delta, lower[dp], upper[dp]);
                            swarm[i].position[dm] = std::clamp(
                                swarm[i].position[dm] - ratio * delta, lower[dm],
                                upper[dm]);
                        }
                    } else {
                        for (std::size_t d = 0; d < dims; ++d) {
                            if (global_reroll) {
                                swarm[i].position[d] = rng.uniform_in(lower[d], upper[d]);
                            } else {
                                const double half = radius * (upper[d] - lower[d]);
                                swarm[i].position[d] =
                                    std::clamp(result.best.position[d] +
                                                   rng.uniform_in(-half, half),
                                               lower[d], upper[d]);
                            }
                        }
                    }
                }
                static const int vel_seed =
                    static_cast<int>(env_or("CSO_RESTART_VEL", 0));
                if (vel_seed == 1 && i != 0) {
                    SplitMix64 vrng(
                        derive_stream(config.seed, restarts, n + i, kTagRestart));
                    for (std::size_t d = 0; d < dims; ++d)
                        velocity[i][d] = vrng.uniform_in(-radius * (upper[d] - lower[d]),
                                                         radius * (upper[d] - lower[d]));
                } else {
                    std::fill(velocity[i].begin(), velocity[i].end(), 0.0);
                }
                evaluated[i] = false;
            }
            stall_gens = 0;
            stall_marker = result.best.eval;
            continue;
        }

        std::vector<double> mean(dims, 0.0);
        for (const auto& ind : swarm)
            for (std::size_t d = 0; d < dims; ++d) mean[d] += ind.position[d];
        for (std::size_t d = 0; d < dims; ++d) mean[d] /= n;

        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        SplitMix64 pair_rng(derive_stream(config.seed, gen + 1, 0, kTagPair));
        pair_rng.shuffle(order);

        for (int pair = 0; pair < n / 2; ++pair) {
            const int a = order[2 * pair];
            const int b = order[2 * pair + 1];
            const int winner = constraint_beats(swarm[b].eval, swarm[a].eval) ? b : a;
            const int loser = winner == a ? b : a;

            SplitMix64 move_rng(derive_stream(config.seed, gen + 1, loser, kTagMove));
            auto& x = swarm[loser].position;
            auto& v = velocity[loser];
            const auto& xw = swarm[winner].position;
            for (std::size_t d = 0; d < dims; ++d) {
                const double r1 = move_rng.uniform();
                const double r2 = move_rng.uniform();
                const double r3 = move_rng.uniform();
                v[d] = r1 * v[d] + r2 * (xw[d] - x[d]) +
                       config.phi * r3 * (mean[d] - x[d]);
                x[d] = std::clamp(x[d] + v[d], lower[d], upper[d]);
            }
            evaluated[loser] = false;
        }
    }

    if (std::getenv("CSO_DEBUG")) std::fprintf(stderr, "[cso] restarts=%d\n", restarts);
    if (!have_best) throw ValidationError("budget exhausted before any evaluation");
    result.evaluations_used = problem.evaluations_used();
    result.final_population.reserve(n);
    for (int i = 0; i < n; ++i)
        if (ever_evaluated[i]) result.final_population.push_back(std::move(snapshot[i]));
    return result;
}

}  // namespace coalopt
