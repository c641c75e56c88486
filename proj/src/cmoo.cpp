#include "coalopt/cmoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coalopt/errors.hpp"
#include "coalopt/metrics.hpp"
#include "coalopt/parallel.hpp"
#include "coalopt/rng.hpp"

namespace coalopt {

namespace {

enum StreamTag : std::uint64_t { kInitMain = 11, kInitAux = 12, kVaryMain = 13, kVaryAux = 14 };

void check_box(std::span<const double> lower, std::span<const double> upper) {
    if (lower.empty() || lower.size() != upper.size())
        throw ValidationError("bound vectors must be non-empty and equally sized");
    for (std::size_t d = 0; d < lower.size(); ++d)
        if (!(lower[d] < upper[d]) || !std::isfinite(lower[d]) ||
            !std::isfinite(upper[d]))
            throw ValidationError("each lower bound must lie below its upper bound");
}

struct Ranking {
    std::vector<int> rank;
    std::vector<double> crowding;
};

std::vector<double> crowding_distances(const std::vector<MooEval>& evals,
                                       const std::vector<int>& rank) {
    const int n = static_cast<int>(evals.size());
    std::vector<double> crowd(n, 0.0);
    if (n == 0) return crowd;
    const int max_rank = *std::max_element(rank.begin(), rank.end());
    const std::size_t m = evals[0].objectives.size();
    for (int r = 0; r <= max_rank; ++r) {
        std::vector<int> front;
        for (int i = 0; i < n; ++i)
            if (rank[i] == r) front.push_back(i);
        if (front.size() <= 2) {
            for (int i : front) crowd[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        for (std::size_t k = 0; k < m; ++k) {
            std::stable_sort(front.begin(), front.end(), [&](int a, int b) {
                return evals[a].objectives[k] < evals[b].objectives[k];
            });
            const double lo = evals[front.front()].objectives[k];
            const double hi = evals[front.back()].objectives[k];
            crowd[front.front()] = std::numeric_limits<double>::infinity();
            crowd[front.back()] = std::numeric_limits<double>::infinity();
            if (hi <= lo) continue;
            for (std::size_t p = 1; p + 1 < front.size(); ++p)
                crowd[front[p]] += (evals[front[p + 1]].objectives[k] -
                                    evals[front[p - 1]].objectives[k]) /
                                   (hi - lo);
        }
    }
    return crowd;
}

Ranking rank_population(const std::vector<MooEval>& evals, DominanceMode mode,
                        double epsilon) {
    Ranking out;
    out.rank = nondominated_sort(evals, mode, epsilon);
    out.crowding = crowding_distances(evals, out.rank);
    return out;
}

/// (rank asc, crowding desc, index asc) — the NSGA-II preference order.
bool preferred(const Ranking& r, int a, int b) {
    if (r.rank[a] != r.rank[b]) return r.rank[a] < r.rank[b];
    if (r.crowding[a] != r.crowding[b]) return r.crowding[a] > r.crowding[b];
    return a < b;
}

int tournament(SplitMix64& rng, const Ranking& ranking, int n) {
    const int a = static_cast<int>(rng.uniform_index(n));
    const int b = static_cast<int>(rng.uniform_index(n));
    return preferred(ranking, a, b) ? a : b;
}

/// Simulated binary crossover (bounded), producing two children.
void sbx(SplitMix64& rng, std::span<const double> p1, std::span<const double> p2,
         std::span<const double> lower, std::span<const double> upper,
         double crossover_prob, double eta, std::vector<double>& c1,
         std::vector<double>& c2) {
    c1.assign(p1.begin(), p1.end());
    c2.assign(p2.begin(), p2.end());
    if (rng.uniform() > crossover_prob) return;
    for (std::size_t d = 0; d < p1.size(); ++d) {
        if (rng.uniform() > 0.5) continue;
        double y1 = p1[d], y2 = p2[d];
        if (std::abs(y1 - y2) <= 1e-14) continue;
        if (y1 > y2) std::swap(y1, y2);
        const double u = rng.uniform();
        const double yl = lower[d], yu = upper[d];

        double beta = 1.0 + 2.0 * (y1 - yl) / (y2 - y1);
        double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        double betaq = u <= 1.0 / alpha
                           ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                           : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        double lo_child = 0.5 * ((y1 + y2) - betaq * (y2 - y1));

        beta = 1.0 + 2.0 * (yu - y2) / (y2 - y1);
        alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        betaq = u <= 1.0 / alpha
                    ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                    : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        double hi_child = 0.5 * ((y1 + y2) + betaq * (y2 - y1));

        lo_child = std::clamp(lo_child, yl, yu);
        hi_child = std::clamp(hi_child, yl, yu);
        if (rng.uniform() <= 0.5) {
            c1[d] = hi_child;
            c2[d] = lo_child;
        } else {
            c1[d] = lo_child;
            c2[d] = hi_child;
        }
    }
}

/// Bounded polynomial mutation.
void polynomial_mutation(SplitMix64& rng, std::vector<double>& x,
                         std::span<const double> lower, std::span<const double> upper,
                         double rate, double eta) {
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (rng.uniform() > rate) continue;
        const double yl = lower[d], yu = upper[d];
        double y = x[d];
        const double delta1 = (y - yl) / (yu - yl);
        const double delta2 = (yu - y) / (yu - yl);
        const double rnd = rng.uniform();
        const double mut_pow = 1.0 / (eta + 1.0);
        double deltaq;
        if (rnd <= 0.5) {
            const double xy = 1.0 - delta1;
            const double val = 2.0 * rnd + (1.0 - 2.0 * rnd) * std::pow(xy, eta + 1.0);
            deltaq = std::pow(val, mut_pow) - 1.0;
        } else {
            const double xy = 1.0 - delta2;
            const double val =
                2.0 * (1.0 - rnd) + 2.0 * (rnd - 0.5) * std::pow(xy, eta + 1.0);
            deltaq = 1.0 - std::pow(val, mut_pow);
        }
        y += deltaq * (yu - yl);
        x[d] = std::clamp(y, yl, yu);
    }
}

std::vector<MooPoint> environmental_selection(std::vector<MooPoint> pool, int n,
                                              DominanceMode mode, double epsilon) {
    std::vector<MooEval> evals;
    evals.reserve(pool.size());
    for (const auto& p : pool) evals.push_back(p.eval);
    const Ranking ranking = rank_population(evals, mode, epsilon);
    std::vector<int> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return preferred(ranking, a, b); });
    std::vector<MooPoint> selected;
    selected.reserve(n);
    for (int i = 0; i < n; ++i) selected.push_back(std::move(pool[order[i]]));
    return selected;
}

bool weakly_dominates(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] < b[k]) return false;
    return true;
}

void archive_insert(std::vector<MooPoint>& archive, const MooPoint& point) {
    if (point.eval.violation > 0.0) return;
    for (const auto& a : archive)
        if (weakly_dominates(a.eval.objectives, point.eval.objectives)) return;
    archive.erase(std::remove_if(archive.begin(), archive.end(),
                                 [&](const MooPoint& a) {
                                     return weakly_dominates(point.eval.objectives,
                                                             a.eval.objectives);
                                 }),
                  archive.end());
    archive.push_back(point);
}

}  // namespace

bool moo_dominates(const MooEval& a, const MooEval& b, DominanceMode mode,
                   double epsilon) {
    const double threshold = mode == DominanceMode::EpsilonRelaxed ? epsilon : 0.0;
    const bool a_feasible = a.violation <= threshold;
    const bool b_feasible = b.violation <= threshold;
    if (a_feasible != b_feasible) return a_feasible;
    if (!a_feasible) return a.violation < b.violation;
    bool strictly = false;
    for (std::size_t k = 0; k < a.objectives.size(); ++k) {
        if (a.objectives[k] < b.objectives[k]) return false;
        if (a.objectives[k] > b.objectives[k]) strictly = true;
    }
    return strictly;
}

std::vector<int> nondominated_sort(const std::vector<MooEval>& evals,
                                   DominanceMode mode, double epsilon) {
    const int n = static_cast<int>(evals.size());
    std::vector<std::vector<int>> dominates(n);
    std::vector<int> dominated_by(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (moo_dominates(evals[i], evals[j], mode, epsilon)) {
                dominates[i].push_back(j);
                ++dominated_by[j];
            } else if (moo_dominates(evals[j], evals[i], mode, epsilon)) {
                dominates[j].push_back(i);
                ++dominated_by[i];
            }
        }
    }
    std::vector<int> rank(n, -1);
    std::vector<int> current;
    for (int i = 0; i < n; ++i)
        if (dominated_by[i] == 0) current.push_back(i);
    int level = 0;
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current) {
            rank[i] = level;
            for (int j : dominates[i])
                if (--dominated_by[j] == 0) next.push_back(j);
        }
        current = std::move(next);
        ++level;
    }
    return rank;
}

double epsilon_schedule(double epsilon0, std::int64_t t, std::int64_t total,
                        double decay) {
    if (epsilon0 < 0 || total <= 0 || decay < 0)
        throw ValidationError("epsilon schedule needs epsilon0 >= 0, total > 0, decay >= 0");
    const double progress = 1.0 - static_cast<double>(t) / static_cast<double>(total);
    if (progress <= 0.0) return 0.0;
    return epsilon0 * std::pow(progress, decay);
}

void MooConfig::validate() const {
    if (population < 4 || population % 2 != 0)
        throw ValidationError("population must be an even number of at least 4");
    if (max_evaluations < 2 * population)
        throw ValidationError("max_evaluations must cover both initial populations");
    if (!(epsilon_decay >= 0)) throw ValidationError("epsilon_decay must be >= 0");
    if (!(crossover_prob >= 0) || !(crossover_prob <= 1))
        throw ValidationError("crossover_prob must lie in [0, 1]");
    if (!(crossover_index > 0) || !(mutation_index > 0))
        throw ValidationError("distribution indices must be positive");
    if (threads < 1) throw ValidationError("threads must be at least 1");
}

MooResult cmoo_optimize(const MooProblem& problem, std::span<const double> lower,
                        std::span<const double> upper, const MooConfig& config) {
    config.validate();
    check_box(lower, upper);
    if (!problem.evaluate || !problem.evaluations_used || problem.num_objectives < 1)
        throw ValidationError("problem must provide evaluate, evaluations_used, and objectives");

    const int n = config.population;
    const std::size_t dims = lower.size();
    const double mutation_rate = 1.0 / static_cast<double>(dims);
    const std::int64_t budget = config.max_evaluations;
    const int max_generations =
        100 + static_cast<int>(40 * (budget / std::max<std::int64_t>(1, n)));

    MooResult result;
    result.best_violation = std::numeric_limits<double>::infinity();
    std::vector<MooPoint> archive;

    auto evaluate_all = [&](std::vector<MooPoint>& points) {
        parallel_for(points.size(), config.threads, [&](std::size_t i) {
            points[i].eval = problem.evaluate(points[i].position);
        });
        for (const auto& p : points) {
            if (static_cast<int>(p.eval.objectives.size()) != problem.num_objectives)
                throw ValidationError("evaluation returned the wrong objective count");
            result.best_violation = std::min(result.best_violation, p.eval.violation);
        }
        for (const auto& p : points) archive_insert(archive, p);
    };

    auto init_population = [&](StreamTag tag) {
        std::vector<MooPoint> pop(n);
        for (int i = 0; i < n; ++i) {
            pop[i].position.resize(dims);
            if (i == 0) {
                std::copy(lower.begin(), lower.end(), pop[i].position.begin());
            } else {
                SplitMix64 rng(derive_stream(config.seed, 0, i, tag));
                for (std::size_t d = 0; d < dims; ++d)
                    pop[i].position[d] = rng.uniform_in(lower[d], upper[d]);
            }
        }
        return pop;
    };

    std::vector<MooPoint> main_pop = init_population(kInitMain);
    std::vector<MooPoint> aux_pop = init_population(kInitAux);
    evaluate_all(main_pop);
    evaluate_all(aux_pop);

    double epsilon0 = 0.0;
    for (const auto& p : main_pop) epsilon0 = std::max(epsilon0, p.eval.violation);
    for (const auto& p : aux_pop) epsilon0 = std::max(epsilon0, p.eval.violation);

    auto record_progress = [&](int gen, double eps) {
        MooProgress prog;
        prog.generation = gen;
        prog.archive_size = archive.size();
        prog.epsilon = eps;
        prog.evaluations = problem.evaluations_used();
        if (config.hv_reference && problem.num_objectives <= 3) {
            std::vector<std::vector<double>> objs;
            objs.reserve(archive.size());
            for (const auto& p : archive) objs.push_back(p.eval.objectives);
            prog.archive_hypervolume =
                hypervolume_clipped(objs, *config.hv_reference);
        }
        result.progress.push_back(prog);
    };
    record_progress(0, epsilon0);

    auto make_offspring = [&](const std::vector<MooPoint>& pop, DominanceMode mode,
                              double eps, int gen, StreamTag tag) {
        std::vector<MooEval> evals;
        evals.reserve(pop.size());
        for (const auto& p : pop) evals.push_back(p.eval);
        const Ranking ranking = rank_population(evals, mode, eps);
        SplitMix64 rng(derive_stream(config.seed, gen, 0, tag));
        std::vector<MooPoint> offspring;
        offspring.reserve(n);
        for (int pair = 0; pair < n / 2; ++pair) {
            const int a = tournament(rng, ranking, n);
            const int b = tournament(rng, ranking, n);
            MooPoint c1, c2;
            sbx(rng, pop[a].position, pop[b].position, lower, upper,
                config.crossover_prob, config.crossover_index, c1.position,
                c2.position);
            polynomial_mutation(rng, c1.position, lower, upper, mutation_rate,
                                config.mutation_index);
            polynomial_mutation(rng, c2.position, lower, upper, mutation_rate,
                                config.mutation_index);
            offspring.push_back(std::move(c1));
            offspring.push_back(std::move(c2));
        }
        return offspring;
    };

    for (int gen = 1; gen <= max_generations; ++gen) {
        const std::int64_t used = problem.evaluations_used();
        if (used >= budget) break;
        const double eps = epsilon_schedule(epsilon0, used, budget,
                                            config.epsilon_decay);

        std::vector<MooPoint> offspring =
            make_offspring(main_pop, DominanceMode::Constrained, 0.0, gen, kVaryMain);
        std::vector<MooPoint> aux_offspring = make_offspring(
            aux_pop, DominanceMode::EpsilonRelaxed, eps, gen, kVaryAux);
        offspring.insert(offspring.end(),
                         std::make_move_iterator(aux_offspring.begin()),
                         std::make_move_iterator(aux_offspring.end()));

        const std::int64_t remaining = budget - used;
        const bool final_generation =
            remaining < static_cast<std::int64_t>(offspring.size());
        if (final_generation) offspring.resize(static_cast<std::size_t>(remaining));
        evaluate_all(offspring);

        std::vector<MooPoint> main_pool = main_pop;
        main_pool.insert(main_pool.end(), offspring.begin(), offspring.end());
        main_pop = environmental_selection(std::move(main_pool), n,
                                           DominanceMode::Constrained, 0.0);

        std::vector<MooPoint> aux_pool = std::move(aux_pop);
        aux_pool.insert(aux_pool.end(), offspring.begin(), offspring.end());
        aux_pop = environmental_selection(std::move(aux_pool), n,
                                          DominanceMode::EpsilonRelaxed, eps);

        record_progress(gen, eps);
        if (final_generation) break;
    }

    result.front = std::move(archive);
    result.evaluations_used = problem.evaluations_used();
    return result;
}

}  // namespace coalopt
