#include "coalopt/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "coalopt/errors.hpp"

namespace coalopt {

namespace {

/// Drops weakly dominated and duplicate points (maximization).
std::vector<std::vector<double>> pareto_subset(std::vector<std::vector<double>> pts) {
    std::vector<std::vector<double>> kept;
    for (const auto& p : pts) {
        bool dominated = false;
        for (const auto& q : kept) {
            bool q_ge = true;
            for (std::size_t k = 0; k < p.size(); ++k)
                if (q[k] < p[k]) { q_ge = false; break; }
            if (q_ge) { dominated = true; break; }
        }
        if (dominated) continue;
        kept.erase(std::remove_if(kept.begin(), kept.end(),
                                  [&](const std::vector<double>& q) {
                                      for (std::size_t k = 0; k < p.size(); ++k)
                                          if (p[k] < q[k]) return false;
                                      return true;
                                  }),
                   kept.end());
        kept.push_back(p);
    }
    return kept;
}

double hv2(std::vector<std::vector<double>> pts, double r1, double r2) {
    pts = pareto_subset(std::move(pts));
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a[0] > b[0]; });
    double hv = 0.0;
    double covered = r2;
    for (const auto& p : pts) {
        if (p[1] > covered) {
            hv += (p[0] - r1) * (p[1] - covered);
            covered = p[1];
        }
    }
    return hv;
}

double hv_impl(std::vector<std::vector<double>> pts, std::span<const double> ref) {
    if (pts.empty()) return 0.0;
    const std::size_t m = ref.size();
    if (m == 1) {
        double best = ref[0];
        for (const auto& p : pts) best = std::max(best, p[0]);
        return best - ref[0];
    }
    if (m == 2) return hv2(std::move(pts), ref[0], ref[1]);
    // m == 3: slice along the third objective from the top.
    std::vector<double> levels;
    for (const auto& p : pts) levels.push_back(p[2]);
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    double hv = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double top = levels[k];
        const double bottom = k + 1 < levels.size() ? levels[k + 1] : ref[2];
        std::vector<std::vector<double>> slab;
        for (const auto& p : pts)
            if (p[2] >= top) slab.push_back({p[0], p[1]});
        hv += hv2(std::move(slab), ref[0], ref[1]) * (top - bottom);
    }
    return hv;
}

void check_shapes(const std::vector<std::vector<double>>& points,
                  std::span<const double> ref) {
    if (ref.empty() || ref.size() > 3)
        throw ValidationError("hypervolume supports one to three objectives");
    for (double r : ref)
        if (!std::isfinite(r)) throw ValidationError("reference must be finite");
    for (const auto& p : points) {
        if (p.size() != ref.size())
            throw ValidationError("point dimension does not match the reference");
        for (double v : p)
            if (!std::isfinite(v)) throw ValidationError("points must be finite");
    }
}

}  // namespace

double hypervolume(const std::vector<std::vector<double>>& points,
                   std::span<const double> reference) {
    check_shapes(points, reference);
    for (const auto& p : points)
        for (std::size_t k = 0; k < reference.size(); ++k)
            if (p[k] < reference[k])
                throw ValidationError(
                    "every front point must weakly dominate the reference");
    return hv_impl(points, reference);
}

double hypervolume_clipped(const std::vector<std::vector<double>>& points,
                           std::span<const double> reference) {
    check_shapes(points, reference);
    std::vector<std::vector<double>> kept;
    for (const auto& p : points) {
        bool ok = true;
        for (std::size_t k = 0; k < reference.size(); ++k)
            if (p[k] < reference[k]) { ok = false; break; }
        if (ok) kept.push_back(p);
    }
    return hv_impl(std::move(kept), reference);
}

}  // namespace coalopt
