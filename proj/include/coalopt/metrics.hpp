#pragma once

#include <span>
#include <vector>

namespace coalopt {

/// Exact hypervolume (maximization) dominated by `points` with respect to
/// `reference`, for one to three objectives. Every point must weakly
/// dominate the reference (each coordinate >= the reference coordinate);
/// throws ValidationError otherwise.
double hypervolume(const std::vector<std::vector<double>>& points,
                   std::span<const double> reference);

/// Same computation, but points that fail to dominate the reference are
/// dropped instead of rejected (used for progress metrics where the archive
/// may still straddle the reference).
double hypervolume_clipped(const std::vector<std::vector<double>>& points,
                           std::span<const double> reference);

}  // namespace coalopt
