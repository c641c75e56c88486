#pragma once

#include <vector>

#include "coalopt/reservoir.hpp"

// Shared desk-scale test fixtures: a homogeneous 200 mD aquifer at 1 km
// depth with hydrostatic initial pressure and a 0.75 initial
// pressure-over-overburden ratio.

namespace testmodels {

inline coalopt::ReservoirModel uniform_aquifer(int nx, int ny,
                                               std::vector<coalopt::WellSpec> wells,
                                               double dx_m = 1000.0,
                                               int substeps_per_interval = 12) {
    auto m = coalopt::ReservoirModel::uniform(
        nx, ny, dx_m, dx_m, /*thickness=*/100.0,
        /*permeability=*/1.9738466e-13, /*porosity=*/0.2,
        /*viscosity=*/6.0e-4, /*compressibility=*/1.0e-9,
        /*co2 density=*/700.0, /*initial pressure=*/9.81e6,
        /*overburden=*/1.308e7);
    m.wells = std::move(wells);
    m.substeps_per_interval = substeps_per_interval;
    return m;
}

/// Three asymmetrically placed wells on a 50x50 grid, one per agent.
inline coalopt::ReservoirModel three_well_aquifer() {
    return uniform_aquifer(50, 50,
                           {{0, 12, 12}, {1, 25, 30}, {2, 38, 12}});
}

}  // namespace testmodels
