#pragma once

#include <string>
#include <vector>

#include "coalopt/config.hpp"

namespace coalopt {

/// One measured validation margin with its pass limit.
struct ValidationCheck {
    std::string suite;   // "theis", "superposition", "oracle-front"
    std::string name;
    double measured = 0.0;
    double limit = 0.0;
    bool passed = false;
    std::string detail;  // one human-readable line
};

/// Single-well finite-difference pressure rise against the Theis
/// line-source solution, on a fixed 50x50 km benchmark grid carrying the
/// scenario's rock and fluid properties; the observation point sits ten
/// cells from the well, ahead of any boundary influence. Limit: 5%.
std::vector<ValidationCheck> validate_theis(const ScenarioConfig& config);

/// Linearity: a two-well simulation against the superposition of the two
/// single-well simulations, same benchmark grid. Limit: 1e-8 relative.
std::vector<ValidationCheck> validate_superposition(const ScenarioConfig& config);

/// Brute-force Pareto oracle on the reduced problem: the scenario's first
/// two wells, one interval, and an exhaustive 21x21 rate lattice. The
/// weighted-sum front (increment 0.1, population 20, 1000 evaluations per
/// weight) must match or dominate every feasible lattice-front point
/// within one lattice cell in objective space, and stay feasible itself.
std::vector<ValidationCheck> validate_oracle_front(const ScenarioConfig& config);

/// Runs one suite by name, or all of them for "all". Throws
/// ValidationError on an unknown suite name.
std::vector<ValidationCheck> run_validation(const ScenarioConfig& config,
                                            const std::string& suite);

/// "[PASS] suite/name: measured .. (limit ..) — detail" for one check.
std::string format_check(const ValidationCheck& check);

}  // namespace coalopt
