#pragma once

#include "slnd/rational.hpp"

#include <vector>

namespace slnd {

/// Outcome of an exact rational feasibility problem
///   A x <= b,  C x = d.
/// When infeasible, the Farkas certificate satisfies
///   lam >= 0,  lam^T A + mu^T C = 0,  lam^T b + mu^T d < 0.
struct LpFeasibility {
    bool feasible = false;
    std::vector<Rat> x;
    std::vector<Rat> ineq_multipliers;  // lam
    std::vector<Rat> eq_multipliers;    // mu
};

/// Phase-1 simplex over exact rationals with Bland's rule.
LpFeasibility lp_feasible(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                          const std::vector<std::vector<Rat>>& c = {},
                          const std::vector<Rat>& d = {});

}  // namespace slnd
