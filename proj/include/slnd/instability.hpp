#pragma once

#include "slnd/group.hpp"
#include "slnd/parabolic.hpp"

#include <optional>
#include <vector>

namespace slnd {

/// A formal direct sum of exterior vectors (the vectors ⊕ v_i destabilized
/// in the flag constructions). Each summand keeps its own degree; the torus
/// weight of a component is the indicator vector of its index subset.
struct WeightedVector {
    int n = 0;
    std::vector<ExteriorVector> summands;

    bool is_zero() const;
};

std::vector<std::vector<int64_t>> weight_support(const WeightedVector& v);

/// Coordinates of the ambient direct sum are addressed by (summand, mask).
struct VectorCoord {
    int summand;
    uint32_t mask;
    auto operator<=>(const VectorCoord&) const = default;
};

struct Monomial {
    Rat coeff = Rat(1);
    std::vector<std::pair<VectorCoord, int>> powers;
};

struct Polynomial {
    std::vector<Monomial> terms;

    Rat eval(const WeightedVector& v) const;
};

/// All monic monomials of total degree in [1, max_degree] whose diagonal
/// torus weight is a multiple of (1,...,1), i.e. the zero-weight monomials
/// of SL_n. `degrees` lists the exterior degree of each summand.
std::vector<Polynomial> torus_zero_weight_monomials(int n, const std::vector<int>& degrees,
                                                    int max_degree);

/// True iff every generator vanishes at v, exactly.
bool invariant_vanish_test(const WeightedVector& v, const std::vector<Polynomial>& generators);

struct TorusInstabilityResult {
    std::optional<Cocharacter> destabilizing;  // <w,b> <= -1 on the whole support
    // when stable: convex combination of support weights lying on the line
    // R·(1,...,1) — the hull certificate of LP infeasibility
    std::vector<Rat> hull_coefficients;
    Rat hull_level;
};

/// Hilbert–Mumford test for the diagonal torus: looks for an integer
/// cocharacter contracting every support weight via exact LP feasibility.
TorusInstabilityResult torus_instability(const WeightedVector& v);

/// A cocharacter contracting a family of root vectors simultaneously
/// (weights must be roots e_i - e_j of a common unipotent radical; the
/// stacked LP decides whether such a radical exists).
Cocharacter flag_cocharacter(const std::vector<std::vector<int64_t>>& root_weights);

/// A nearby cocharacter with pairwise distinct weights whose parabolic is a
/// Borel refining P_{b_t}; deterministic tie-breaking, order preserving.
Cocharacter generic_perturbation(const Cocharacter& b, const StandardParabolic& p_target);

/// Calibration of the invariant-vanishing threshold: the smallest nonzero
/// |f(v)| over the generators and all integral vectors of the given shape
/// with components bounded by `bound`. Relative to the generator set.
Rat epsilon1_calibration(const std::vector<Polynomial>& generators, int n,
                         const std::vector<int>& degrees, int bound);

}  // namespace slnd
