#pragma once

#include "slnd/execmode.hpp"
#include "slnd/lattice.hpp"
#include "slnd/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace slnd {

/// Random proper-rank primitive submodule of Z^n, entries seeded small.
LatticeModule random_primitive_module(int n, Rng& rng);

/// Random rational unimodular matrix: a short product of elementary shears
/// with small rational coefficients (determinant exactly one).
QMat random_unimodular_rational(int n, Rng& rng);

/// Random float SL_n element: normal entries renormalized to det one.
Eigen::MatrixXd random_sl(int n, Rng& rng);

struct FuzzViolation {
    long index;
    std::string a, b, g;
};

struct FuzzReport {
    int n = 0;
    long pairs = 0;
    long violations = 0;
    double min_ratio = 1;  // min over pairs of lhs/rhs (1 when rhs == lhs)
    std::optional<FuzzViolation> first_violation;
};

/// Submodularity fuzz: `pairs` random primitive pairs with random unimodular
/// rational translations, checked with exact squared-covolume comparison.
/// Deterministic given (n, seed); identical output for both exec modes.
FuzzReport fuzz_submodularity(int n, long pairs, uint64_t seed, ExecMode mode = ExecMode::parallel);

}  // namespace slnd
