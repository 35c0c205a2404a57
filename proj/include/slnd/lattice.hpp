#pragma once

#include "slnd/smallmat.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace slnd {

/// A finitely generated subgroup of Z^n, stored as its row-style Hermite
/// normal form. The HNF is the unique canonical representative: two modules
/// are equal as subgroups of Z^n iff their stored bases compare equal.
/// Rank 0 (empty basis) is a legal value.
class LatticeModule {
public:
    LatticeModule() = default;

    /// Canonical form of the subgroup generated by the given rows.
    /// Dependent rows are absorbed. Throws on inconsistent row lengths.
    static LatticeModule from_rows(int ambient_dim, const IMat& rows);
    static LatticeModule from_rows(const std::vector<std::vector<long long>>& rows, int ambient_dim);
    static LatticeModule zero(int ambient_dim);
    static LatticeModule full(int ambient_dim);

    int ambient_dim() const { return ambient_; }
    int rank() const { return basis_.rows(); }
    const IMat& basis() const { return basis_; }

    bool operator==(const LatticeModule& o) const = default;

private:
    LatticeModule(int ambient, IMat hnf) : ambient_(ambient), basis_(std::move(hnf)) {}
    int ambient_ = 0;
    IMat basis_;  // rank x ambient, HNF rows
};

/// Row-style Hermite normal form: echelon rows with positive pivots and the
/// entries above each pivot reduced into [0, pivot). Zero rows are dropped.
/// If `transform` is non-null it receives a unimodular U with
/// U * input = [H; 0], whose trailing rows form a basis of the left kernel.
IMat hnf_rows(const IMat& rows, IMat* transform = nullptr, int* rank_out = nullptr);

/// Basis of { z : z * m = 0 } as rows; always a saturated (primitive) module.
IMat left_kernel(const IMat& m);

LatticeModule lattice_sum(const LatticeModule& a, const LatticeModule& b);
LatticeModule lattice_intersect(const LatticeModule& a, const LatticeModule& b);

/// The primitive module with the same rational span: span_Q(a) ∩ Z^n.
LatticeModule saturate(const LatticeModule& a);
bool is_primitive(const LatticeModule& a);

/// Squared covolume of the translated module a·g, as an exact rational.
/// Rank 0 yields 1 (empty product convention).
Rat covolume_sq(const LatticeModule& a, const QMat& g);

/// Squared covolume of a module given by arbitrary rational rows (used for
/// modules like Λ_W·ξ that are not integral).
Rat gram_det_sq(const QMat& rows);

double covolume(const LatticeModule& a, const QMat& g);
double covolume(const LatticeModule& a, const Eigen::MatrixXd& g);

struct SubmodularityReport {
    Rat lhs_sq, rhs_sq;  // squares of ‖A‖g·‖B‖g and ‖A∩B‖g·‖A+B‖g
    double lhs, rhs;
    bool holds;  // lhs >= rhs, compared exactly on the squares
};

/// Checks ‖A‖g·‖B‖g >= ‖A∩B‖g·‖A+B‖g for primitive A, B.
/// Rejects non-primitive inputs.
SubmodularityReport submodularity_check(const LatticeModule& a, const LatticeModule& b, const QMat& g);

/// Exterior vector: components over k-element index subsets of {0..n-1},
/// ordered by bitmask value (colexicographic on subsets). Only nonzero
/// components are stored.
struct ExteriorVector {
    int n = 0;
    int degree = 0;
    std::vector<std::pair<uint32_t, Rat>> comps;  // sorted by mask

    bool is_zero() const { return comps.empty(); }
    Rat norm_sq() const;
    double norm() const;
    double sup_norm() const;
};

/// Degree-r wedge of the basis rows, components as r×r minors, sign
/// canonicalized so the first nonzero component (mask order) is positive.
/// Throws on rank-0 input.
ExteriorVector lambda_vector(const LatticeModule& a);

/// All k-element subsets of {0..n-1} as bitmasks in increasing (colex) order.
std::vector<uint32_t> k_subsets(int n, int k);

}  // namespace slnd
