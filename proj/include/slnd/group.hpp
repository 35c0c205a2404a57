#pragma once

#include "slnd/lattice.hpp"

#include <cstdint>
#include <vector>

namespace slnd {

// Two numeric layers. The exact layer carries rational matrices with det == 1
// checked exactly; the float layer is Eigen with |det - 1| <= 1e-9. Lattices
// are sets of integer row vectors and every group element acts on the right
// (row · g); composing actions "apply a, then b" right-multiplies by a·b.

class GroupElementQ {
public:
    explicit GroupElementQ(QMat m);
    static GroupElementQ identity(int n);

    int dim() const { return m_.rows(); }
    const QMat& mat() const { return m_; }
    GroupElementQ inverse() const;
    Eigen::MatrixXd to_float() const { return to_eigen(m_); }
    bool is_integral() const;

    friend GroupElementQ operator*(const GroupElementQ& a, const GroupElementQ& b) {
        return GroupElementQ(a.m_ * b.m_);
    }

private:
    QMat m_;
};

class GroupElementD {
public:
    explicit GroupElementD(Eigen::MatrixXd m, double det_tol = 1e-9);
    static GroupElementD identity(int n);

    int dim() const { return int(m_.rows()); }
    const Eigen::MatrixXd& mat() const { return m_; }

private:
    Eigen::MatrixXd m_;
};

/// Trace-zero matrix; trace checked to 1e-12.
class LieAlgebraElement {
public:
    explicit LieAlgebraElement(Eigen::MatrixXd m);
    int dim() const { return int(m_.rows()); }
    const Eigen::MatrixXd& mat() const { return m_; }

private:
    Eigen::MatrixXd m_;
};

/// Matrix exponential by scaling-and-squaring on the Taylor series.
Eigen::MatrixXd exp_lie(const LieAlgebraElement& x);
Eigen::MatrixXd exp_series(const Eigen::MatrixXd& x);

/// Integer weight vector of a one-parameter diagonal subgroup; entries sum
/// to zero, so diag(t^{w_1},...,t^{w_n}) has determinant one for every t.
class Cocharacter {
public:
    explicit Cocharacter(std::vector<int64_t> weights);
    int dim() const { return int(w_.size()); }
    const std::vector<int64_t>& weights() const { return w_; }
    Cocharacter negated() const;
    bool operator==(const Cocharacter& o) const = default;

private:
    std::vector<int64_t> w_;
};

/// diag(t^{w_1},...,t^{w_n}) for t > 0, exact for rational t.
GroupElementQ cocharacter_at(const Cocharacter& a, const Rat& t);
Eigen::MatrixXd cocharacter_at(const Cocharacter& a, double t);

/// k-th compound matrix: entries are the k×k minors of g, rows/columns
/// indexed by k-subsets in mask (colex) order. Row vectors of ∧^k transform
/// by right multiplication, and the compound of a product is the product of
/// compounds.
QMat exterior_action(const QMat& g, int k);
Eigen::MatrixXd exterior_action(const Eigen::MatrixXd& g, int k);

/// Applies the degree-k exterior action of g to v (row convention).
ExteriorVector apply_exterior(const ExteriorVector& v, const QMat& g);

/// Torus weights of the nonzero components: the 0/1 indicator vector of each
/// index subset with a nonzero coefficient. Throws on the zero vector.
std::vector<std::vector<int64_t>> weight_support(const ExteriorVector& v);

}  // namespace slnd
