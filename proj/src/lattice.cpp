#include "slnd/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slnd {

Rat det_q(QMat m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det_q: square matrix required");
    const int n = m.rows();
    Rat det(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (m(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return Rat(0);
        if (piv != c) {
            m.swap_rows(piv, c);
            det = -det;
        }
        det *= m(c, c);
        Rat inv = Rat(1) / m(c, c);
        for (int r = c + 1; r < n; ++r) {
            if (m(r, c) == 0) continue;
            Rat f = m(r, c) * inv;
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

QMat inverse_q(const QMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse_q: square matrix required");
    const int n = m.rows();
    QMat a = m;
    QMat inv = QMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (a(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("inverse_q: singular matrix");
        a.swap_rows(piv, c);
        inv.swap_rows(piv, c);
        Rat d = a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || a(r, c) == 0) continue;
            Rat f = a(r, c);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

int rank_q(QMat m) {
    int rank = 0;
    for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
        int piv = -1;
        for (int r = rank; r < m.rows(); ++r)
            if (m(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        m.swap_rows(piv, rank);
        for (int r = rank + 1; r < m.rows(); ++r) {
            if (m(r, c) == 0) continue;
            Rat f = m(r, c) / m(rank, c);
            for (int j = c; j < m.cols(); ++j) m(r, j) -= f * m(rank, j);
        }
        ++rank;
    }
    return rank;
}

bool in_row_span_q(const QMat& rows, const QMat& v_row) {
    if (v_row.rows() != 1 || v_row.cols() != rows.cols())
        throw std::invalid_argument("in_row_span_q: shape mismatch");
    QMat stacked(rows.rows() + 1, rows.cols());
    for (int i = 0; i < rows.rows(); ++i)
        for (int j = 0; j < rows.cols(); ++j) stacked(i, j) = rows(i, j);
    for (int j = 0; j < rows.cols(); ++j) stacked(rows.rows(), j) = v_row(0, j);
    return rank_q(stacked) == rank_q(rows);
}

IMat hnf_rows(const IMat& rows, IMat* transform, int* rank_out) {
    IMat m = rows;
    const int nr = m.rows();
    const int nc = m.cols();
    IMat u = IMat::identity(nr);

    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        // reduce the column below r until a single nonzero pivot remains
        for (;;) {
            int best = -1;
            for (int i = r; i < nr; ++i) {
                if (m(i, c) == 0) continue;
                if (best < 0 || abs_int(m(i, c)) < abs_int(m(best, c))) best = i;
            }
            if (best < 0) break;  // column is zero below r
            if (best != r) {
                m.swap_rows(best, r);
                u.swap_rows(best, r);
            }
            bool again = false;
            for (int i = r + 1; i < nr; ++i) {
                if (m(i, c) == 0) continue;
                Int q = fdiv(m(i, c), m(r, c));
                m.axpy_row(i, r, q);
                u.axpy_row(i, r, q);
                if (m(i, c) != 0) again = true;
            }
            if (!again) break;
        }
        if (r < nr && m(r, c) != 0) {
            if (m(r, c) < 0) {
                m.negate_row(r);
                u.negate_row(r);
            }
            for (int k = 0; k < r; ++k) {
                Int q = fdiv(m(k, c), m(r, c));
                m.axpy_row(k, r, q);
                u.axpy_row(k, r, q);
            }
            ++r;
        }
    }

    if (rank_out) *rank_out = r;
    if (transform) *transform = u;
    IMat h(r, nc);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < nc; ++j) h(i, j) = m(i, j);
    return h;
}

IMat left_kernel(const IMat& m) {
    IMat u;
    int rank = 0;
    hnf_rows(m, &u, &rank);
    IMat k(m.rows() - rank, m.rows());
    for (int i = rank; i < m.rows(); ++i)
        for (int j = 0; j < m.rows(); ++j) k(i - rank, j) = u(i, j);
    // canonicalize the kernel basis itself
    return hnf_rows(k);
}

LatticeModule LatticeModule::from_rows(int ambient_dim, const IMat& rows) {
    if (ambient_dim <= 0) throw std::invalid_argument("LatticeModule: ambient dimension must be positive");
    if (rows.rows() > 0 && rows.cols() != ambient_dim)
        throw std::invalid_argument("LatticeModule: inconsistent row length");
    IMat padded = rows;
    if (rows.rows() == 0) padded = IMat(0, ambient_dim);
    return LatticeModule(ambient_dim, hnf_rows(padded));
}

LatticeModule LatticeModule::from_rows(const std::vector<std::vector<long long>>& rows, int ambient_dim) {
    for (const auto& r : rows)
        if (int(r.size()) != ambient_dim) throw std::invalid_argument("LatticeModule: inconsistent row length");
    IMat m(int(rows.size()), ambient_dim);
    for (int i = 0; i < int(rows.size()); ++i)
        for (int j = 0; j < ambient_dim; ++j) m(i, j) = rows[i][j];
    return from_rows(ambient_dim, m);
}

LatticeModule LatticeModule::zero(int ambient_dim) { return from_rows(ambient_dim, IMat(0, ambient_dim)); }

LatticeModule LatticeModule::full(int ambient_dim) {
    return from_rows(ambient_dim, IMat::identity(ambient_dim));
}

LatticeModule lattice_sum(const LatticeModule& a, const LatticeModule& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw std::invalid_argument("lattice_sum: ambient dimension mismatch");
    IMat stacked(a.rank() + b.rank(), a.ambient_dim());
    for (int i = 0; i < a.rank(); ++i)
        for (int j = 0; j < a.ambient_dim(); ++j) stacked(i, j) = a.basis()(i, j);
    for (int i = 0; i < b.rank(); ++i)
        for (int j = 0; j < b.ambient_dim(); ++j) stacked(a.rank() + i, j) = b.basis()(i, j);
    return LatticeModule::from_rows(a.ambient_dim(), stacked);
}

LatticeModule lattice_intersect(const LatticeModule& a, const LatticeModule& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw std::invalid_argument("lattice_intersect: ambient dimension mismatch");
    const int n = a.ambient_dim();
    const int ra = a.rank(), rb = b.rank();
    if (ra == 0 || rb == 0) return LatticeModule::zero(n);
    // v = x·A = y·B  <=>  (x,y)·[A; -B] = 0
    IMat stacked(ra + rb, n);
    for (int i = 0; i < ra; ++i)
        for (int j = 0; j < n; ++j) stacked(i, j) = a.basis()(i, j);
    for (int i = 0; i < rb; ++i)
        for (int j = 0; j < n; ++j) stacked(ra + i, j) = -b.basis()(i, j);
    IMat z = left_kernel(stacked);
    IMat gens(z.rows(), n);
    for (int i = 0; i < z.rows(); ++i)
        for (int j = 0; j < n; ++j) {
            Int s = 0;
            for (int k = 0; k < ra; ++k) s += z(i, k) * a.basis()(k, j);
            gens(i, j) = s;
        }
    return LatticeModule::from_rows(n, gens);
}

LatticeModule saturate(const LatticeModule& a) {
    const int n = a.ambient_dim();
    if (a.rank() == 0) return a;
    if (a.rank() == n) return LatticeModule::full(n);
    // span_Q(a) ∩ Z^n = left kernel of the transposed right-kernel; integer
    // kernels of integer matrices are saturated, so applying them twice lands
    // on the primitive closure.
    IMat rk = left_kernel(a.basis().transposed());
    return LatticeModule::from_rows(n, left_kernel(rk.transposed()));
}

bool is_primitive(const LatticeModule& a) { return saturate(a) == a; }

Rat gram_det_sq(const QMat& rows) {
    const int r = rows.rows();
    if (r == 0) return Rat(1);
    QMat g(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            Rat s(0);
            for (int k = 0; k < rows.cols(); ++k) s += rows(i, k) * rows(j, k);
            g(i, j) = s;
        }
    return det_q(g);
}

Rat covolume_sq(const LatticeModule& a, const QMat& g) {
    if (g.rows() != a.ambient_dim() || g.cols() != a.ambient_dim())
        throw std::invalid_argument("covolume_sq: ambient dimension mismatch");
    if (a.rank() == 0) return Rat(1);
    return gram_det_sq(to_rat(a.basis()) * g);
}

double covolume(const LatticeModule& a, const QMat& g) {
    return std::sqrt(to_double(covolume_sq(a, g)));
}

double covolume(const LatticeModule& a, const Eigen::MatrixXd& g) {
    if (g.rows() != a.ambient_dim() || g.cols() != a.ambient_dim())
        throw std::invalid_argument("covolume: ambient dimension mismatch");
    if (a.rank() == 0) return 1.0;
    Eigen::MatrixXd m = to_eigen(a.basis()) * g;
    Eigen::MatrixXd gram = m * m.transpose();
    double det = gram.determinant();
    return det > 0 ? std::sqrt(det) : 0.0;
}

SubmodularityReport submodularity_check(const LatticeModule& a, const LatticeModule& b, const QMat& g) {
    if (!is_primitive(a) || !is_primitive(b))
        throw std::invalid_argument("submodularity_check: inputs must be primitive");
    LatticeModule meet = lattice_intersect(a, b);
    LatticeModule join = lattice_sum(a, b);  // possibly non-primitive, used as returned
    SubmodularityReport rep;
    rep.lhs_sq = covolume_sq(a, g) * covolume_sq(b, g);
    rep.rhs_sq = covolume_sq(meet, g) * covolume_sq(join, g);
    rep.lhs = std::sqrt(to_double(rep.lhs_sq));
    rep.rhs = std::sqrt(to_double(rep.rhs_sq));
    rep.holds = rep.lhs_sq >= rep.rhs_sq;
    return rep;
}

std::vector<uint32_t> k_subsets(int n, int k) {
    std::vector<uint32_t> out;
    if (k < 0 || k > n) return out;
    for (uint32_t mask = 0; mask < (1u << n); ++mask)
        if (__builtin_popcount(mask) == k) out.push_back(mask);
    return out;
}

Rat ExteriorVector::norm_sq() const {
    Rat s(0);
    for (const auto& [mask, c] : comps) s += c * c;
    return s;
}

double ExteriorVector::norm() const { return std::sqrt(to_double(norm_sq())); }

double ExteriorVector::sup_norm() const {
    double m = 0;
    for (const auto& [mask, c] : comps) m = std::max(m, std::abs(to_double(c)));
    return m;
}

ExteriorVector lambda_vector(const LatticeModule& a) {
    if (a.rank() == 0) throw std::invalid_argument("lambda_vector: rank-0 module");
    const int n = a.ambient_dim();
    const int r = a.rank();
    ExteriorVector v;
    v.n = n;
    v.degree = r;
    for (uint32_t mask : k_subsets(n, r)) {
        QMat minor(r, r);
        int col = 0;
        for (int j = 0; j < n; ++j) {
            if (!(mask & (1u << j))) continue;
            for (int i = 0; i < r; ++i) minor(i, col) = Rat(a.basis()(i, j));
            ++col;
        }
        Rat d = det_q(minor);
        if (d != 0) v.comps.emplace_back(mask, d);
    }
    if (!v.comps.empty() && v.comps.front().second < 0)
        for (auto& [mask, c] : v.comps) c = -c;
    return v;
}

}  // namespace slnd
