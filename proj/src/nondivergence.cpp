#include "slnd/nondivergence.hpp"

#include "slnd/parabolic.hpp"
#include "slnd/parallel_for.hpp"
#include "slnd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace slnd {

// ---------------------------------------------------------------- window

Window Window::symmetric(int dim, double c) {
    Window w;
    for (int i = 0; i < dim; ++i) w.box.emplace_back(-c, c);
    return w;
}

void Window::validate() const {
    for (auto [lo, hi] : box)
        if (!(lo < hi)) throw std::invalid_argument("Window: empty box");
}

std::vector<double> Window::point(const std::vector<double>& unit) const {
    if (unit.size() != box.size()) throw std::invalid_argument("Window::point: dimension mismatch");
    std::vector<double> x(box.size());
    for (size_t i = 0; i < box.size(); ++i)
        x[i] = box[i].first + (box[i].second - box[i].first) * unit[i];
    return x;
}

// ---------------------------------------------------------------- subgroup

void SubgroupSpec::validate() const {
    if (n < 2) throw std::invalid_argument("SubgroupSpec: n >= 2 required");
    if (int(lie_basis.size()) != window.dim())
        throw std::invalid_argument("SubgroupSpec: window dimension must match the lie basis");
    window.validate();
    for (const auto& x : lie_basis) {
        if (x.rows() != n || x.cols() != n)
            throw std::invalid_argument("SubgroupSpec: lie basis element of wrong size");
        if (std::abs(x.trace()) > 1e-12)
            throw std::invalid_argument("SubgroupSpec: lie basis element has nonzero trace");
    }
    if (!lie_basis.empty()) {
        // independence over Q (entries of a double matrix are exact rationals)
        QMat rows(int(lie_basis.size()), n * n);
        for (int b = 0; b < int(lie_basis.size()); ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) rows(b, i * n + j) = rat_from_double(lie_basis[b](i, j));
        if (rank_q(rows) != int(lie_basis.size()))
            throw std::invalid_argument("SubgroupSpec: lie basis is linearly dependent");
    }
    if (h0.size() != 0) {
        if (h0.rows() != n || h0.cols() != n)
            throw std::invalid_argument("SubgroupSpec: base point of wrong size");
        if (std::abs(h0.determinant() - 1.0) > 1e-9)
            throw std::invalid_argument("SubgroupSpec: base point not in SL_n");
    }
}

Eigen::MatrixXd SubgroupSpec::base_point() const {
    if (h0.size() == 0) return Eigen::MatrixXd::Identity(n, n);
    return h0;
}

Eigen::MatrixXd SubgroupSpec::element_at(const std::vector<double>& x) const {
    if (int(x.size()) != window.dim())
        throw std::invalid_argument("SubgroupSpec::element_at: coordinate dimension mismatch");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (size_t i = 0; i < x.size(); ++i) a += x[i] * lie_basis[i];
    return base_point() * exp_series(a);
}

// ------------------------------------------------------- stable subspaces

namespace {

IMat integerize_rows(const QMat& rows) {
    IMat out(rows.rows(), rows.cols());
    for (int i = 0; i < rows.rows(); ++i) {
        Int scale(1);
        for (int j = 0; j < rows.cols(); ++j)
            scale = lcm_int(scale, boost::multiprecision::denominator(rows(i, j)));
        for (int j = 0; j < rows.cols(); ++j) {
            Rat v = rows(i, j) * Rat(scale);
            out(i, j) = boost::multiprecision::numerator(v);
        }
    }
    return out;
}

LatticeModule module_from_rational_rows(int n, const QMat& rows) {
    return saturate(LatticeModule::from_rows(n, integerize_rows(rows)));
}

bool span_invariant(const LatticeModule& w, const std::vector<QMat>& gens) {
    if (w.rank() == 0 || w.rank() == w.ambient_dim()) return true;
    QMat base = to_rat(w.basis());
    int r = rank_q(base);
    for (const QMat& g : gens) {
        QMat moved = base * g;
        QMat stacked(base.rows() + moved.rows(), base.cols());
        for (int i = 0; i < base.rows(); ++i)
            for (int j = 0; j < base.cols(); ++j) stacked(i, j) = base(i, j);
        for (int i = 0; i < moved.rows(); ++i)
            for (int j = 0; j < base.cols(); ++j) stacked(base.rows() + i, j) = moved(i, j);
        if (rank_q(stacked) != r) return false;
    }
    return true;
}

std::string module_to_string(const LatticeModule& w) {
    std::string s = "[";
    for (int i = 0; i < w.rank(); ++i) {
        s += i ? "; " : "";
        for (int j = 0; j < w.ambient_dim(); ++j) s += (j ? "," : "") + w.basis()(i, j).str();
    }
    return s + "]";
}

StableFamily torus_family(int n, const std::vector<int64_t>& weights) {
    if (int(weights.size()) != n) throw std::invalid_argument("stable_subspaces: torus weight length");
    std::map<int64_t, std::vector<int>> classes;
    for (int i = 0; i < n; ++i) classes[weights[i]].push_back(i);
    std::vector<std::vector<int>> cls;
    for (auto& [w, idx] : classes) cls.push_back(idx);

    StableFamily fam;
    const int m = int(cls.size());
    for (uint32_t mask = 1; mask + 1 < (1u << m); ++mask) {
        std::vector<std::vector<long long>> rows;
        for (int c = 0; c < m; ++c) {
            if (!(mask & (1u << c))) continue;
            for (int coord : cls[c]) {
                std::vector<long long> e(n, 0);
                e[coord] = 1;
                rows.push_back(e);
            }
        }
        fam.modules.push_back(LatticeModule::from_rows(rows, n));
    }
    if (m == 1)
        throw std::invalid_argument("stable_subspaces: torus acts by a single weight, no proper stable subspace");
    std::sort(fam.modules.begin(), fam.modules.end(),
              [](const LatticeModule& a, const LatticeModule& b) {
                  if (a.rank() != b.rank()) return a.rank() < b.rank();
                  return module_to_string(a) < module_to_string(b);
              });
    for (const auto& c : cls)
        if (c.size() >= 2) {
            std::vector<std::vector<long long>> rows;
            for (int coord : c) {
                std::vector<long long> e(n, 0);
                e[coord] = 1;
                rows.push_back(e);
            }
            fam.infinite_strata.push_back(LatticeModule::from_rows(rows, n));
        }
    return fam;
}

// -- algebra closure machinery

std::vector<QMat> exact_generators(const SubgroupSpec& h) {
    std::vector<QMat> gens;
    for (const auto& x : h.lie_basis) gens.push_back(rat_from_eigen(x));
    return gens;
}

std::vector<Rat> vectorize(const QMat& m) {
    std::vector<Rat> v;
    v.reserve(size_t(m.rows()) * m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
    return v;
}

// maintains a rational row space with rank queries
struct RatRowSpace {
    std::vector<std::vector<Rat>> rref;

    bool insert(std::vector<Rat> v) {
        for (const auto& row : rref) {
            // find the pivot of row
            size_t p = 0;
            while (p < row.size() && row[p] == 0) ++p;
            if (p == row.size()) continue;
            if (v[p] != 0) {
                Rat f = v[p] / row[p];
                for (size_t j = 0; j < v.size(); ++j) v[j] -= f * row[j];
            }
        }
        bool nonzero = false;
        for (const auto& x : v)
            if (x != 0) nonzero = true;
        if (nonzero) rref.push_back(std::move(v));
        return nonzero;
    }
};

/// span of all words in the generators plus the identity (the unital algebra)
std::vector<QMat> algebra_basis(int n, const std::vector<QMat>& gens) {
    std::vector<QMat> basis;
    RatRowSpace space;
    std::vector<QMat> queue{QMat::identity(n)};
    for (const auto& g : gens) queue.push_back(g);
    size_t head = 0;
    while (head < queue.size()) {
        QMat m = queue[head++];
        if (!space.insert(vectorize(m))) continue;
        basis.push_back(m);
        if (basis.size() > size_t(n) * n) throw std::logic_error("algebra_basis: dimension overflow");
        for (const auto& g : gens) queue.push_back(m * g);
    }
    return basis;
}

LatticeModule right_image(int n, const QMat& x) {
    return saturate(LatticeModule::from_rows(n, integerize_rows(x)));
}

LatticeModule right_kernel_mod(int n, const QMat& x) {
    // {v : v x = 0}; scaling x by a positive integer keeps the kernel
    Int s(1);
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) s = lcm_int(s, boost::multiprecision::denominator(x(i, j)));
    IMat xi(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j)
            xi(i, j) = boost::multiprecision::numerator(x(i, j) * Rat(s));
    return LatticeModule::from_rows(n, left_kernel(xi));
}

LatticeModule preimage_mod(int n, const LatticeModule& w, const QMat& x) {
    // {v : v x in span w}
    if (w.rank() == n) return LatticeModule::full(n);
    IMat comp = left_kernel(w.basis().transposed());  // orthogonal complement rows
    QMat proj = x * to_rat(comp.transposed());        // n x (n - r)
    return right_kernel_mod(n, proj);
}

LatticeModule invariant_closure(const LatticeModule& w, const std::vector<QMat>& gens) {
    LatticeModule cur = saturate(w);
    for (int guard = 0; guard <= cur.ambient_dim() + 1; ++guard) {
        LatticeModule next = cur;
        for (const QMat& g : gens)
            next = lattice_sum(next, module_from_rational_rows(cur.ambient_dim(), to_rat(cur.basis()) * g));
        next = saturate(next);
        if (next == cur) return cur;
        cur = next;
    }
    throw std::logic_error("invariant_closure: did not stabilize");
}

LatticeModule largest_invariant_inside(const LatticeModule& w, const std::vector<QMat>& gens) {
    LatticeModule cur = saturate(w);
    for (int guard = 0; guard <= cur.ambient_dim() + 1; ++guard) {
        LatticeModule next = cur;
        for (const QMat& g : gens) next = lattice_intersect(next, preimage_mod(cur.ambient_dim(), cur, g));
        if (next == cur) return cur;
        cur = next;
    }
    throw std::logic_error("largest_invariant_inside: did not stabilize");
}

std::vector<Int> small_divisors(const Int& x, int limit = 200000) {
    std::vector<Int> divs;
    Int a = abs_int(x);
    if (a == 0 || a > Int(1000000000000LL)) return divs;
    for (Int d = 1; d * d <= a && d <= limit; ++d) {
        if (a % d != 0) continue;
        divs.push_back(d);
        divs.push_back(a / d);
    }
    return divs;
}

std::vector<Rat> minimal_polynomial(int n, const QMat& a) {
    // coefficients c_0..c_d with sum c_k A^k = 0, c_d = 1
    std::vector<QMat> powers{QMat::identity(n)};
    for (int d = 1; d <= n; ++d) {
        powers.push_back(powers.back() * a);
        // does A^d lie in the span of lower powers?
        QMat rows(d + 1, n * n);
        for (int k = 0; k <= d; ++k) {
            auto v = vectorize(powers[k]);
            for (int j = 0; j < n * n; ++j) rows(k, j) = v[j];
        }
        if (rank_q(rows) == d + 1) continue;
        // solve sum_{k<d} c_k A^k = -A^d by elimination on the transpose
        QMat sys(n * n, d + 1);
        for (int k = 0; k < d; ++k) {
            auto v = vectorize(powers[k]);
            for (int j = 0; j < n * n; ++j) sys(j, k) = v[j];
        }
        auto vd = vectorize(powers[d]);
        for (int j = 0; j < n * n; ++j) sys(j, d) = -vd[j];
        // gaussian elimination, back substitution
        int row = 0;
        std::vector<int> pivot_col(d, -1);
        for (int c = 0; c < d && row < n * n; ++c) {
            int piv = -1;
            for (int r = row; r < n * n; ++r)
                if (sys(r, c) != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) continue;
            sys.swap_rows(piv, row);
            for (int r = 0; r < n * n; ++r) {
                if (r == row || sys(r, c) == 0) continue;
                Rat f = sys(r, c) / sys(row, c);
                for (int j = c; j <= d; ++j) sys(r, j) -= f * sys(row, j);
            }
            pivot_col[c] = row;
            ++row;
        }
        std::vector<Rat> coeff(d + 1, Rat(0));
        coeff[d] = Rat(1);
        for (int c = 0; c < d; ++c)
            if (pivot_col[c] >= 0) coeff[c] = sys(pivot_col[c], d) / sys(pivot_col[c], c);
        return coeff;
    }
    throw std::logic_error("minimal_polynomial: no relation found");
}

std::vector<Rat> rational_roots(const std::vector<Rat>& coeff) {
    // scale to integer coefficients
    Int scale(1);
    for (const Rat& c : coeff) scale = lcm_int(scale, boost::multiprecision::denominator(c));
    std::vector<Int> ic;
    for (const Rat& c : coeff) ic.push_back(boost::multiprecision::numerator(c * Rat(scale)));
    int lead = int(ic.size()) - 1;
    while (lead > 0 && ic[lead] == 0) --lead;
    int low = 0;
    while (low < lead && ic[low] == 0) ++low;
    std::set<Rat> roots;
    if (low > 0) roots.insert(Rat(0));
    if (low == lead) return {roots.begin(), roots.end()};
    auto ps = small_divisors(ic[low]);
    auto qs = small_divisors(ic[lead]);
    auto eval = [&](const Rat& x) {
        Rat v(0);
        for (int k = lead; k >= 0; --k) v = v * x + Rat(ic[k]);
        return v;
    };
    for (const Int& p : ps)
        for (const Int& q : qs)
            for (int s : {1, -1}) {
                Rat cand(s * p, q);
                if (eval(cand) == 0) roots.insert(cand);
            }
    return {roots.begin(), roots.end()};
}

std::optional<std::vector<Rat>> solve_in_span(const QMat& rows, const std::vector<Rat>& target) {
    // coefficients c with c · rows = target
    const int m = rows.rows(), n = rows.cols();
    QMat sys(n, m + 1);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) sys(j, i) = rows(i, j);
        sys(j, m) = target[j];
    }
    int row = 0;
    std::vector<int> pivot_row(m, -1);
    for (int c = 0; c < m && row < n; ++c) {
        int piv = -1;
        for (int r = row; r < n; ++r)
            if (sys(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        sys.swap_rows(piv, row);
        for (int r = 0; r < n; ++r) {
            if (r == row || sys(r, c) == 0) continue;
            Rat f = sys(r, c) / sys(row, c);
            for (int j = c; j <= m; ++j) sys(r, j) -= f * sys(row, j);
        }
        pivot_row[c] = row;
        ++row;
    }
    // consistency: rows below the pivots must have zero rhs
    for (int r = row; r < n; ++r)
        if (sys(r, m) != 0) return std::nullopt;
    std::vector<Rat> c(m, Rat(0));
    for (int col = 0; col < m; ++col)
        if (pivot_row[col] >= 0) c[col] = sys(pivot_row[col], m) / sys(pivot_row[col], col);
    return c;
}

bool module_contains(const LatticeModule& big, const LatticeModule& small) {
    if (small.rank() > big.rank()) return false;
    QMat base = to_rat(big.basis());
    for (int i = 0; i < small.rank(); ++i) {
        QMat v(1, small.ambient_dim());
        for (int j = 0; j < small.ambient_dim(); ++j) v(0, j) = Rat(small.basis()(i, j));
        if (!in_row_span_q(base, v)) return false;
    }
    return true;
}

/// throws when some subquotient of rank >= 2 carries a scalar action
void detect_infinite_lattice(int n, const std::vector<LatticeModule>& invariant,
                             const std::vector<QMat>& gens) {
    std::vector<LatticeModule> all = invariant;
    all.push_back(LatticeModule::zero(n));
    all.push_back(LatticeModule::full(n));
    for (const auto& v0 : all)
        for (const auto& v1 : all) {
            int gap = v1.rank() - v0.rank();
            if (gap < 2 || !module_contains(v1, v0)) continue;
            // lift a quotient basis: rows of v1 extending span(v0)
            QMat stack(v0.rank(), n);
            for (int i = 0; i < v0.rank(); ++i)
                for (int j = 0; j < n; ++j) stack(i, j) = Rat(v0.basis()(i, j));
            std::vector<int> lift;
            for (int i = 0; i < v1.rank(); ++i) {
                QMat cand(stack.rows() + 1, n);
                for (int r = 0; r < stack.rows(); ++r)
                    for (int j = 0; j < n; ++j) cand(r, j) = stack(r, j);
                for (int j = 0; j < n; ++j) cand(stack.rows(), j) = Rat(v1.basis()(i, j));
                if (rank_q(cand) > rank_q(stack)) {
                    stack = cand;
                    lift.push_back(i);
                }
            }
            if (int(lift.size()) != gap) continue;
            bool scalar = true;
            std::optional<Rat> lambda;
            for (const QMat& g : gens) {
                for (int qi = 0; qi < gap && scalar; ++qi) {
                    std::vector<Rat> moved(n);
                    for (int j = 0; j < n; ++j) {
                        Rat s(0);
                        for (int c = 0; c < n; ++c) s += Rat(v1.basis()(lift[qi], c)) * g(c, j);
                        moved[j] = s;
                    }
                    auto coeff = solve_in_span(stack, moved);
                    if (!coeff) {
                        scalar = false;
                        break;
                    }
                    // quotient block: coefficients on the lifted rows
                    for (int qj = 0; qj < gap; ++qj) {
                        Rat c = (*coeff)[v0.rank() + qj];
                        if (qj == qi) {
                            if (lambda && c != *lambda) scalar = false;
                            if (!lambda) lambda = c;
                        } else if (c != 0) {
                            scalar = false;
                        }
                    }
                }
                if (scalar) lambda.reset();  // each generator may have its own scalar
            }
            if (scalar)
                throw std::domain_error(
                    "stable_subspaces: invariant-subspace lattice is infinite; generators act by "
                    "scalars on the rank-" +
                    std::to_string(gap) + " repeated-weight stratum " + module_to_string(v1) +
                    " over " + module_to_string(v0));
        }
}

std::vector<LatticeModule> algebra_closure_subspaces(const SubgroupSpec& h) {
    const int n = h.n;
    std::vector<QMat> gens = exact_generators(h);
    if (gens.empty()) throw std::invalid_argument("stable_subspaces: empty lie basis");
    std::vector<QMat> alg = algebra_basis(n, gens);

    std::set<std::string> seen;
    std::vector<LatticeModule> pool;
    auto add = [&](const LatticeModule& w) {
        if (w.rank() == 0 || w.rank() == n) return false;
        if (seen.insert(module_to_string(w)).second) {
            pool.push_back(w);
            return true;
        }
        return false;
    };

    for (const QMat& a : alg) {
        add(right_image(n, a));
        add(right_kernel_mod(n, a));
        for (const Rat& lam : rational_roots(minimal_polynomial(n, a))) {
            QMat shifted = a;
            for (int i = 0; i < n; ++i) shifted(i, i) -= lam;
            QMat power = QMat::identity(n);
            for (int e = 1; e <= n; ++e) {
                power = power * shifted;
                add(right_image(n, power));
                add(right_kernel_mod(n, power));
            }
        }
    }

    // close under sum, intersection and invariant interior/closure
    for (int round = 0; round < 8; ++round) {
        bool grew = false;
        std::vector<LatticeModule> snapshot = pool;
        for (const auto& w : snapshot) {
            grew |= add(invariant_closure(w, gens));
            grew |= add(largest_invariant_inside(w, gens));
        }
        snapshot = pool;
        for (size_t i = 0; i < snapshot.size(); ++i)
            for (size_t j = i + 1; j < snapshot.size(); ++j) {
                grew |= add(lattice_sum(snapshot[i], snapshot[j]));
                grew |= add(lattice_intersect(snapshot[i], snapshot[j]));
            }
        if (pool.size() > 300)
            throw std::domain_error("stable_subspaces: invariant lattice too large to enumerate");
        if (!grew) break;
    }

    std::vector<LatticeModule> invariant;
    for (const auto& w : pool)
        if (span_invariant(w, gens)) invariant.push_back(w);
    detect_infinite_lattice(n, invariant, gens);
    std::sort(invariant.begin(), invariant.end(), [](const LatticeModule& a, const LatticeModule& b) {
        if (a.rank() != b.rank()) return a.rank() < b.rank();
        return module_to_string(a) < module_to_string(b);
    });
    return invariant;
}

}  // namespace

StableFamily stable_subspaces(const SubgroupSpec& h) {
    h.validate();
    if (const auto* src = std::get_if<ExplicitSource>(&h.stable_source)) {
        std::vector<QMat> gens = exact_generators(h);
        for (const auto& w : src->modules) {
            if (w.ambient_dim() != h.n)
                throw std::invalid_argument("stable_subspaces: module of wrong ambient dimension");
            if (w.rank() == 0 || w.rank() == h.n)
                throw std::invalid_argument("stable_subspaces: modules must be proper and nonzero");
            if (!is_primitive(w)) throw std::invalid_argument("stable_subspaces: module not primitive");
            if (!span_invariant(w, gens))
                throw std::invalid_argument("stable_subspaces: module " + module_to_string(w) +
                                            " is not invariant under the lie basis");
        }
        return StableFamily{src->modules, {}};
    }
    if (const auto* src = std::get_if<TorusSource>(&h.stable_source)) {
        for (const auto& x : h.lie_basis)
            for (int i = 0; i < h.n; ++i)
                for (int j = 0; j < h.n; ++j)
                    if (i != j && x(i, j) != 0.0)
                        throw std::invalid_argument("stable_subspaces: torus source requires a diagonal lie basis");
        return torus_family(h.n, src->weights);
    }
    return StableFamily{algebra_closure_subspaces(h), {}};
}

// ----------------------------------------------------------------- delta

double l_p(const Eigen::MatrixXd& g, const LatticeModule& w) {
    if (w.rank() == 0 || w.rank() == w.ambient_dim())
        throw std::invalid_argument("l_p: subspace must be proper and nonzero");
    if (!is_primitive(w)) throw std::invalid_argument("l_p: subspace module must be primitive");
    return covolume(w, g);
}

double l_p(const QMat& g, const LatticeModule& w) { return l_p(to_eigen(g), w); }

namespace {

LatticeModule translate_module(const LatticeModule& w, const IMat& gamma) {
    return LatticeModule::from_rows(w.ambient_dim(), w.basis() * gamma);
}

double stratum_min_covolume(const LatticeModule& stratum, const Eigen::MatrixXd& g) {
    // upper bound on inf ‖V·g‖ over subspaces V of the stratum: prefix
    // covolumes of an LLL-reduced basis of the translated stratum lattice
    Eigen::MatrixXd rows = to_eigen(stratum.basis()) * g;
    LLLResult red = lll_reduce(rows, 0.99);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < stratum.rank(); ++k) {
        Eigen::MatrixXd prefix = red.basis.topRows(k);
        Eigen::MatrixXd gram = prefix * prefix.transpose();
        best = std::min(best, std::sqrt(std::max(gram.determinant(), 0.0)));
    }
    return best;
}

DeltaResult delta_impl(const StableFamily& fam, const Eigen::MatrixXd& ginv,
                       const std::optional<QMat>& ginv_exact) {
    DeltaResult res;
    res.certified = fam.certified();
    // no stable subspaces (irreducible H): the infimum over an empty set
    res.value = std::numeric_limits<double>::infinity();

    if (ginv_exact) {
        std::optional<Rat> best_sq;
        for (int i = 0; i < int(fam.modules.size()); ++i) {
            Rat sq = covolume_sq(fam.modules[i], *ginv_exact);
            if (!best_sq || sq < *best_sq) {
                best_sq = sq;
                res.argmin = i;
            }
        }
        if (best_sq) res.value = std::sqrt(to_double(*best_sq));
    } else {
        for (int i = 0; i < int(fam.modules.size()); ++i) {
            double v = covolume(fam.modules[i], ginv);
            if (v < res.value) {
                res.value = v;
                res.argmin = i;
            }
        }
    }

    for (const auto& stratum : fam.infinite_strata) {
        double bound = stratum_min_covolume(stratum, ginv);
        if (bound < res.value) {
            res.value = bound;
            res.argmin = -1;
        }
    }
    return res;
}

}  // namespace

DeltaResult delta(const Eigen::MatrixXd& g, const SubgroupSpec& h) {
    StableFamily fam = stable_subspaces(h);
    return delta_impl(fam, g.inverse(), std::nullopt);
}

DeltaResult delta(const GroupElementQ& g, const SubgroupSpec& h) {
    StableFamily fam = stable_subspaces(h);
    QMat ginv = g.inverse().mat();
    return delta_impl(fam, to_eigen(ginv), ginv);
}

// ----------------------------------------------------------------- cgood

ScalarField composite_field(const Eigen::MatrixXd& g, const Eigen::MatrixXd& gamma,
                            const LatticeModule& w, const SubgroupSpec& h) {
    h.validate();
    Eigen::MatrixXd lead = g.inverse() * gamma * h.base_point();
    Eigen::MatrixXd trail = gamma.inverse();
    std::vector<Eigen::MatrixXd> basis = h.lie_basis;
    Eigen::MatrixXd rows = to_eigen(w.basis());
    const int r = w.rank();
    const int n = h.n;
    auto subsets = k_subsets(n, r);
    return [=](const std::vector<double>& x) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (size_t i = 0; i < x.size(); ++i) a += x[i] * basis[i];
        Eigen::MatrixXd moved = rows * (lead * exp_series(a) * trail);
        double sup = 0;
        for (uint32_t mask : subsets) {
            Eigen::MatrixXd minor(r, r);
            int col = 0;
            for (int j = 0; j < n; ++j) {
                if (!(mask & (1u << j))) continue;
                minor.col(col++) = moved.col(j);
            }
            sup = std::max(sup, std::abs(minor.determinant()));
        }
        return sup;
    };
}

namespace {

struct BallOutcome {
    bool skipped = false;
    double max_ratio = 0;
    std::vector<CgoodViolation> violations;
};

}  // namespace

CgoodReport cgood_check(const ScalarField& f, const Window& window, const GoodnessParams& params,
                        long n_balls, int n_eps, uint64_t seed, ExecMode mode) {
    window.validate();
    if (params.c <= 0 || params.alpha <= 0 || params.alpha > 1)
        throw std::invalid_argument("cgood_check: C > 0 and alpha in (0,1] required");
    if (n_balls < 1 || n_eps < 2) throw std::invalid_argument("cgood_check: need balls and an eps grid");
    const int d = window.dim();
    const long samples_per_ball = 4096;
    Kronecker centers(d, seed);

    std::vector<BallOutcome> slots(n_balls);
    for_each_index(n_balls, mode, [&](int64_t j) {
        BallOutcome& out = slots[j];
        Rng rng(seed, uint64_t(j));
        std::vector<double> c = window.point(centers.point(uint64_t(j)));
        double rmax = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i)
            rmax = std::min({rmax, c[i] - window.box[i].first, window.box[i].second - c[i]});
        double radius = rmax * std::max(rng.uniform(), 0.05);
        if (!(radius > 0)) {
            out.skipped = true;
            return;
        }

        Kronecker inner(d, splitmix_of(seed, uint64_t(j)));
        std::vector<double> vals;
        vals.reserve(samples_per_ball);
        double sup = 0;
        std::vector<double> argmax = c;
        for (long s = 0; s < samples_per_ball; ++s) {
            auto u = inner.point(uint64_t(s));
            std::vector<double> x(d);
            double rr = 0;
            for (int i = 0; i < d; ++i) {
                x[i] = c[i] + radius * (2 * u[i] - 1);
                rr += (x[i] - c[i]) * (x[i] - c[i]);
            }
            if (rr > radius * radius) continue;  // cube corner outside the ball
            double v = std::abs(f(x));
            vals.push_back(v);
            if (v > sup) {
                sup = v;
                argmax = x;
            }
        }
        // refinement pass around the maximum
        Kronecker refine(d, splitmix_of(seed ^ 0x5bf0'3630'9bb1'43a1ULL, uint64_t(j)));
        for (long s = 0; s < 256; ++s) {
            auto u = refine.point(uint64_t(s));
            std::vector<double> x(d);
            double rr = 0;
            for (int i = 0; i < d; ++i) {
                x[i] = argmax[i] + (radius / 8) * (2 * u[i] - 1);
                rr += (x[i] - c[i]) * (x[i] - c[i]);
            }
            if (rr > radius * radius) continue;
            sup = std::max(sup, std::abs(f(x)));
        }

        if (sup < 1e-12 || vals.empty()) {
            out.skipped = true;
            return;
        }
        const double s_in = double(vals.size());
        std::sort(vals.begin(), vals.end());
        for (int e = 0; e < n_eps; ++e) {
            double eps = sup * std::pow(10.0, -6.0 * (1.0 - double(e) / (n_eps - 1)));
            double frac =
                double(std::upper_bound(vals.begin(), vals.end(), eps) - vals.begin()) / s_in;
            double bound = params.c * std::pow(eps / sup, params.alpha);
            double sigma = std::sqrt(std::max(frac * (1 - frac), 0.0) / s_in);
            double ratio = bound > 0 ? frac / bound
                                     : (frac > 0 ? std::numeric_limits<double>::infinity() : 0.0);
            out.max_ratio = std::max(out.max_ratio, ratio);
            if (frac > bound + 3 * sigma + 2.0 / s_in)
                out.violations.push_back(CgoodViolation{long(j), eps, frac, bound, sup});
        }
    });

    CgoodReport rep;
    for (const auto& out : slots) {
        if (out.skipped) {
            ++rep.balls_skipped;
            continue;
        }
        ++rep.balls_tested;
        rep.worst_ratio = std::max(rep.worst_ratio, out.max_ratio);
        for (const auto& v : out.violations) rep.violations.push_back(v);
    }
    return rep;
}

// ------------------------------------------------------------- prop 4.2

Rat prop42_delta_l(const Rat& eps_prev, int n, const Rat& c, int inv_alpha) {
    if (eps_prev <= 0 || c <= 0 || n < 1 || inv_alpha < 1)
        throw std::invalid_argument("prop42_delta_l: positive inputs required");
    Rat base = Rat(1) / (Rat(2 * n) * c);
    return eps_prev * pow_rat(base, inv_alpha);
}

double prop42_delta_l(double eps_prev, int n, const GoodnessParams& p) {
    if (eps_prev <= 0 || p.c <= 0 || p.alpha <= 0)
        throw std::invalid_argument("prop42_delta_l: positive inputs required");
    return eps_prev * std::pow(1.0 / (2.0 * n * p.c), 1.0 / p.alpha);
}

double RootRat::value() const {
    double b = to_double(base);
    return root == 1 ? b : std::pow(b, 1.0 / double(root));
}

bool RootRat::less(const RootRat& a, const RootRat& b) {
    long l = a.root / std::gcd(a.root, b.root) * b.root;
    return pow_rat(a.base, int(l / a.root)) < pow_rat(b.base, int(l / b.root));
}

bool RootRat::equal(const RootRat& a, const RootRat& b) {
    long l = a.root / std::gcd(a.root, b.root) * b.root;
    return pow_rat(a.base, int(l / a.root)) == pow_rat(b.base, int(l / b.root));
}

RootRat prop42_epsilon(const Rat& eta, int n, const Int& z0, const Rat& delta_l, int k_max,
                       const Rat& eps_prev) {
    if (eta <= 0 || delta_l <= 0 || z0 < 1 || k_max < 0 || eps_prev <= 0)
        throw std::invalid_argument("prop42_epsilon: positive inputs required");
    RootRat best{std::min(eta, eps_prev), 1};
    Rat z0_term = Rat(1, pow_int(z0, unsigned(n) * unsigned(n)));
    for (int k = 0; k <= k_max; ++k) {
        RootRat cand{z0_term * pow_rat(delta_l, k) * eta, long(k + 1)};
        if (RootRat::less(cand, best)) best = cand;
    }
    return best;
}

RootRat prop42_epsilon(const Rat& eta, int n, const Int& z0, const Rat& delta_l, int k_max) {
    return prop42_epsilon(eta, n, z0, delta_l, k_max, eta);
}

// ---------------------------------------------------------------- xi chain

XiChainResult xi_chain(const LatticeModule& w, const std::vector<QMat>& xi, uint64_t seed,
                       const QMat& g) {
    const int n = w.ambient_dim();
    if (w.rank() < 1) throw std::invalid_argument("xi_chain: W must be nonzero");
    if (xi.empty()) throw std::invalid_argument("xi_chain: empty test set");
    for (const auto& x : xi)
        if (x.rows() != n || x.cols() != n) throw std::invalid_argument("xi_chain: dimension mismatch");

    // Z0: the denominator bound over all exterior powers of the test set
    Int z0(1);
    for (const auto& x : xi)
        for (int k = 1; k <= n; ++k) {
            QMat comp = exterior_action(x, k);
            for (int i = 0; i < comp.rows(); ++i)
                for (int j = 0; j < comp.cols(); ++j)
                    z0 = lcm_int(z0, boost::multiprecision::denominator(comp(i, j)));
        }

    LatticeModule w0 = saturate(w);
    const int l = w0.rank();
    QMat w_rows = to_rat(w0.basis());

    // seed-shuffled greedy order
    std::vector<int> order(xi.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (int i = int(order.size()) - 1; i > 0; --i)
        std::swap(order[i], order[size_t(rng.uniform_int(0, i))]);

    auto translate = [&](int idx) { return module_from_rational_rows(n, w_rows * xi[idx]); };
    auto is_xi_stable = [&](const LatticeModule& m) {
        QMat base = to_rat(m.basis());
        int r = m.rank();
        if (r == n) return true;
        for (const auto& x : xi) {
            QMat stacked(2 * r, n);
            QMat moved = base * x;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < n; ++j) {
                    stacked(i, j) = base(i, j);
                    stacked(r + i, j) = moved(i, j);
                }
            if (rank_q(stacked) != r) return false;
        }
        return true;
    };

    XiChainResult res;
    res.z0 = z0;
    res.lambdas.push_back(w0);
    std::vector<LatticeModule> prefix_closures{w0};  // closure of Λ_0+..+Λ_i
    LatticeModule current = w0;

    const int max_steps = int(xi.size()) * n;
    int steps = 0;
    while (!is_xi_stable(current)) {
        if (++steps > max_steps)
            throw std::domain_error("xi_chain: stability not reached; Xi is not a valid test set");
        int chosen = -1;
        LatticeModule chosen_mod;
        for (int idx : order) {
            LatticeModule cand = translate(idx);
            if (lattice_intersect(current, cand).rank() < l) {
                chosen = idx;
                chosen_mod = cand;
                break;
            }
        }
        if (chosen < 0)
            throw std::domain_error("xi_chain: stability not reached; Xi is not a valid test set");
        res.chain.push_back(chosen);
        res.lambda_primed.push_back(lattice_intersect(current, chosen_mod));
        res.lambdas.push_back(chosen_mod);
        current = saturate(lattice_sum(current, chosen_mod));
        prefix_closures.push_back(current);
    }
    res.sum_closure = current;

    // telescoping product inequality, exact on squares
    res.lhs_sq = gram_det_sq(w_rows * g);
    for (int idx : res.chain) res.lhs_sq *= gram_det_sq(w_rows * xi[idx] * g);
    res.rhs_sq = covolume_sq(res.sum_closure, g);
    for (const auto& lp : res.lambda_primed) res.rhs_sq *= covolume_sq(lp, g);
    res.rhs_sq /= Rat(pow_int(z0, 2u * unsigned(n) * unsigned(n)));
    res.inequality_holds = res.lhs_sq >= res.rhs_sq;
    return res;
}

XiChainResult xi_chain(const LatticeModule& w, const std::vector<QMat>& xi, uint64_t seed) {
    return xi_chain(w, xi, seed, QMat::identity(w.ambient_dim()));
}

// ---------------------------------------------------------- sup oracle

namespace {

std::vector<Eigen::MatrixXd> grid_translations(const Eigen::MatrixXd& g, const SubgroupSpec& h,
                                               int grid_per_dim) {
    const int d = h.window.dim();
    std::vector<Eigen::MatrixXd> out;
    if (d == 0) {
        out.push_back(h.base_point() * g);
        return out;
    }
    long total = 1;
    for (int i = 0; i < d; ++i) {
        total *= grid_per_dim + 1;
        if (total > 4'000'000) throw std::invalid_argument("sup_search_oracle: grid too large");
    }
    std::vector<long> idx(d, 0);
    std::vector<double> x(d);
    for (long count = 0; count < total; ++count) {
        for (int i = 0; i < d; ++i) {
            auto [lo, hi] = h.window.box[i];
            x[i] = lo + (hi - lo) * double(idx[i]) / grid_per_dim;
        }
        out.push_back(h.element_at(x) * g);
        int c = 0;
        while (c < d && idx[c] == grid_per_dim) idx[c++] = 0;
        if (c < d) ++idx[c];
    }
    return out;
}

double max_covolume_over(const std::vector<Eigen::MatrixXd>& translations, const LatticeModule& w) {
    Eigen::MatrixXd rows = to_eigen(w.basis());
    double best = 0;
    for (const auto& t : translations) {
        Eigen::MatrixXd moved = rows * t;
        Eigen::MatrixXd gram = moved * moved.transpose();
        best = std::max(best, std::sqrt(std::max(gram.determinant(), 0.0)));
    }
    return best;
}

}  // namespace

double sup_search_oracle(const Eigen::MatrixXd& g, const SubgroupSpec& h, const LatticeModule& w,
                         int grid_per_dim) {
    h.validate();
    if (grid_per_dim < 1) throw std::invalid_argument("sup_search_oracle: resolution must be positive");
    return max_covolume_over(grid_translations(g, h, grid_per_dim), w);
}

// ------------------------------------------------------ module enumeration

std::vector<LatticeModule> enumerate_primitive_modules(int n, int rank, int height) {
    if (rank < 1 || rank >= n) throw std::invalid_argument("enumerate_primitive_modules: 1 <= rank < n");
    if (height < 1) throw std::invalid_argument("enumerate_primitive_modules: height >= 1");
    std::vector<LatticeModule> out;

    for (uint32_t pivots : k_subsets(n, rank)) {
        std::vector<int> pivot_col;
        for (int j = 0; j < n; ++j)
            if (pivots & (1u << j)) pivot_col.push_back(j);
        // free entries: (i, j) with j > pivot_col[i], j not an earlier-or-own pivot;
        // pivot entries and above-pivot entries have HNF ranges
        struct Slot {
            int i, j;
            long long lo, hi;
            bool above_pivot;  // range depends on the pivot value of column j
            int pivot_row;
        };
        // enumerate pivot values first, then the rest (odometer over everything)
        std::vector<Slot> slots;
        for (int i = 0; i < rank; ++i) slots.push_back({i, pivot_col[i], 1, height, false, -1});
        for (int i = 0; i < rank; ++i)
            for (int j = pivot_col[i] + 1; j < n; ++j) {
                auto it = std::find(pivot_col.begin(), pivot_col.end(), j);
                if (it == pivot_col.end()) {
                    slots.push_back({i, j, -height, height, false, -1});
                } else {
                    int pr = int(it - pivot_col.begin());
                    if (pr > i) slots.push_back({i, j, 0, height - 1, true, pr});
                }
            }

        std::vector<long long> vals(slots.size());
        for (size_t s = 0; s < slots.size(); ++s) vals[s] = slots[s].lo;
        for (;;) {
            IMat basis(rank, n);
            bool ok = true;
            // place pivots first so above-pivot ranges can be checked
            std::vector<long long> pivot_val(rank);
            for (size_t s = 0; s < slots.size(); ++s)
                if (!slots[s].above_pivot && slots[s].j == pivot_col[slots[s].i] )
                    pivot_val[slots[s].i] = vals[s];
            for (size_t s = 0; s < slots.size(); ++s) {
                if (slots[s].above_pivot && vals[s] >= pivot_val[slots[s].pivot_row]) ok = false;
                basis(slots[s].i, slots[s].j) = vals[s];
            }
            if (ok) {
                LatticeModule m = LatticeModule::from_rows(n, basis);
                if (m.rank() == rank && m.basis() == basis && is_primitive(m)) out.push_back(m);
            }
            size_t c = 0;
            while (c < slots.size() && vals[c] == slots[c].hi) vals[c] = slots[c].lo, ++c;
            if (c == slots.size()) break;
            ++vals[c];
        }
    }
    return out;
}

Prop42Report prop42_verify(const Eigen::MatrixXd& g, const SubgroupSpec& h, double eta,
                           int height_bound, const GoodnessParams& params, const Int& z0,
                           int grid_per_dim, ExecMode mode) {
    h.validate();
    if (eta <= 0) throw std::invalid_argument("prop42_verify: eta must be positive");
    const int n = h.n;
    StableFamily fam = stable_subspaces(h);

    Prop42Report rep;
    rep.eta = eta;
    double hyp = std::numeric_limits<double>::infinity();
    for (const auto& w : fam.modules) hyp = std::min(hyp, covolume(w, g));
    for (const auto& s : fam.infinite_strata) hyp = std::min(hyp, stratum_min_covolume(s, g));
    rep.hypothesis_value = hyp;
    rep.hypothesis_ok = hyp >= eta * (1 - 1e-12);

    // epsilon cascade: eps_0 = eta, delta_l from eps_{l-1}
    std::vector<double> eps(n, 0.0);
    {
        double inv_alpha = 1.0 / params.alpha;
        bool exact = std::abs(inv_alpha - std::round(inv_alpha)) < 1e-9;
        if (exact) {
            RootRat prev{rat_from_double(eta), 1};
            Rat q = Rat(1) / (Rat(2 * n) * rat_from_double(params.c));
            Rat qm = pow_rat(q, int(std::llround(inv_alpha)));
            Rat eta_r = rat_from_double(eta);
            Rat z0_term = Rat(1, pow_int(z0, unsigned(n) * unsigned(n)));
            for (int l = 1; l < n; ++l) {
                // delta_l = prev * qm as a RootRat
                RootRat delta{prev.base * pow_rat(qm, int(prev.root)), prev.root};
                RootRat best = prev;
                if (RootRat::less(RootRat{eta_r, 1}, best)) best = RootRat{eta_r, 1};
                for (int k = 0; k <= n; ++k) {
                    // (z0_term * delta^k * eta)^(1/(k+1))
                    Rat base = pow_rat(z0_term * eta_r, int(delta.root)) * pow_rat(delta.base, k);
                    RootRat cand{base, delta.root * long(k + 1)};
                    if (RootRat::less(cand, best)) best = cand;
                }
                eps[l] = best.value();
                prev = best;
            }
        } else {
            double prev = eta;
            for (int l = 1; l < n; ++l) {
                double delta = prop42_delta_l(prev, n, params);
                double best = std::min(eta, prev);
                double z0d = std::pow(to_double(z0), -double(n) * n);
                for (int k = 0; k <= n; ++k)
                    best = std::min(best, std::pow(z0d * std::pow(delta, k) * eta, 1.0 / (k + 1)));
                eps[l] = best;
                prev = best;
            }
        }
    }

    std::vector<Eigen::MatrixXd> translations = grid_translations(g, h, grid_per_dim);
    bool all_pass = true;
    for (int r = 1; r < n; ++r) {
        auto modules = enumerate_primitive_modules(n, r, height_bound);
        std::vector<double> sups(modules.size());
        for_each_index(int64_t(modules.size()), mode,
                       [&](int64_t i) { sups[i] = max_covolume_over(translations, modules[i]); });
        Prop42DimReport dim{r, eps[r], std::numeric_limits<double>::infinity(),
                            long(modules.size()), LatticeModule::zero(n)};
        for (size_t i = 0; i < modules.size(); ++i)
            if (sups[i] < dim.min_sup) {
                dim.min_sup = sups[i];
                dim.argmin = modules[i];
            }
        if (rep.hypothesis_ok && dim.min_sup < dim.eps_cascade * (1 - 1e-9)) all_pass = false;
        rep.dims.push_back(dim);
    }
    rep.pass = !rep.hypothesis_ok || all_pass;
    return rep;
}

// -------------------------------------------------------- shortest vector

Lambda1 shortest_vector(const Eigen::MatrixXd& rows) {
    const int r = int(rows.rows());
    if (r < 1) throw std::invalid_argument("shortest_vector: empty basis");
    LLLResult red = lll_reduce(rows, 0.99);
    const Eigen::MatrixXd& b = red.basis;

    // Gram-Schmidt profile
    Eigen::MatrixXd bstar = b;
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(r, r);
    Eigen::VectorXd bb(r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < i; ++j) {
            mu(i, j) = b.row(i).dot(bstar.row(j)) / bb(j);
            bstar.row(i) -= mu(i, j) * bstar.row(j);
        }
        bb(i) = bstar.row(i).squaredNorm();
    }

    Lambda1 out;
    out.lower_bound = std::sqrt(bb.minCoeff());
    double best = b.rowwise().squaredNorm().minCoeff();

    if (r <= 4) {
        // Fincke-Pohst enumeration over the Gram profile
        std::vector<long long> x(r, 0);
        std::vector<double> center(r, 0), partial(r + 1, 0);
        auto dfs = [&](auto&& self, int i) -> void {
            if (i < 0) {
                bool nonzero = false;
                for (long long v : x)
                    if (v) nonzero = true;
                if (nonzero) best = std::min(best, partial[0]);
                return;
            }
            double c = 0;
            for (int j = i + 1; j < r; ++j) c -= mu(j, i) * double(x[j]);
            double budget = best * (1 + 1e-12) - partial[i + 1];
            if (budget < 0) return;
            double w = std::sqrt(budget / bb(i));
            long long lo = (long long)std::ceil(c - w - 1e-12);
            long long hi = (long long)std::floor(c + w + 1e-12);
            for (long long v = lo; v <= hi; ++v) {
                x[i] = v;
                double dv = double(v) - c;
                partial[i] = partial[i + 1] + dv * dv * bb(i);
                if (partial[i] <= best * (1 + 1e-12)) self(self, i - 1);
            }
            x[i] = 0;
        };
        dfs(dfs, r - 1);
        out.certified = true;
    }
    out.value = std::sqrt(best);
    return out;
}

// ------------------------------------------------------------- km escape

EscapeReport km_escape_experiment(const SubgroupSpec& h, const Eigen::MatrixXd& g, const IMat& gamma,
                                  long samples, double threshold, uint64_t seed, ExecMode mode) {
    h.validate();
    if (samples < 1) throw std::invalid_argument("km_escape_experiment: samples >= 1");
    if (threshold <= 0) throw std::invalid_argument("km_escape_experiment: positive threshold required");
    if (gamma.rows() != h.n || gamma.cols() != h.n)
        throw std::invalid_argument("km_escape_experiment: gamma dimension mismatch");
    QMat gamma_q = to_rat(gamma);
    Rat det = det_q(gamma_q);
    if (det != 1 && det != -1)
        throw std::invalid_argument("km_escape_experiment: gamma must be unimodular integral");

    Eigen::MatrixXd gamma_f = to_eigen(gamma_q);
    Eigen::MatrixXd gamma_inv = to_eigen(inverse_q(gamma_q));
    const int d = h.window.dim();
    Kronecker seq(std::max(d, 1), seed);

    std::vector<double> lam(samples);
    for_each_index(samples, mode, [&](int64_t j) {
        std::vector<double> u = seq.point(uint64_t(j));
        u.resize(d);
        std::vector<double> x = h.window.point(u);
        Eigen::MatrixXd o = h.element_at(x).inverse();
        Eigen::MatrixXd translate = gamma_f * o * gamma_inv * g;
        lam[j] = shortest_vector(translate).value;
    });

    EscapeReport rep;
    rep.samples = samples;
    rep.threshold = threshold;
    // fixed log-spaced bins, quarter decades from 1e-8 to 1e4
    rep.histogram.push_back({0.0, 1e-8, 0});
    for (int k = 0; k < 48; ++k)
        rep.histogram.push_back({std::pow(10.0, -8 + 0.25 * k), std::pow(10.0, -8 + 0.25 * (k + 1)), 0});
    rep.histogram.push_back({1e4, std::numeric_limits<double>::infinity(), 0});
    for (long j = 0; j < samples; ++j) {
        if (lam[j] < threshold) ++rep.escape_count;
        for (auto& bin : rep.histogram)
            if (lam[j] >= bin.lo && lam[j] < bin.hi) {
                ++bin.count;
                break;
            }
    }
    rep.escape_fraction = double(rep.escape_count) / double(samples);

    StableFamily fam = stable_subspaces(h);
    StableFamily moved;
    for (const auto& w : fam.modules) moved.modules.push_back(translate_module(w, gamma));
    for (const auto& s : fam.infinite_strata) moved.infinite_strata.push_back(translate_module(s, gamma));
    DeltaResult dr = delta_impl(moved, g.inverse(), std::nullopt);
    rep.delta_value = dr.value;
    rep.delta_certified = dr.certified;
    return rep;
}

}  // namespace slnd
