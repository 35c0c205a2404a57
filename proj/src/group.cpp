#include "slnd/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace slnd {

GroupElementQ::GroupElementQ(QMat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw std::invalid_argument("GroupElementQ: square matrix required");
    if (det_q(m_) != 1) throw std::invalid_argument("GroupElementQ: determinant must be exactly 1");
}

GroupElementQ GroupElementQ::identity(int n) { return GroupElementQ(QMat::identity(n)); }

GroupElementQ GroupElementQ::inverse() const { return GroupElementQ(inverse_q(m_)); }

bool GroupElementQ::is_integral() const {
    for (int i = 0; i < m_.rows(); ++i)
        for (int j = 0; j < m_.cols(); ++j)
            if (boost::multiprecision::denominator(m_(i, j)) != 1) return false;
    return true;
}

GroupElementD::GroupElementD(Eigen::MatrixXd m, double det_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw std::invalid_argument("GroupElementD: square matrix required");
    if (std::abs(m_.determinant() - 1.0) > det_tol)
        throw std::invalid_argument("GroupElementD: determinant out of tolerance");
}

GroupElementD GroupElementD::identity(int n) {
    return GroupElementD(Eigen::MatrixXd::Identity(n, n));
}

LieAlgebraElement::LieAlgebraElement(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("LieAlgebraElement: square matrix required");
    if (std::abs(m_.trace()) > 1e-12) throw std::invalid_argument("LieAlgebraElement: trace must vanish");
}

Eigen::MatrixXd exp_series(const Eigen::MatrixXd& x) {
    const int n = int(x.rows());
    double nrm = x.cwiseAbs().rowwise().sum().maxCoeff();  // induced infinity norm
    int squarings = 0;
    Eigen::MatrixXd a = x;
    while (nrm > 0.5) {
        a *= 0.5;
        nrm *= 0.5;
        ++squarings;
    }
    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 24; ++k) {
        term = term * a / double(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

Eigen::MatrixXd exp_lie(const LieAlgebraElement& x) { return exp_series(x.mat()); }

Cocharacter::Cocharacter(std::vector<int64_t> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw std::invalid_argument("Cocharacter: empty weight vector");
    int64_t s = std::accumulate(w_.begin(), w_.end(), int64_t(0));
    if (s != 0) throw std::invalid_argument("Cocharacter: weights must sum to zero");
}

Cocharacter Cocharacter::negated() const {
    std::vector<int64_t> v = w_;
    for (auto& x : v) x = -x;
    return Cocharacter(v);
}

GroupElementQ cocharacter_at(const Cocharacter& a, const Rat& t) {
    if (t <= 0) throw std::invalid_argument("cocharacter_at: t must be positive");
    const int n = a.dim();
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = pow_rat(t, int(a.weights()[i]));
    return GroupElementQ(m);
}

Eigen::MatrixXd cocharacter_at(const Cocharacter& a, double t) {
    if (t <= 0) throw std::invalid_argument("cocharacter_at: t must be positive");
    const int n = a.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = std::pow(t, double(a.weights()[i]));
    return m;
}

namespace {

template <class MatT, class Scalar>
MatT compound(const MatT& g, int k, int n, Scalar (*det_fn)(MatT)) {
    auto subs = k_subsets(n, k);
    const int d = int(subs.size());
    MatT out(d, d);
    for (int si = 0; si < d; ++si)
        for (int ti = 0; ti < d; ++ti) {
            MatT minor(k, k);
            int row = 0;
            for (int i = 0; i < n; ++i) {
                if (!(subs[si] & (1u << i))) continue;
                int col = 0;
                for (int j = 0; j < n; ++j) {
                    if (!(subs[ti] & (1u << j))) continue;
                    minor(row, col) = g(i, j);
                    ++col;
                }
                ++row;
            }
            out(si, ti) = det_fn(minor);
        }
    return out;
}

}  // namespace

QMat exterior_action(const QMat& g, int k) {
    if (g.rows() != g.cols()) throw std::invalid_argument("exterior_action: square matrix required");
    const int n = g.rows();
    if (k < 1 || k > n) throw std::invalid_argument("exterior_action: degree out of range");
    return compound<QMat, Rat>(g, k, n, &det_q);
}

Eigen::MatrixXd exterior_action(const Eigen::MatrixXd& g, int k) {
    if (g.rows() != g.cols()) throw std::invalid_argument("exterior_action: square matrix required");
    const int n = int(g.rows());
    if (k < 1 || k > n) throw std::invalid_argument("exterior_action: degree out of range");
    auto subs = k_subsets(n, k);
    const int d = int(subs.size());
    Eigen::MatrixXd out(d, d);
    for (int si = 0; si < d; ++si)
        for (int ti = 0; ti < d; ++ti) {
            Eigen::MatrixXd minor(k, k);
            int row = 0;
            for (int i = 0; i < n; ++i) {
                if (!(subs[si] & (1u << i))) continue;
                int col = 0;
                for (int j = 0; j < n; ++j) {
                    if (!(subs[ti] & (1u << j))) continue;
                    minor(row, col) = g(i, j);
                    ++col;
                }
                ++row;
            }
            out(si, ti) = minor.determinant();
        }
    return out;
}

ExteriorVector apply_exterior(const ExteriorVector& v, const QMat& g) {
    if (g.rows() != v.n) throw std::invalid_argument("apply_exterior: dimension mismatch");
    QMat c = exterior_action(g, v.degree);
    auto subs = k_subsets(v.n, v.degree);
    std::vector<Rat> dense(subs.size(), Rat(0));
    for (const auto& [mask, coef] : v.comps) {
        auto it = std::lower_bound(subs.begin(), subs.end(), mask);
        int row = int(it - subs.begin());
        for (size_t j = 0; j < subs.size(); ++j) dense[j] += coef * c(row, int(j));
    }
    ExteriorVector out;
    out.n = v.n;
    out.degree = v.degree;
    for (size_t j = 0; j < subs.size(); ++j)
        if (dense[j] != 0) out.comps.emplace_back(subs[j], dense[j]);
    return out;
}

std::vector<std::vector<int64_t>> weight_support(const ExteriorVector& v) {
    if (v.is_zero()) throw std::invalid_argument("weight_support: zero vector");
    std::set<std::vector<int64_t>> seen;
    for (const auto& [mask, coef] : v.comps) {
        std::vector<int64_t> w(v.n, 0);
        for (int i = 0; i < v.n; ++i)
            if (mask & (1u << i)) w[i] = 1;
        seen.insert(w);
    }
    return {seen.begin(), seen.end()};
}

}  // namespace slnd
