#include "slnd/kernels.hpp"

#include "slnd/parallel_for.hpp"

#include <cmath>
#include <sstream>

namespace slnd {

LatticeModule random_primitive_module(int n, Rng& rng) {
    const int rank = int(rng.uniform_int(1, n - 1));
    for (;;) {
        IMat rows(rank, n);
        for (int i = 0; i < rank; ++i)
            for (int j = 0; j < n; ++j) rows(i, j) = Int(rng.uniform_int(-9, 9));
        LatticeModule m = LatticeModule::from_rows(n, rows);
        if (m.rank() == rank) return saturate(m);
    }
}

QMat random_unimodular_rational(int n, Rng& rng) {
    static const std::pair<int, int> coeffs[] = {{1, 1},  {-1, 1}, {2, 1},  {-2, 1},
                                                 {1, 2},  {-1, 2}, {1, 3},  {-1, 3},
                                                 {3, 2},  {-3, 2}, {2, 3},  {-2, 3}};
    QMat g = QMat::identity(n);
    const int shears = 4 + int(rng.uniform_int(0, 2));
    for (int s = 0; s < shears; ++s) {
        int i = int(rng.uniform_int(0, n - 1));
        int j = int(rng.uniform_int(0, n - 2));
        if (j >= i) ++j;
        auto [p, q] = coeffs[rng.uniform_int(0, 11)];
        QMat e = QMat::identity(n);
        e(i, j) = Rat(p, q);
        g = g * e;
    }
    return g;
}

Eigen::MatrixXd random_sl(int n, Rng& rng) {
    for (;;) {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
        double det = m.determinant();
        if (std::abs(det) < 1e-6) continue;
        if (det < 0) m.row(0) = -m.row(0);
        return m / std::pow(std::abs(det), 1.0 / n);
    }
}

namespace {

std::string imat_str(const IMat& m) {
    std::ostringstream os;
    for (int i = 0; i < m.rows(); ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j).str();
    }
    return os.str();
}

std::string qmat_str(const QMat& m) {
    std::ostringstream os;
    for (int i = 0; i < m.rows(); ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << rational_to_string(m(i, j));
    }
    return os.str();
}

}  // namespace

FuzzReport fuzz_submodularity(int n, long pairs, uint64_t seed, ExecMode mode) {
    if (n < 2) throw std::invalid_argument("fuzz_submodularity: n >= 2");
    if (pairs < 1) throw std::invalid_argument("fuzz_submodularity: pairs >= 1");

    struct Slot {
        bool violated = false;
        double ratio = 1;
    };
    std::vector<Slot> slots(pairs);
    std::vector<std::pair<LatticeModule, LatticeModule>> bad_pair(1);
    std::vector<QMat> bad_g(1);

    for_each_index(pairs, mode, [&](int64_t i) {
        Rng rng(seed, uint64_t(i));
        LatticeModule a = random_primitive_module(n, rng);
        LatticeModule b = random_primitive_module(n, rng);
        QMat g = random_unimodular_rational(n, rng);
        SubmodularityReport rep = submodularity_check(a, b, g);
        Slot& s = slots[i];
        s.violated = !rep.holds;
        s.ratio = std::sqrt(to_double(rep.lhs_sq / rep.rhs_sq));  // rhs > 0 always
    });

    FuzzReport rep;
    rep.n = n;
    rep.pairs = pairs;
    for (long i = 0; i < pairs; ++i) {
        if (slots[i].violated && !rep.first_violation) {
            Rng rng(seed, uint64_t(i));
            LatticeModule a = random_primitive_module(n, rng);
            LatticeModule b = random_primitive_module(n, rng);
            QMat g = random_unimodular_rational(n, rng);
            rep.first_violation = FuzzViolation{i, imat_str(a.basis()), imat_str(b.basis()), qmat_str(g)};
        }
        if (slots[i].violated) ++rep.violations;
        rep.min_ratio = std::min(rep.min_ratio, slots[i].ratio);
    }
    return rep;
}

}  // namespace slnd
