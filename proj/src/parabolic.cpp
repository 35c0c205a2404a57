#include "slnd/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slnd {

StandardParabolic::StandardParabolic(std::vector<int> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("StandardParabolic: empty composition");
    starts_.reserve(blocks_.size());
    for (int b : blocks_) {
        if (b < 1) throw std::invalid_argument("StandardParabolic: block sizes must be positive");
        starts_.push_back(dim_);
        dim_ += b;
    }
}

StandardParabolic StandardParabolic::borel(int n) { return StandardParabolic(std::vector<int>(n, 1)); }

StandardParabolic StandardParabolic::whole_group(int n) { return StandardParabolic({n}); }

int StandardParabolic::block_of(int coord) const {
    for (int b = num_blocks() - 1; b >= 0; --b)
        if (coord >= starts_[b]) return b;
    throw std::out_of_range("StandardParabolic::block_of");
}

StandardParabolic parabolic_from_subset(const StandardParabolic& p, const RootSubset& i) {
    for (int s : i.included)
        if (s < 0 || s >= p.num_simple_roots())
            throw std::invalid_argument("parabolic_from_subset: root slot out of range");
    std::vector<int> merged;
    for (int b = 0; b < p.num_blocks(); ++b) {
        if (b > 0 && i.included.count(b - 1))
            merged.back() += p.blocks()[b];
        else
            merged.push_back(p.blocks()[b]);
    }
    return StandardParabolic(merged);
}

std::vector<std::vector<int>> merged_block_groups(const StandardParabolic& p, const RootSubset& i) {
    std::vector<std::vector<int>> groups;
    for (int b = 0; b < p.num_blocks(); ++b) {
        if (b > 0 && i.included.count(b - 1))
            groups.back().push_back(b);
        else
            groups.push_back({b});
    }
    return groups;
}

namespace {

// g = R·Q with R upper triangular (positive diagonal) and Q in SO(N),
// via Householder QR of g^T·J and flips.
void rq_decompose(const Eigen::MatrixXd& g, Eigen::MatrixXd& r, Eigen::MatrixXd& q) {
    const int n = int(g.rows());
    Eigen::MatrixXd m = g.transpose().rowwise().reverse();  // g^T · J
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q1 = qr.householderQ();
    Eigen::MatrixXd r1 = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        if (r1(i, i) < 0) {
            r1.row(i) = -r1.row(i);
            q1.col(i) = -q1.col(i);
        }
        if (r1(i, i) == 0) throw std::invalid_argument("rq_decompose: singular input");
    }
    // J · R1^T · J is upper triangular with positive diagonal
    r = r1.transpose().colwise().reverse().eval().rowwise().reverse();
    q = q1.transpose().colwise().reverse();
    // with det(g) = 1 and det(r) > 0, det(q) = +1 automatically
}

}  // namespace

HorosphericalCoords horospherical_decompose(const Eigen::MatrixXd& g, const StandardParabolic& p) {
    if (g.rows() != p.dim() || g.cols() != p.dim())
        throw std::invalid_argument("horospherical_decompose: dimension mismatch");
    const int n = p.dim();
    Eigen::MatrixXd r, q;
    rq_decompose(g, r, q);

    HorosphericalCoords c;
    c.k = q;
    c.a = Eigen::MatrixXd::Zero(n, n);
    c.m = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd dinv = Eigen::MatrixXd::Zero(n, n);
    c.block_scalars.resize(p.num_blocks());

    for (int b = 0; b < p.num_blocks(); ++b) {
        const int s = p.block_start(b);
        const int w = p.blocks()[b];
        double logdet = 0;
        for (int i = 0; i < w; ++i) logdet += std::log(r(s + i, s + i));
        const double t = std::exp(logdet / w);
        c.block_scalars[b] = t;
        Eigen::MatrixXd d = r.block(s, s, w, w);
        c.a.block(s, s, w, w) = t * Eigen::MatrixXd::Identity(w, w);
        c.m.block(s, s, w, w) = d / t;
        dinv.block(s, s, w, w) =
            d.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(w, w));
    }
    c.u = r * dinv;
    // clean the unipotent part: exact identity blocks on the diagonal
    for (int b = 0; b < p.num_blocks(); ++b) {
        const int s = p.block_start(b);
        const int w = p.blocks()[b];
        c.u.block(s, s, w, w) = Eigen::MatrixXd::Identity(w, w);
        for (int b2 = 0; b2 < b; ++b2)
            c.u.block(s, p.block_start(b2), w, p.blocks()[b2]).setZero();
    }
    return c;
}

std::vector<double> simple_root_values(const StandardParabolic& p, const HorosphericalCoords& c) {
    std::vector<double> roots;
    for (int i = 0; i + 1 < p.num_blocks(); ++i)
        roots.push_back(c.block_scalars[i] / c.block_scalars[i + 1]);
    return roots;
}

ParabolicFrame ParabolicFrame::standard(StandardParabolic p) {
    ParabolicFrame f{std::move(p), {}};
    f.perm.resize(f.parabolic.dim());
    std::iota(f.perm.begin(), f.perm.end(), 0);
    return f;
}

Eigen::MatrixXd ParabolicFrame::perm_matrix() const {
    const int n = parabolic.dim();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) s(i, perm[i]) = 1;
    return s;
}

bool ParabolicFrame::identity_perm() const {
    for (int i = 0; i < int(perm.size()); ++i)
        if (perm[i] != i) return false;
    return true;
}

HorosphericalCoords decompose_in_frame(const Eigen::MatrixXd& g, const ParabolicFrame& f) {
    if (f.identity_perm()) return horospherical_decompose(g, f.parabolic);
    Eigen::MatrixXd s = f.perm_matrix();
    HorosphericalCoords c = horospherical_decompose(s * g * s.transpose(), f.parabolic);
    c.u = s.transpose() * c.u * s;
    c.a = s.transpose() * c.a * s;
    c.m = s.transpose() * c.m * s;
    c.k = s.transpose() * c.k * s;
    return c;
}

bool siegel_membership(const Eigen::MatrixXd& g, const SiegelSet& s) {
    if (s.t <= 0 || s.bound_u <= 0 || s.bound_m <= 0)
        throw std::invalid_argument("siegel_membership: bounds must be positive");
    HorosphericalCoords c = horospherical_decompose(g, s.parabolic);
    for (double root : simple_root_values(s.parabolic, c))
        if (!(root > s.t)) return false;
    const auto& p = s.parabolic;
    for (int b1 = 0; b1 < p.num_blocks(); ++b1)
        for (int b2 = b1 + 1; b2 < p.num_blocks(); ++b2) {
            auto blk = c.u.block(p.block_start(b1), p.block_start(b2), p.blocks()[b1], p.blocks()[b2]);
            if (blk.cwiseAbs().maxCoeff() > s.bound_u) return false;
        }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.m);
    if (svd.singularValues()(0) > s.bound_m) return false;
    return true;
}

LLLResult lll_reduce(const Eigen::MatrixXd& rows, double delta) {
    const int n = int(rows.rows());
    Eigen::MatrixXd b = rows;
    IMat t = IMat::identity(n);

    auto gso = [&](Eigen::MatrixXd& bstar, Eigen::MatrixXd& mu, Eigen::VectorXd& bb) {
        bstar = b;
        mu.setZero();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) {
                mu(i, j) = b.row(i).dot(bstar.row(j)) / bb(j);
                bstar.row(i) -= mu(i, j) * bstar.row(j);
            }
            bb(i) = bstar.row(i).squaredNorm();
            if (!(bb(i) > 0)) throw std::invalid_argument("lll_reduce: degenerate rows");
        }
    };

    Eigen::MatrixXd bstar(n, int(rows.cols())), mu = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd bb(n);
    gso(bstar, mu, bb);

    int k = 1;
    int guard = 0;
    while (k < n) {
        if (++guard > 100000) throw std::runtime_error("lll_reduce: did not terminate");
        for (int j = k - 1; j >= 0; --j) {
            long long q = llround(mu(k, j));
            if (q != 0) {
                b.row(k) -= double(q) * b.row(j);
                t.axpy_row(k, j, Int(q));
                gso(bstar, mu, bb);
            }
        }
        if (bb(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bb(k - 1)) {
            ++k;
        } else {
            b.row(k).swap(b.row(k - 1));
            t.swap_rows(k, k - 1);
            gso(bstar, mu, bb);
            k = std::max(k - 1, 1);
        }
    }
    return {b, t};
}

SiegelReduction reduce_to_siegel(const Eigen::MatrixXd& g) {
    const int n = int(g.rows());
    if (n < 2 || g.cols() != n) throw std::invalid_argument("reduce_to_siegel: need a square matrix, n >= 2");
    StandardParabolic borel = StandardParabolic::borel(n);
    const double t = (n == 2) ? 0.8660254037844386 * (1 - 1e-9) : 0.85;
    SiegelReduction out{IMat{}, HorosphericalCoords{}, SiegelSet{borel, t, 0.5 + 1e-9, 1.0 + 1e-9},
                        false, n == 2};

    IMat gamma = IMat::identity(n);
    Eigen::MatrixXd b = g;

    if (n == 2) {
        // Gauss/Lagrange reduction of the two rows
        for (int iter = 0; iter < 10000; ++iter) {
            if (b.row(0).squaredNorm() > b.row(1).squaredNorm()) {
                b.row(0).swap(b.row(1));
                gamma.swap_rows(0, 1);
            }
            long long q = llround(b.row(1).dot(b.row(0)) / b.row(0).squaredNorm());
            if (q == 0) break;
            b.row(1) -= double(q) * b.row(0);
            gamma.axpy_row(1, 0, Int(q));
        }
        // shortest vector goes to the bottom row
        b.row(0).swap(b.row(1));
        gamma.swap_rows(0, 1);
    } else {
        LLLResult lll = lll_reduce(g, 0.99);
        // reversed LLL order puts the Gram-Schmidt profile in Siegel position
        Eigen::MatrixXd rev(n, n);
        IMat grev(n, n);
        for (int i = 0; i < n; ++i) {
            rev.row(i) = lll.basis.row(n - 1 - i);
            for (int j = 0; j < n; ++j) grev(i, j) = lll.transform(n - 1 - i, j);
        }
        b = rev;
        gamma = grev;
    }

    // restore det = +1
    QMat gq = to_rat(gamma);
    if (det_q(gq) == -1) {
        gamma.negate_row(0);
        b.row(0) = -b.row(0);
    }

    out.gamma = gamma;
    out.coords = horospherical_decompose(b, borel);
    out.verified = siegel_membership(b, out.verified_in);
    return out;
}

BoundaryReport boundary_classify(const std::vector<Eigen::MatrixXd>& trajectory,
                                 const StandardParabolic& p, double divergence_threshold,
                                 std::pair<double, double> bounded_band) {
    if (trajectory.empty()) throw std::invalid_argument("boundary_classify: empty trajectory");
    const int nroots = p.num_simple_roots();
    std::vector<std::vector<double>> series(nroots);
    for (const auto& g : trajectory) {
        HorosphericalCoords c = horospherical_decompose(g, p);
        auto roots = simple_root_values(p, c);
        for (int i = 0; i < nroots; ++i) series[i].push_back(roots[i]);
    }

    BoundaryReport rep;
    rep.fates.resize(nroots);
    rep.final_roots.resize(nroots);
    const size_t len = trajectory.size();
    const size_t half = len / 2;
    bool any_unclassified = false;
    for (int i = 0; i < nroots; ++i) {
        const auto& s = series[i];
        rep.final_roots[i] = s.back();
        bool monotone = true;
        for (size_t j = half; j + 1 < len; ++j)
            if (s[j + 1] < s[j] * (1 - 1e-12)) monotone = false;
        bool divergent = s.back() > divergence_threshold && monotone;
        bool bounded = true;
        for (double v : s)
            if (v < bounded_band.first || v > bounded_band.second) bounded = false;
        if (divergent)
            rep.fates[i] = RootFate::divergent;
        else if (bounded) {
            rep.fates[i] = RootFate::bounded;
            rep.bounded_roots.included.insert(i);
        } else {
            rep.fates[i] = RootFate::unclassified;
            any_unclassified = true;
        }
    }

    if (any_unclassified) {
        rep.outcome = BoundaryReport::Outcome::unclassified;
        return rep;
    }
    if (int(rep.bounded_roots.included.size()) == nroots) {
        rep.outcome = BoundaryReport::Outcome::interior;
        return rep;
    }
    rep.outcome = BoundaryReport::Outcome::boundary;
    StandardParabolic pi = parabolic_from_subset(p, rep.bounded_roots);
    rep.stratum = pi;
    HorosphericalCoords final_c = horospherical_decompose(trajectory.back(), pi);
    rep.u_limit = final_c.u;
    rep.residual = final_c.m * final_c.k;
    return rep;
}

namespace {

// The coordinate index set of a module, when it is a coordinate subspace.
std::optional<std::vector<int>> coordinate_support(const LatticeModule& w) {
    std::vector<int> support;
    for (int i = 0; i < w.rank(); ++i) {
        int nonzero = -1;
        for (int j = 0; j < w.ambient_dim(); ++j) {
            if (w.basis()(i, j) == 0) continue;
            if (nonzero >= 0 || w.basis()(i, j) != 1) return std::nullopt;
            nonzero = j;
        }
        if (nonzero < 0) return std::nullopt;
        support.push_back(nonzero);
    }
    std::sort(support.begin(), support.end());
    return support;
}

}  // namespace

BoundaryActionResult rational_boundary_action(const GroupElementQ& q,
                                              const HorosphericalCoords& coords,
                                              const StandardParabolic& p) {
    const int n = p.dim();
    if (q.dim() != n) throw std::invalid_argument("rational_boundary_action: dimension mismatch");

    // The standard parabolic stabilizes the suffix coordinate flag (row
    // action); q P q^{-1} stabilizes its image under q^{-1}. We require that
    // image to again be a coordinate flag.
    QMat qinv = inverse_q(q.mat());
    const int r = p.num_blocks();
    std::vector<std::vector<int>> flag_support;
    int suffix = 0;
    for (int b = r - 1; b >= 1; --b) {
        suffix += p.blocks()[b];
        IMat gens(suffix, n);
        Int scale(1);
        for (int i = 0; i < suffix; ++i)
            for (int j = 0; j < n; ++j) scale = lcm_int(scale, boost::multiprecision::denominator(qinv(n - suffix + i, j)));
        for (int i = 0; i < suffix; ++i)
            for (int j = 0; j < n; ++j) {
                Rat v = qinv(n - suffix + i, j) * Rat(scale);
                gens(i, j) = boost::multiprecision::numerator(v);
            }
        LatticeModule w = saturate(LatticeModule::from_rows(n, gens));
        auto support = coordinate_support(w);
        if (!support)
            throw std::invalid_argument(
                "rational_boundary_action: q does not carry the standard flag to a coordinate flag");
        flag_support.push_back(*support);
    }

    // Assemble the frame: block j of the relabeled standard parabolic gets the
    // coordinates its flag layer contributes, in ascending order.
    ParabolicFrame frame{p, std::vector<int>(n)};
    std::vector<bool> used(n, false);
    std::vector<std::vector<int>> layer_coords(r);
    for (int b = r - 1; b >= 1; --b) {
        const auto& sup = flag_support[r - 1 - b];
        std::vector<int> fresh;
        for (int c : sup)
            if (!used[c]) fresh.push_back(c);
        for (int c : sup) used[c] = true;
        layer_coords[b] = fresh;
    }
    {
        std::vector<int> fresh;
        for (int c = 0; c < n; ++c)
            if (!used[c]) fresh.push_back(c);
        layer_coords[0] = fresh;
    }
    int pos = 0;
    for (int b = 0; b < r; ++b) {
        if (int(layer_coords[b].size()) != p.blocks()[b])
            throw std::invalid_argument("rational_boundary_action: flag layer sizes do not match the composition");
        for (int c : layer_coords[b]) frame.perm[pos++] = c;
    }

    HorosphericalCoords qc = decompose_in_frame(q.to_float(), frame);
    const Eigen::MatrixXd omega = qc.a * qc.m * qc.k;
    Eigen::MatrixXd omega_inv = omega.inverse();
    Eigen::MatrixXd kq_t = qc.k.transpose();

    BoundaryActionResult out{HorosphericalCoords{}, frame, 0.0};
    out.coords.u = qc.u * omega * coords.u * omega_inv;
    out.coords.a = qc.a * qc.k * coords.a * kq_t;
    out.coords.m = qc.m * qc.k * coords.m * kq_t;
    out.coords.k = qc.k * coords.k;
    out.coords.block_scalars.resize(p.num_blocks());
    for (int b = 0; b < p.num_blocks(); ++b)
        out.coords.block_scalars[b] = qc.block_scalars[b] * coords.block_scalars[b];

    Eigen::MatrixXd lhs = out.coords.assemble();
    Eigen::MatrixXd rhs = q.to_float() * coords.assemble();
    out.assembly_dev = (lhs - rhs).cwiseAbs().maxCoeff();
    return out;
}

ParabolicFrame parabolic_from_cocharacter(const Cocharacter& a) {
    const int n = a.dim();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return a.weights()[i] > a.weights()[j]; });
    std::vector<int> blocks;
    for (int i = 0; i < n; ++i) {
        if (i > 0 && a.weights()[idx[i]] == a.weights()[idx[i - 1]])
            ++blocks.back();
        else
            blocks.push_back(1);
    }
    return ParabolicFrame{StandardParabolic(blocks), idx};
}

bool frame_membership(const Eigen::MatrixXd& x, const ParabolicFrame& f, double tol) {
    Eigen::MatrixXd s = f.perm_matrix();
    Eigen::MatrixXd y = s * x * s.transpose();
    const auto& p = f.parabolic;
    for (int b1 = 0; b1 < p.num_blocks(); ++b1)
        for (int b2 = 0; b2 < b1; ++b2) {
            auto blk = y.block(p.block_start(b1), p.block_start(b2), p.blocks()[b1], p.blocks()[b2]);
            if (blk.cwiseAbs().maxCoeff() > tol) return false;
        }
    return true;
}

void BlockEmbedding::validate() const {
    if (m < 2 || copies < 1 || copies * m > big_n)
        throw std::invalid_argument("BlockEmbedding: embedding is not orthogonality-compatible");
}

Eigen::MatrixXd BlockEmbedding::apply(const Eigen::MatrixXd& g) const {
    validate();
    if (g.rows() != m || g.cols() != m) throw std::invalid_argument("BlockEmbedding: element size mismatch");
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(big_n, big_n);
    for (int c = 0; c < copies; ++c) out.block(c * m, c * m, m, m) = g;
    return out;
}

Cocharacter BlockEmbedding::extend(const Cocharacter& a) const {
    validate();
    if (a.dim() != m) throw std::invalid_argument("BlockEmbedding: cocharacter size mismatch");
    std::vector<int64_t> w(big_n, 0);
    for (int c = 0; c < copies; ++c)
        for (int i = 0; i < m; ++i) w[c * m + i] = a.weights()[i];
    return Cocharacter(w);
}

EmbeddingReport embedding_compatibility_check(const Eigen::MatrixXd& g, const BlockEmbedding& e,
                                              const Cocharacter& a) {
    e.validate();
    ParabolicFrame pf = parabolic_from_cocharacter(a);
    ParabolicFrame qf = parabolic_from_cocharacter(e.extend(a));
    HorosphericalCoords small = decompose_in_frame(g, pf);
    HorosphericalCoords big = decompose_in_frame(e.apply(g), qf);

    EmbeddingReport rep{};
    rep.u_dev = (e.apply(small.u) - big.u).cwiseAbs().maxCoeff();
    rep.a_dev = (e.apply(small.a) - big.a).cwiseAbs().maxCoeff();
    rep.mk_dev = (e.apply(small.m * small.k) - big.m * big.k).cwiseAbs().maxCoeff();
    rep.max_dev = std::max({rep.u_dev, rep.a_dev, rep.mk_dev});
    return rep;
}

namespace {

struct RelativeSplit {
    Eigen::MatrixXd u_outer, u_inner, a_outer, a_inner;
};

RelativeSplit split_relative(const HorosphericalCoords& c, const StandardParabolic& p,
                             const RootSubset& i) {
    const int n = p.dim();
    auto groups = merged_block_groups(p, i);
    RelativeSplit s;
    s.u_inner = Eigen::MatrixXd::Identity(n, n);
    int offset = 0;
    for (const auto& g : groups) {
        int width = 0;
        for (int b : g) width += p.blocks()[b];
        s.u_inner.block(offset, offset, width, width) = c.u.block(offset, offset, width, width);
        offset += width;
    }
    s.u_outer = c.u * s.u_inner.inverse();

    s.a_outer = Eigen::MatrixXd::Zero(n, n);
    offset = 0;
    for (const auto& g : groups) {
        int width = 0;
        double logsum = 0;
        for (int b : g) {
            width += p.blocks()[b];
            logsum += p.blocks()[b] * std::log(c.block_scalars[b]);
        }
        double t = std::exp(logsum / width);
        s.a_outer.block(offset, offset, width, width) = t * Eigen::MatrixXd::Identity(width, width);
        offset += width;
    }
    s.a_inner = s.a_outer.inverse() * c.a;
    return s;
}

}  // namespace

RelativeCompatibilityReport relative_compatibility_check(const Eigen::MatrixXd& g,
                                                         const StandardParabolic& p,
                                                         const RootSubset& i) {
    HorosphericalCoords base = horospherical_decompose(g, p);
    StandardParabolic pi = parabolic_from_subset(p, i);
    HorosphericalCoords coarse = horospherical_decompose(g, pi);
    RelativeSplit s = split_relative(base, p, i);

    RelativeCompatibilityReport rep{};
    rep.u_dev = (coarse.u - s.u_outer).cwiseAbs().maxCoeff();
    rep.a_dev = (coarse.a - s.a_outer).cwiseAbs().maxCoeff();
    Eigen::MatrixXd mk_expected = s.u_inner * s.a_inner * base.m * base.k;
    rep.mk_dev = (coarse.m * coarse.k - mk_expected).cwiseAbs().maxCoeff();
    rep.max_dev = std::max({rep.u_dev, rep.a_dev, rep.mk_dev});
    return rep;
}

}  // namespace slnd
