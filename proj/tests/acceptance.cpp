// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line each. Exits nonzero if any criterion fails.

#include "slnd/instability.hpp"
#include "slnd/kernels.hpp"
#include "slnd/nondivergence.hpp"
#include "slnd/parabolic.hpp"
#include "slnd/rng.hpp"
#include "slnd/textio.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <string>

using namespace slnd;

namespace {

int failures = 0;

void line(int idx, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, what.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

SubgroupSpec sl2_torus() {
    SubgroupSpec h;
    h.n = 2;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
    x(0, 0) = -1;
    x(1, 1) = 1;
    h.lie_basis = {x};
    h.window.box = {{0.0, 1.0}};
    h.stable_source = TorusSource{{-1, 1}};
    return h;
}

SubgroupSpec sl2_unipotent() {
    SubgroupSpec h;
    h.n = 2;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
    x(0, 1) = 1;
    h.lie_basis = {x};
    h.window.box = {{0.0, 1.0}};
    h.stable_source = ExplicitSource{{LatticeModule::from_rows({{0, 1}}, 2)}};
    return h;
}

StandardParabolic random_composition(int n, Rng& rng) {
    std::vector<int> blocks;
    int left = n;
    while (left > 0) {
        int b = 1 + int(rng.uniform_int(0, left - 1));
        blocks.push_back(b);
        left -= b;
    }
    return StandardParabolic(blocks);
}

// criterion 1: submodularity fuzz, exact squared comparison
void criterion_submodularity() {
    double t0 = omp_get_wtime();
    long violations = 0;
    double min_ratio = 1;
    for (int n = 2; n <= 5; ++n) {
        FuzzReport rep = fuzz_submodularity(n, 10000, 20250810 + n, ExecMode::parallel);
        violations += rep.violations;
        min_ratio = std::min(min_ratio, rep.min_ratio);
    }
    double dt = omp_get_wtime() - t0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "0 violations in 4x10^4 exact pairs, min lhs/rhs %.6f, %.1fs%s",
                  min_ratio, dt, dt < 60 ? "" : " [over 60s target]");
    line(1, violations == 0 && min_ratio >= 1.0 && dt < 60, "submodularity of covolumes", buf);
}

// criterion 2: horospherical round trip and relative compatibility
void criterion_roundtrip() {
    Rng rng(20250810);
    double worst_rt = 0;
    for (int n = 2; n <= 4; ++n)
        for (int i = 0; i < 1000; ++i) {
            Eigen::MatrixXd g = random_sl(n, rng);
            StandardParabolic p = random_composition(n, rng);
            HorosphericalCoords c = horospherical_decompose(g, p);
            worst_rt = std::max(worst_rt, (c.assemble() - g).cwiseAbs().maxCoeff());
        }
    double worst_cmp = 0;
    for (int i = 0; i < 1000; ++i) {
        int n = 2 + int(rng.uniform_int(0, 2));
        Eigen::MatrixXd g = random_sl(n, rng);
        StandardParabolic p = random_composition(n, rng);
        RootSubset sub;
        for (int s = 0; s < p.num_simple_roots(); ++s)
            if (rng.uniform() < 0.5) sub.included.insert(s);
        worst_cmp = std::max(worst_cmp, relative_compatibility_check(g, p, sub).max_dev);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "max reassembly %.2e < 1e-9, max compatibility deviation %.2e < 1e-8",
                  worst_rt, worst_cmp);
    line(2, worst_rt < 1e-9 && worst_cmp < 1e-8, "horospherical round trip + relative coordinates",
         buf);
}

// criterion 3: inductive sup bound over all primitive subspaces of height <= 50
void criterion_prop42() {
    double t0 = omp_get_wtime();
    GoodnessParams params{2.0, 0.5};

    SubgroupSpec torus = sl2_torus();
    Prop42Report a = prop42_verify(Eigen::MatrixXd::Identity(2, 2), torus, 1.0, 50, params, Int(1),
                                   1000, ExecMode::parallel);

    SubgroupSpec uni = sl2_unipotent();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g.diagonal() << 2.0, 0.5;
    Prop42Report b = prop42_verify(g, uni, 0.5, 50, params, Int(1), 1000, ExecMode::parallel);

    double dt = omp_get_wtime() - t0;
    bool pass = a.hypothesis_ok && a.pass && b.hypothesis_ok && b.pass && dt < 120;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "torus: min sup %.4f >= eps %.4g; unipotent: min sup %.4f >= eps %.4g; %ld+%ld "
                  "subspaces, %.1fs",
                  a.dims[0].min_sup, a.dims[0].eps_cascade, b.dims[0].min_sup,
                  b.dims[0].eps_cascade, a.dims[0].subspace_count, b.dims[0].subspace_count, dt);
    line(3, pass, "inductive criterion on SL2 fixtures", buf);
}

// criterion 4: cascade arithmetic, exact
void criterion_cascade() {
    RootRat eps = prop42_epsilon(Rat(1), 2, Int(1), Rat(1, 64), 2);
    bool pass = RootRat::equal(eps, RootRat{Rat(1, 16), 1});
    line(4, pass, "epsilon cascade arithmetic", "prop42_epsilon(1, 2, 1, 1/64, 2) == 1/16 exactly");
}

EscapeReport divergent_report(ExecMode mode) {
    SubgroupSpec h = sl2_torus();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g.diagonal() << std::exp(-5.0), std::exp(5.0);
    return km_escape_experiment(h, g, IMat::identity(2), 10000, 0.1, 20250810, mode);
}

EscapeReport rotation_report(ExecMode mode) {
    SubgroupSpec h = sl2_torus();
    Eigen::MatrixXd rot(2, 2);
    const double th = M_PI / 6;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return km_escape_experiment(h, rot, IMat::identity(2), 10000, 0.05, 20250810, mode);
}

// criterion 5: the non-divergence experiment on both fixtures
void criterion_escape() {
    double t0 = omp_get_wtime();
    EscapeReport div = divergent_report(ExecMode::parallel);
    double t1 = omp_get_wtime();
    EscapeReport rot = rotation_report(ExecMode::parallel);
    double t2 = omp_get_wtime();

    bool pass_a = div.delta_value <= std::exp(-4.0) && div.escape_fraction == 1.0;
    bool pass_b = rot.delta_value >= 0.5 && rot.escape_fraction <= 0.05;
    bool timing = (t1 - t0) < 60 && (t2 - t1) < 60;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "divergent: delta %.5f <= e^-4, escape %.3f = 1; rotation: delta %.3f >= 0.5, "
                  "escape %.4f <= 0.05; %.1fs + %.1fs",
                  div.delta_value, div.escape_fraction, rot.delta_value, rot.escape_fraction,
                  t1 - t0, t2 - t1);
    line(5, pass_a && pass_b && timing, "Monte Carlo non-divergence experiment", buf);
}

CgoodReport cgood_fixture(int which, ExecMode mode) {
    Window w01{{{0.0, 1.0}}};
    Window w11{{{-1.0, 1.0}}};
    auto fx = [](const std::vector<double>& x) { return x[0]; };
    auto fx2 = [](const std::vector<double>& x) { return x[0] * x[0]; };
    switch (which) {
        case 0: return cgood_check(fx, w01, GoodnessParams{1.0, 1.0}, 1000, 16, 20250810, mode);
        case 1: return cgood_check(fx2, w11, GoodnessParams{2.0, 0.5}, 1000, 16, 20250810, mode);
        default: return cgood_check(fx, w01, GoodnessParams{0.5, 1.0}, 1000, 16, 20250810, mode);
    }
}

// criterion 6: (C,alpha)-goodness fixtures
void criterion_cgood() {
    CgoodReport lin = cgood_fixture(0, ExecMode::parallel);
    CgoodReport quad = cgood_fixture(1, ExecMode::parallel);
    CgoodReport bad = cgood_fixture(2, ExecMode::parallel);
    bool pass = lin.violations.empty() && quad.violations.empty() && !bad.violations.empty();
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "(x,1,1): %zu violations; (x^2,2,1/2): %zu; deliberately-false (x,1/2,1): %zu > 0",
                  lin.violations.size(), quad.violations.size(), bad.violations.size());
    line(6, pass, "(C,alpha)-goodness checker", buf);
}

// criterion 7: Hilbert-Mumford LP vs invariant vanishing on the n=2 family
void criterion_git() {
    auto gens = torus_zero_weight_monomials(2, {1, 1}, 4);
    bool agree = true;
    bool contracts = true;
    long unstable = 0, total = 0;
    for (int x1 = -1; x1 <= 1; ++x1)
        for (int x2 = -1; x2 <= 1; ++x2)
            for (int y1 = -1; y1 <= 1; ++y1)
                for (int y2 = -1; y2 <= 1; ++y2) {
                    if (!x1 && !x2 && !y1 && !y2) continue;
                    ++total;
                    WeightedVector v;
                    v.n = 2;
                    v.summands.resize(2);
                    for (auto& s : v.summands) {
                        s.n = 2;
                        s.degree = 1;
                    }
                    if (x1) v.summands[0].comps.emplace_back(0b01u, Rat(x1));
                    if (x2) v.summands[0].comps.emplace_back(0b10u, Rat(x2));
                    if (y1) v.summands[1].comps.emplace_back(0b01u, Rat(y1));
                    if (y2) v.summands[1].comps.emplace_back(0b10u, Rat(y2));
                    auto res = torus_instability(v);
                    if (res.destabilizing.has_value() != invariant_vanish_test(v, gens))
                        agree = false;
                    if (res.destabilizing) {
                        ++unstable;
                        double before = 0, after = 0;
                        for (const auto& s : v.summands)
                            for (const auto& [mask, coef] : s.comps) {
                                double w = 0;
                                for (int i = 0; i < 2; ++i)
                                    if (mask & (1u << i)) w += double(res.destabilizing->weights()[i]);
                                double c = to_double(coef);
                                before += c * c;
                                double scaled = c * std::pow(1e3, w);
                                after += scaled * scaled;
                            }
                        if (std::sqrt(after) > 1e-3 * std::sqrt(before) * (1 + 1e-9))
                            contracts = false;
                    }
                }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%ld/%ld unstable, LP == invariant vanishing on all, contraction >= 10^3 at t=10^3",
                  unstable, total);
    line(7, agree && contracts, "GIT cross-validation", buf);
}

// criterion 8: boundary classification of the three SL3 trajectories
void criterion_boundary() {
    StandardParabolic borel = StandardParabolic::borel(3);
    auto diag3 = [](double a, double b, double c) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
        m.diagonal() << a, b, c;
        return m;
    };
    std::vector<Eigen::MatrixXd> t1, t2, t3;
    for (int k = 0; k <= 9; ++k) {
        t1.push_back(diag3(std::exp(double(k)), 1.0, std::exp(-double(k))));
        t2.push_back(diag3(std::exp(double(k)), std::exp(double(k)), std::exp(-2.0 * k)));
        t3.push_back(Eigen::MatrixXd::Identity(3, 3));
    }
    BoundaryReport r1 = boundary_classify(t1, borel);
    BoundaryReport r2 = boundary_classify(t2, borel);
    BoundaryReport r3 = boundary_classify(t3, borel);
    bool pass = r1.outcome == BoundaryReport::Outcome::boundary && r1.bounded_roots.included.empty() &&
                r2.outcome == BoundaryReport::Outcome::boundary &&
                r2.bounded_roots.included == std::set<int>{0} &&
                r2.stratum->blocks() == std::vector<int>{2, 1} &&
                r3.outcome == BoundaryReport::Outcome::interior;
    line(8, pass, "boundary stratum classification",
         "fixtures classify to I = {}, I = {alpha_1}, interior");
}

// criterion 9: embedding compatibility SL2 -> SL3
void criterion_embedding() {
    BlockEmbedding emb{2, 3, 1};
    Cocharacter a({1, -1});
    Rng rng(20250810);
    double worst = 0;
    for (int i = 0; i < 100; ++i)
        worst = std::max(worst, embedding_compatibility_check(random_sl(2, rng), emb, a).max_dev);
    char buf[96];
    std::snprintf(buf, sizeof buf, "max deviation %.2e < 1e-8 over 100 random elements", worst);
    line(9, worst < 1e-8, "embedding compatibility of coordinates", buf);
}

std::string determinism_blob() {
    EscapeReport div = divergent_report(ExecMode::parallel);
    EscapeReport rot = rotation_report(ExecMode::parallel);
    CgoodReport lin = cgood_fixture(0, ExecMode::parallel);
    CgoodReport quad = cgood_fixture(1, ExecMode::parallel);
    Json j;
    j["divergent"] = Json{{"escape", div.escape_fraction}, {"delta", div.delta_value}};
    Json hist = Json::array();
    for (const auto& bin : div.histogram) hist.push_back(bin.count);
    j["divergent_hist"] = hist;
    j["rotation"] = Json{{"escape", rot.escape_fraction}, {"delta", rot.delta_value}};
    j["cgood_linear"] =
        Json{{"tested", lin.balls_tested}, {"worst", lin.worst_ratio}, {"v", lin.violations.size()}};
    j["cgood_square"] =
        Json{{"tested", quad.balls_tested}, {"worst", quad.worst_ratio}, {"v", quad.violations.size()}};
    return json_dump_17(j);
}

// criterion 10: byte-identical reports across 1, 2 and 8 worker threads
void criterion_determinism() {
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    std::string one = determinism_blob();
    omp_set_num_threads(2);
    std::string two = determinism_blob();
    omp_set_num_threads(8);
    std::string eight = determinism_blob();
    omp_set_num_threads(saved);
    bool pass = one == two && two == eight;
    char buf[96];
    std::snprintf(buf, sizeof buf, "criteria 5-6 reports, %zu bytes each", one.size());
    line(10, pass, "byte-identical reports across 1/2/8 threads", buf);
}

}  // namespace

int main() {
    criterion_submodularity();
    criterion_roundtrip();
    criterion_prop42();
    criterion_cascade();
    criterion_escape();
    criterion_cgood();
    criterion_git();
    criterion_boundary();
    criterion_embedding();
    criterion_determinism();
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all criteria passed\n");
    return failures ? 1 : 0;
}
