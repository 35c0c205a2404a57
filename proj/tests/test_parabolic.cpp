#include "slnd/kernels.hpp"
#include "slnd/parabolic.hpp"
#include "slnd/rng.hpp"

#include "doctest.h"

using namespace slnd;

namespace {

Eigen::MatrixXd random_so(int n, Rng& rng) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

// random legal horospherical factors for a composition
HorosphericalCoords random_factors(const StandardParabolic& p, Rng& rng) {
    const int n = p.dim();
    HorosphericalCoords c;
    c.u = Eigen::MatrixXd::Identity(n, n);
    for (int b1 = 0; b1 < p.num_blocks(); ++b1)
        for (int b2 = b1 + 1; b2 < p.num_blocks(); ++b2)
            for (int i = 0; i < p.blocks()[b1]; ++i)
                for (int j = 0; j < p.blocks()[b2]; ++j)
                    c.u(p.block_start(b1) + i, p.block_start(b2) + j) = rng.uniform(-2, 2);
    std::vector<double> logs(p.num_blocks());
    double mean = 0;
    for (int b = 0; b < p.num_blocks(); ++b) {
        logs[b] = rng.uniform(-1.5, 1.5);
        mean += logs[b] * p.blocks()[b];
    }
    mean /= n;
    c.a = Eigen::MatrixXd::Zero(n, n);
    c.block_scalars.resize(p.num_blocks());
    for (int b = 0; b < p.num_blocks(); ++b) {
        c.block_scalars[b] = std::exp(logs[b] - mean);
        for (int i = 0; i < p.blocks()[b]; ++i)
            c.a(p.block_start(b) + i, p.block_start(b) + i) = c.block_scalars[b];
    }
    c.m = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b < p.num_blocks(); ++b) {
        const int w = p.blocks()[b];
        Eigen::MatrixXd blk(w, w);
        for (;;) {
            for (int i = 0; i < w; ++i)
                for (int j = 0; j < w; ++j) blk(i, j) = rng.normal();
            double det = blk.determinant();
            if (std::abs(det) < 1e-3) continue;
            if (det < 0) blk.row(0) = -blk.row(0);
            blk /= std::pow(std::abs(det), 1.0 / w);
            break;
        }
        c.m.block(p.block_start(b), p.block_start(b), w, w) = blk;
    }
    c.k = random_so(n, rng);
    return c;
}

}  // namespace

TEST_CASE("parabolic_from_subset: fixtures") {
    StandardParabolic borel3 = StandardParabolic::borel(3);
    CHECK(parabolic_from_subset(borel3, RootSubset{{0}}).blocks() == std::vector<int>{2, 1});
    CHECK(parabolic_from_subset(borel3, RootSubset::empty()) == borel3);
    CHECK(parabolic_from_subset(borel3, RootSubset::full(borel3)).blocks() == std::vector<int>{3});
    StandardParabolic p({1, 1, 2});
    CHECK(parabolic_from_subset(p, RootSubset{{1}}).blocks() == std::vector<int>{1, 3});
}

TEST_CASE("simple roots: fixtures") {
    StandardParabolic borel3 = StandardParabolic::borel(3);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a.diagonal() << 4, 2, 0.125;
    HorosphericalCoords c = horospherical_decompose(a, borel3);
    auto roots = simple_root_values(borel3, c);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(2.0));
    CHECK(roots[1] == doctest::Approx(16.0));

    StandardParabolic p21({2, 1});
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
    b.diagonal() << 2, 2, 0.25;
    auto roots21 = simple_root_values(p21, horospherical_decompose(b, p21));
    REQUIRE(roots21.size() == 1);
    CHECK(roots21[0] == doctest::Approx(8.0));

    CHECK(simple_root_values(StandardParabolic::whole_group(3),
                             horospherical_decompose(b, StandardParabolic::whole_group(3)))
              .empty());
}

TEST_CASE("horospherical_decompose: SL2 fixtures") {
    StandardParabolic borel = StandardParabolic::borel(2);

    Eigen::MatrixXd g(2, 2);
    g << 2, 0.5, 0, 0.5;
    HorosphericalCoords c = horospherical_decompose(g, borel);
    CHECK(c.u(0, 1) == doctest::Approx(1.0));
    CHECK(c.block_scalars[0] == doctest::Approx(2.0));
    CHECK(c.block_scalars[1] == doctest::Approx(0.5));
    CHECK((c.m - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.k - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    double th = 0.7;
    Eigen::MatrixXd rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    c = horospherical_decompose(rot, borel);
    CHECK((c.u - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.a - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.k - rot).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::MatrixXd low(2, 2);
    low << 1, 0, 1, 1;
    c = horospherical_decompose(low, borel);
    CHECK(c.u(0, 1) == doctest::Approx(0.5));
    CHECK(c.block_scalars[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(c.block_scalars[1] == doctest::Approx(std::sqrt(2.0)));
    CHECK(c.k(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(c.k(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK((c.assemble() - low).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("horospherical_decompose: round trip and structure") {
    Rng rng(42);
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::MatrixXd g = random_sl(n, rng);
            // random composition
            std::vector<int> blocks;
            int left = n;
            while (left > 0) {
                int b = 1 + int(rng.uniform_int(0, left - 1));
                blocks.push_back(b);
                left -= b;
            }
            StandardParabolic p(blocks);
            HorosphericalCoords c = horospherical_decompose(g, p);
            CHECK((c.assemble() - g).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((c.k * c.k.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
                  1e-9);
            CHECK((c.a * c.m - c.m * c.a).cwiseAbs().maxCoeff() < 1e-9);
            double prod = 1;
            for (int b = 0; b < p.num_blocks(); ++b)
                prod *= std::pow(c.block_scalars[b], p.blocks()[b]);
            CHECK(prod == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("horospherical_decompose: uniqueness against planted factors") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + int(rng.uniform_int(0, 2));
        std::vector<int> blocks;
        int left = n;
        while (left > 0) {
            int b = 1 + int(rng.uniform_int(0, left - 1));
            blocks.push_back(b);
            left -= b;
        }
        StandardParabolic p(blocks);
        HorosphericalCoords planted = random_factors(p, rng);
        HorosphericalCoords rec = horospherical_decompose(planted.assemble(), p);
        CHECK((rec.u - planted.u).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((rec.a - planted.a).cwiseAbs().maxCoeff() < 1e-8);
        // m and k only up to the M∩K ambiguity: compare the product
        CHECK((rec.m * rec.k - planted.m * planted.k).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("relative compatibility: fixtures") {
    StandardParabolic borel = StandardParabolic::borel(3);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d.diagonal() << 2, 1, 0.5;
    auto rep = relative_compatibility_check(d, borel, RootSubset{{0}});
    CHECK(rep.max_dev < 1e-12);

    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd g = random_sl(3, rng);
        auto r = relative_compatibility_check(g, borel, RootSubset{{int(rng.uniform_int(0, 1))}});
        CHECK(r.max_dev < 1e-8);
    }

    Eigen::MatrixXd g = random_sl(3, rng);
    auto vac = relative_compatibility_check(g, borel, RootSubset::full(borel));
    CHECK(vac.max_dev < 1e-8);  // P_I = G: vacuous pass
}

TEST_CASE("relative compatibility: random (g, P, I)") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + int(rng.uniform_int(0, 2));
        Eigen::MatrixXd g = random_sl(n, rng);
        std::vector<int> blocks;
        int left = n;
        while (left > 0) {
            int b = 1 + int(rng.uniform_int(0, left - 1));
            blocks.push_back(b);
            left -= b;
        }
        StandardParabolic p(blocks);
        RootSubset i;
        for (int s = 0; s < p.num_simple_roots(); ++s)
            if (rng.uniform() < 0.5) i.included.insert(s);
        CHECK(relative_compatibility_check(g, p, i).max_dev < 1e-8);
    }
}

TEST_CASE("siegel membership: fixtures") {
    StandardParabolic borel = StandardParabolic::borel(2);
    SiegelSet generous{borel, 1.0, 100.0, 100.0};
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d.diagonal() << 10, 0.1;
    CHECK(siegel_membership(d, generous));
    Eigen::MatrixXd dneg = Eigen::MatrixXd::Zero(2, 2);
    dneg.diagonal() << 0.1, 10;
    CHECK_FALSE(siegel_membership(dneg, generous));

    Eigen::MatrixXd shear(2, 2);
    shear << 1, 5, 0, 1;
    SiegelSet tight{borel, 1.0, 2.0, 100.0};
    CHECK_FALSE(siegel_membership(Eigen::MatrixXd(shear * d), tight));
}

TEST_CASE("reduce_to_siegel: fixtures") {
    SiegelReduction r = reduce_to_siegel(Eigen::MatrixXd::Identity(2, 2));
    CHECK(r.verified);
    CHECK(r.exact_layer);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d.diagonal() << 0.1, 10;
    r = reduce_to_siegel(d);
    CHECK(r.verified);
    auto roots = simple_root_values(r.verified_in.parabolic, r.coords);
    CHECK(roots[0] > 0.866);

    Eigen::MatrixXd shear(2, 2);
    shear << 1, 7, 0, 1;
    r = reduce_to_siegel(shear);
    CHECK(r.verified);
    CHECK(r.gamma == IMat(2, 2, {Int(1), Int(-7), Int(0), Int(1)}));
    CHECK(std::abs(r.coords.u(0, 1)) <= 0.5 + 1e-9);
}

TEST_CASE("reduce_to_siegel: random, a-posteriori verification") {
    Rng rng(2718);
    for (int n = 2; n <= 4; ++n)
        for (int trial = 0; trial < 40; ++trial) {
            Eigen::MatrixXd g = random_sl(n, rng);
            SiegelReduction r = reduce_to_siegel(g);
            CHECK(r.verified);
            // gamma is unimodular and gamma·g reassembles to the coords
            QMat gq = to_rat(r.gamma);
            Rat det = det_q(gq);
            CHECK(det == 1);
            Eigen::MatrixXd moved = to_eigen(r.gamma) * g;
            CHECK((r.coords.assemble() - moved).cwiseAbs().maxCoeff() < 1e-8);
        }
}

TEST_CASE("lll_reduce: transform is unimodular and exact") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + int(rng.uniform_int(0, 3));
        Eigen::MatrixXd g = random_sl(n, rng);
        LLLResult r = lll_reduce(g);
        Rat det = det_q(to_rat(r.transform));
        CHECK((det == 1 || det == -1));
        CHECK((to_eigen(r.transform) * g - r.basis).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("boundary_classify: three SL3 fixtures") {
    StandardParabolic borel = StandardParabolic::borel(3);
    std::vector<Eigen::MatrixXd> traj;

    for (int k = 0; k <= 9; ++k) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
        g.diagonal() << std::exp(double(k)), 1.0, std::exp(-double(k));
        traj.push_back(g);
    }
    BoundaryReport rep = boundary_classify(traj, borel);
    CHECK(rep.outcome == BoundaryReport::Outcome::boundary);
    CHECK(rep.bounded_roots.included.empty());  // I = {}: full flag stratum
    CHECK(rep.stratum->blocks() == std::vector<int>{1, 1, 1});

    traj.clear();
    for (int k = 0; k <= 9; ++k) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
        g.diagonal() << std::exp(double(k)), std::exp(double(k)), std::exp(-2.0 * k);
        traj.push_back(g);
    }
    rep = boundary_classify(traj, borel);
    CHECK(rep.outcome == BoundaryReport::Outcome::boundary);
    CHECK(rep.bounded_roots.included == std::set<int>{0});  // alpha_1 stays at 1
    CHECK(rep.stratum->blocks() == std::vector<int>{2, 1});

    traj.assign(8, Eigen::MatrixXd::Identity(3, 3));
    rep = boundary_classify(traj, borel);
    CHECK(rep.outcome == BoundaryReport::Outcome::interior);
}

TEST_CASE("boundary_classify: planted divergent root sets are recovered") {
    Rng rng(909);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 3 + int(rng.uniform_int(0, 1));
        StandardParabolic p = StandardParabolic::borel(n);
        // prescribe a divergent root set D; the rest stay at 1
        std::set<int> divergent;
        for (int s = 0; s < p.num_simple_roots(); ++s)
            if (rng.uniform() < 0.5) divergent.insert(s);
        if (divergent.empty()) divergent.insert(0);

        HorosphericalCoords frame = random_factors(p, rng);
        std::vector<Eigen::MatrixXd> traj;
        for (int step = 0; step <= 9; ++step) {
            // block scalars with root s growing e^step for s in D
            std::vector<double> logt(n, 0.0);
            for (int i = n - 2; i >= 0; --i)
                logt[i] = logt[i + 1] + (divergent.count(i) ? double(step) : 0.0);
            double mean = 0;
            for (double v : logt) mean += v;
            mean /= n;
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) a(i, i) = std::exp(logt[i] - mean);
            traj.push_back(frame.u * a * frame.m * frame.k);
        }
        BoundaryReport rep = boundary_classify(traj, p);
        REQUIRE(rep.outcome == BoundaryReport::Outcome::boundary);
        std::set<int> expected_bounded;
        for (int s = 0; s < p.num_simple_roots(); ++s)
            if (!divergent.count(s)) expected_bounded.insert(s);
        CHECK(rep.bounded_roots.included == expected_bounded);
        // the planted unipotent part is recovered from the final element
        // (loose tolerance: the a-part spans up to e^27, which costs digits)
        HorosphericalCoords fine = horospherical_decompose(traj.back(), p);
        CHECK((fine.u - frame.u).cwiseAbs().maxCoeff() < 1e-3);
    }
}

TEST_CASE("siegel sets: the coarse set sits inside an enlarged fine set") {
    // elements of a Siegel set for the coarser parabolic land in a Siegel set
    // for the Borel with implementation-level constants (checked empirically)
    Rng rng(606);
    StandardParabolic coarse({2, 1});
    StandardParabolic borel = StandardParabolic::borel(3);
    SiegelSet coarse_set{coarse, 2.0, 2.0 + 1e-9, 2.0 + 1e-9};
    SiegelSet fine{borel, 5e-3, 20.0, 1.0 + 1e-9};
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::MatrixXd u = Eigen::MatrixXd::Identity(3, 3);
        u(0, 2) = rng.uniform(-2, 2);
        u(1, 2) = rng.uniform(-2, 2);
        Eigen::MatrixXd m2(2, 2);
        for (;;) {
            for (int i = 0; i < 4; ++i) m2(i / 2, i % 2) = rng.normal();
            double det = m2.determinant();
            if (std::abs(det) < 0.2) continue;
            if (det < 0) m2.row(0) = -m2.row(0);
            m2 /= std::sqrt(std::abs(det));
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(m2);
            if (svd.singularValues()(0) <= 2.0) break;
        }
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
        m.block(0, 0, 2, 2) = m2;
        double ratio = rng.uniform(2.1, 9.0);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
        a(0, 0) = a(1, 1) = std::pow(ratio, 1.0 / 3);
        a(2, 2) = std::pow(ratio, -2.0 / 3);
        Eigen::MatrixXd g = u * a * m * random_so(3, rng);
        REQUIRE(siegel_membership(g, coarse_set));
        CHECK(siegel_membership(g, fine));
    }
}

TEST_CASE("boundary_classify: unclassified is explicit") {
    StandardParabolic borel = StandardParabolic::borel(2);
    std::vector<Eigen::MatrixXd> traj;
    for (int k = 0; k <= 9; ++k) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
        double t = 200.0 * ((k % 2) ? 2.0 : 1.0);  // oscillates above the band, below T
        g.diagonal() << std::sqrt(t), 1.0 / std::sqrt(t);
        traj.push_back(g);
    }
    BoundaryReport rep = boundary_classify(traj, borel);
    CHECK(rep.outcome == BoundaryReport::Outcome::unclassified);
    CHECK(rep.fates[0] == RootFate::unclassified);
}

TEST_CASE("rational_boundary_action: fixtures") {
    StandardParabolic borel = StandardParabolic::borel(2);
    Rng rng(3);
    Eigen::MatrixXd g = random_sl(2, rng);
    HorosphericalCoords c = horospherical_decompose(g, borel);

    auto res = rational_boundary_action(GroupElementQ::identity(2), c, borel);
    CHECK(res.assembly_dev < 1e-9);
    CHECK((res.coords.u - c.u).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((res.coords.a - c.a).cwiseAbs().maxCoeff() < 1e-9);

    GroupElementQ q(QMat(2, 2, {Rat(1), Rat(1), Rat(0), Rat(1)}));
    res = rational_boundary_action(q, c, borel);
    CHECK(res.assembly_dev < 1e-9);
    CHECK(res.frame.identity_perm());

    GroupElementQ weyl(QMat(2, 2, {Rat(0), Rat(-1), Rat(1), Rat(0)}));
    res = rational_boundary_action(weyl, c, borel);
    CHECK(res.assembly_dev < 1e-9);
    CHECK_FALSE(res.frame.identity_perm());  // opposite Borel

    GroupElementQ bad(QMat(2, 2, {Rat(2), Rat(1), Rat(1), Rat(1)}));
    CHECK_THROWS_AS(rational_boundary_action(bad, c, borel), std::invalid_argument);
}

TEST_CASE("rational_boundary_action: SL3 block parabolic, flag moved by a rotation") {
    StandardParabolic p21({2, 1});
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd g = random_sl(3, rng);
        HorosphericalCoords c = horospherical_decompose(g, p21);

        // q inside P: the flag is preserved, frame stays standard
        GroupElementQ inside(QMat(3, 3,
                                  {Rat(1), Rat(2), Rat(1), Rat(0), Rat(1), Rat(-1), Rat(0), Rat(0),
                                   Rat(1)}));
        auto res = rational_boundary_action(inside, c, p21);
        CHECK(res.assembly_dev < 1e-9);
        CHECK(res.frame.identity_perm());

        // q sending the suffix line span(e3) to a different coordinate line
        GroupElementQ cyc(QMat(3, 3,
                               {Rat(0), Rat(1), Rat(0), Rat(0), Rat(0), Rat(1), Rat(1), Rat(0),
                                Rat(0)}));
        res = rational_boundary_action(cyc, c, p21);
        CHECK(res.assembly_dev < 1e-9);
        CHECK_FALSE(res.frame.identity_perm());
        CHECK(res.frame.parabolic == p21);
    }
}

TEST_CASE("parabolic_from_cocharacter: fixtures") {
    ParabolicFrame f = parabolic_from_cocharacter(Cocharacter({2, 1, -3}));
    CHECK(f.parabolic.blocks() == std::vector<int>{1, 1, 1});
    CHECK(f.identity_perm());

    f = parabolic_from_cocharacter(Cocharacter({1, 1, -2}));
    CHECK(f.parabolic.blocks() == std::vector<int>{2, 1});

    f = parabolic_from_cocharacter(Cocharacter({0, 0, 0}));
    CHECK(f.parabolic.blocks() == std::vector<int>{3});
}

TEST_CASE("parabolic_from_cocharacter: membership matches conjugation limits") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3;
        std::vector<int64_t> w = {int64_t(rng.uniform_int(-2, 2)), int64_t(rng.uniform_int(-2, 2)), 0};
        w[2] = -w[0] - w[1];
        Cocharacter a(w);
        ParabolicFrame f = parabolic_from_cocharacter(a);

        // positive test: a frame member stays bounded under a_t^{-1} (.) a_t
        Eigen::MatrixXd s = f.perm_matrix();
        Eigen::MatrixXd upper = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) upper(i, j) = rng.uniform(-2, 2) + (i == j ? 3 : 0);
        Eigen::MatrixXd member = s.transpose() * upper * s;
        CHECK(frame_membership(member, f, 1e-12));
        Eigen::MatrixXd a3 = cocharacter_at(a, 1e3), a6 = cocharacter_at(a, 1e6);
        double n3 = (a3.inverse() * member * a3).cwiseAbs().maxCoeff();
        double n6 = (a6.inverse() * member * a6).cwiseAbs().maxCoeff();
        CHECK(n6 <= n3 * (1 + 1e-6));

        // negative test: an entry below the block structure blows up
        bool has_below = false;
        Eigen::MatrixXd below = member;
        for (int i = 0; i < n && !has_below; ++i)
            for (int j = 0; j < n && !has_below; ++j)
                if (a.weights()[i] < a.weights()[j]) {
                    below(i, j) += 1.0;
                    has_below = true;
                }
        if (has_below) {
            CHECK_FALSE(frame_membership(below, f, 1e-12));
            double m3 = (a3.inverse() * below * a3).cwiseAbs().maxCoeff();
            double m6 = (a6.inverse() * below * a6).cwiseAbs().maxCoeff();
            CHECK(m6 > m3 * 10);
        }
    }
}

TEST_CASE("embedding compatibility: SL2 in SL3 fixture") {
    BlockEmbedding emb{2, 3, 1};
    Cocharacter a({1, -1});
    Rng rng(23);

    auto rep = embedding_compatibility_check(Eigen::MatrixXd::Identity(2, 2), emb, a);
    CHECK(rep.max_dev < 1e-12);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d.diagonal() << 3, 1.0 / 3;
    rep = embedding_compatibility_check(d, emb, a);
    CHECK(rep.max_dev < 1e-12);

    for (int trial = 0; trial < 100; ++trial) {
        rep = embedding_compatibility_check(random_sl(2, rng), emb, a);
        CHECK(rep.max_dev < 1e-8);
    }

    BlockEmbedding bad{2, 3, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("embedding compatibility: two copies") {
    BlockEmbedding emb{2, 5, 2};
    Cocharacter a({1, -1});
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        auto rep = embedding_compatibility_check(random_sl(2, rng), emb, a);
        CHECK(rep.max_dev < 1e-8);
    }
}
