#include "slnd/instability.hpp"
#include "slnd/rng.hpp"

#include "doctest.h"

#include <cmath>

using namespace slnd;

namespace {

// v = (x1, x2) ⊕ (y1, y2) in two copies of the standard representation of SL2
WeightedVector pair_vector(int x1, int x2, int y1, int y2) {
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
    return v;
}

double contracted_norm(const WeightedVector& v, const Cocharacter& b, double t) {
    double sq = 0;
    for (const auto& s : v.summands)
        for (const auto& [mask, coef] : s.comps) {
            double w = 0;
            for (int i = 0; i < v.n; ++i)
                if (mask & (1u << i)) w += double(b.weights()[i]);
            double scaled = to_double(coef) * std::pow(t, w);
            sq += scaled * scaled;
        }
    return std::sqrt(sq);
}

double plain_norm(const WeightedVector& v) {
    double sq = 0;
    for (const auto& s : v.summands) sq += to_double(s.norm_sq());
    return std::sqrt(sq);
}

}  // namespace

TEST_CASE("torus zero-weight monomials: standard rep of SL2") {
    // single copy of Q^2: the invariant ring ideal is generated by x1 x2
    auto gens = torus_zero_weight_monomials(2, {1}, 2);
    REQUIRE(gens.size() == 1);
    WeightedVector v;
    v.n = 2;
    v.summands.resize(1);
    v.summands[0] = ExteriorVector{2, 1, {{0b01u, Rat(3)}, {0b10u, Rat(5)}}};
    CHECK(gens[0].eval(v) == Rat(15));
}

TEST_CASE("invariant_vanish_test: fixtures") {
    auto gens = torus_zero_weight_monomials(2, {1}, 2);
    WeightedVector e1;
    e1.n = 2;
    e1.summands = {ExteriorVector{2, 1, {{0b01u, Rat(1)}}}};
    CHECK(invariant_vanish_test(e1, gens));  // xy vanishes: unstable by invariants

    WeightedVector both;
    both.n = 2;
    both.summands = {ExteriorVector{2, 1, {{0b01u, Rat(1)}, {0b10u, Rat(1)}}}};
    CHECK_FALSE(invariant_vanish_test(both, gens));  // xy = 1

    WeightedVector zero;
    zero.n = 2;
    zero.summands = {ExteriorVector{2, 1, {}}};
    CHECK(invariant_vanish_test(zero, gens));
}

TEST_CASE("torus_instability: fixtures") {
    WeightedVector e1;
    e1.n = 2;
    e1.summands = {ExteriorVector{2, 1, {{0b01u, Rat(1)}}}};
    auto res = torus_instability(e1);
    REQUIRE(res.destabilizing.has_value());
    const auto& b = res.destabilizing->weights();
    CHECK(b[0] <= -1);
    CHECK(b[0] + b[1] == 0);

    // determinant weight: b1 + b2 <= -1 against the trace-zero constraint
    WeightedVector det;
    det.n = 2;
    det.summands = {ExteriorVector{2, 2, {{0b11u, Rat(1)}}}};
    res = torus_instability(det);
    CHECK_FALSE(res.destabilizing.has_value());
    REQUIRE(res.hull_coefficients.size() == 1);
    CHECK(res.hull_coefficients[0] == Rat(1));
    CHECK(res.hull_level == Rat(1));

    // e1 ⊕ e2: need b1 <= -1 and b2 <= -1, infeasible
    res = torus_instability(pair_vector(1, 0, 0, 1));
    CHECK_FALSE(res.destabilizing.has_value());
    CHECK(res.hull_level == Rat(1, 2));

    WeightedVector zero;
    zero.n = 2;
    zero.summands = {ExteriorVector{2, 1, {}}};
    CHECK_THROWS_AS(torus_instability(zero), std::invalid_argument);
}

TEST_CASE("torus_instability: mixed exterior degrees") {
    // e_1 ⊕ (e_1 ∧ e_2): the determinant weight blocks every contraction
    WeightedVector v;
    v.n = 2;
    v.summands = {ExteriorVector{2, 1, {{0b01u, Rat(1)}}},
                  ExteriorVector{2, 2, {{0b11u, Rat(1)}}}};
    auto res = torus_instability(v);
    CHECK_FALSE(res.destabilizing.has_value());

    // dropping the determinant summand restores instability
    v.summands.pop_back();
    res = torus_instability(v);
    CHECK(res.destabilizing.has_value());
}

TEST_CASE("GIT cross-validation: LP instability agrees with invariant vanishing") {
    auto gens = torus_zero_weight_monomials(2, {1, 1}, 4);
    CHECK(gens.size() >= 4);
    long unstable = 0;
    for (int x1 = -1; x1 <= 1; ++x1)
        for (int x2 = -1; x2 <= 1; ++x2)
            for (int y1 = -1; y1 <= 1; ++y1)
                for (int y2 = -1; y2 <= 1; ++y2) {
                    if (!x1 && !x2 && !y1 && !y2) continue;
                    WeightedVector v = pair_vector(x1, x2, y1, y2);
                    auto res = torus_instability(v);
                    bool lp_unstable = res.destabilizing.has_value();
                    CHECK(lp_unstable == invariant_vanish_test(v, gens));
                    if (lp_unstable) {
                        ++unstable;
                        // contraction witnessed: 10^3-fold at t = 10^3
                        double before = plain_norm(v);
                        double after = contracted_norm(v, *res.destabilizing, 1e3);
                        CHECK(after <= 1e-3 * before * (1 + 1e-9));
                    }
                }
    CHECK(unstable > 0);
}

TEST_CASE("torus_instability: permutation equivariance") {
    Rng rng(5150);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 3;
        WeightedVector v;
        v.n = n;
        v.summands = {ExteriorVector{n, 1, {}}};
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < 0.6)
                v.summands[0].comps.emplace_back(1u << i, Rat(1 + int(rng.uniform_int(0, 2))));
        if (v.is_zero()) continue;
        auto base = torus_instability(v);

        // cyclic relabeling of coordinates
        WeightedVector w;
        w.n = n;
        w.summands = {ExteriorVector{n, 1, {}}};
        for (const auto& [mask, c] : v.summands[0].comps) {
            uint32_t moved = 0;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) moved |= 1u << ((i + 1) % n);
            w.summands[0].comps.emplace_back(moved, c);
        }
        std::sort(w.summands[0].comps.begin(), w.summands[0].comps.end(),
                  [](auto& a, auto& b) { return a.first < b.first; });
        auto moved = torus_instability(w);
        CHECK(base.destabilizing.has_value() == moved.destabilizing.has_value());
        if (base.destabilizing) {
            // the relabeled answer contracts the relabeled vector
            std::vector<int64_t> bw = base.destabilizing->weights();
            std::vector<int64_t> rot(n);
            for (int i = 0; i < n; ++i) rot[(i + 1) % n] = bw[i];
            // ties at exactly 10^3-fold contraction are broken by rounding
            CHECK(contracted_norm(w, Cocharacter(rot), 1e3) <= 1e-3 * plain_norm(w) * (1 + 1e-9));
        }
    }
}

TEST_CASE("flag_cocharacter: fixtures") {
    // SL2: E12 has weight (1,-1)
    Cocharacter b = flag_cocharacter({{1, -1}});
    CHECK(b.weights()[0] - b.weights()[1] <= -1);

    // SL3 Borel radical
    b = flag_cocharacter({{1, -1, 0}, {1, 0, -1}, {0, 1, -1}});
    auto pair = [&](std::vector<int64_t> w) {
        int64_t s = 0;
        for (int i = 0; i < 3; ++i) s += w[i] * b.weights()[i];
        return s;
    };
    CHECK(pair({1, -1, 0}) <= -1);
    CHECK(pair({1, 0, -1}) <= -1);
    CHECK(pair({0, 1, -1}) <= -1);

    CHECK_THROWS_AS(flag_cocharacter({}), std::invalid_argument);
    CHECK_THROWS_AS(flag_cocharacter({{1, -1}, {-1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(flag_cocharacter({{2, -1, -1}}), std::invalid_argument);
}

TEST_CASE("flag_cocharacter: contracts the radical, expands the opposite") {
    Cocharacter b = flag_cocharacter({{1, -1, 0}, {1, 0, -1}, {0, 1, -1}});
    for (auto& w : std::vector<std::vector<int64_t>>{{1, -1, 0}, {1, 0, -1}, {0, 1, -1}}) {
        int64_t s = 0, sneg = 0;
        for (int i = 0; i < 3; ++i) {
            s += w[i] * b.weights()[i];
            sneg -= w[i] * b.weights()[i];
        }
        CHECK(s <= -1);
        CHECK(sneg >= 1);  // opposite-radical vectors expand
    }
}

TEST_CASE("generic_perturbation: fixtures") {
    Cocharacter b({1, 1, -2});
    StandardParabolic p = parabolic_from_cocharacter(b).parabolic;
    Cocharacter a = generic_perturbation(b, p);
    std::set<int64_t> distinct(a.weights().begin(), a.weights().end());
    CHECK(int(distinct.size()) == 3);
    CHECK(a.weights()[0] > a.weights()[1]);  // ties broken by position, order kept
    CHECK(a.weights()[1] > a.weights()[2]);
    CHECK(parabolic_from_cocharacter(a).parabolic.blocks() == std::vector<int>{1, 1, 1});

    Cocharacter already({3, 1, -4});
    CHECK(generic_perturbation(already, parabolic_from_cocharacter(already).parabolic) == already);

    Cocharacter zero({0, 0, 0});
    Cocharacter az = generic_perturbation(zero, StandardParabolic::whole_group(3));
    CHECK(az.weights() == std::vector<int64_t>{2, 0, -2});  // (n-1, n-3, ...)

    CHECK_THROWS_AS(generic_perturbation(b, StandardParabolic::borel(3)), std::invalid_argument);
}

TEST_CASE("epsilon1_calibration: torus generator on Q^2") {
    auto gens = torus_zero_weight_monomials(2, {1}, 2);
    CHECK(epsilon1_calibration(gens, 2, {1}, 3) == Rat(1));
    auto scaled = gens;
    scaled[0].terms[0].coeff = Rat(1, 7);
    CHECK(epsilon1_calibration(scaled, 2, {1}, 3) == Rat(1, 7));
}
