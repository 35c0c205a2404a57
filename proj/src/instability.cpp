#include "slnd/instability.hpp"

#include "slnd/linprog.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace slnd {

bool WeightedVector::is_zero() const {
    for (const auto& s : summands)
        if (!s.is_zero()) return false;
    return true;
}

std::vector<std::vector<int64_t>> weight_support(const WeightedVector& v) {
    if (v.is_zero()) throw std::invalid_argument("weight_support: zero vector");
    std::set<std::vector<int64_t>> seen;
    for (const auto& s : v.summands) {
        if (s.is_zero()) continue;
        if (s.n != v.n) throw std::invalid_argument("weight_support: summand dimension mismatch");
        for (auto& w : weight_support(s)) seen.insert(w);
    }
    return {seen.begin(), seen.end()};
}

Rat Polynomial::eval(const WeightedVector& v) const {
    Rat total(0);
    for (const Monomial& mono : terms) {
        Rat prod = mono.coeff;
        for (const auto& [coord, e] : mono.powers) {
            if (coord.summand < 0 || coord.summand >= int(v.summands.size()))
                throw std::invalid_argument("Polynomial::eval: summand index out of range");
            const ExteriorVector& s = v.summands[coord.summand];
            Rat c(0);
            for (const auto& [mask, val] : s.comps)
                if (mask == coord.mask) {
                    c = val;
                    break;
                }
            prod *= pow_rat(c, e);
            if (prod == 0) break;
        }
        total += prod;
    }
    return total;
}

std::vector<Polynomial> torus_zero_weight_monomials(int n, const std::vector<int>& degrees,
                                                    int max_degree) {
    struct CoordInfo {
        VectorCoord coord;
        std::vector<int64_t> weight;
    };
    std::vector<CoordInfo> coords;
    for (int s = 0; s < int(degrees.size()); ++s)
        for (uint32_t mask : k_subsets(n, degrees[s])) {
            std::vector<int64_t> w(n, 0);
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) w[i] = 1;
            coords.push_back({{s, mask}, w});
        }
    if (coords.size() > 24) throw std::invalid_argument("torus_zero_weight_monomials: shape too large");

    std::vector<Polynomial> out;
    std::vector<int> expo(coords.size(), 0);
    std::vector<int64_t> weight(n, 0);

    auto emit = [&]() {
        bool allequal = true;
        for (int i = 1; i < n; ++i)
            if (weight[i] != weight[0]) allequal = false;
        int deg = std::accumulate(expo.begin(), expo.end(), 0);
        if (!allequal || deg == 0) return;
        Monomial mono;
        for (size_t c = 0; c < coords.size(); ++c)
            if (expo[c] > 0) mono.powers.emplace_back(coords[c].coord, expo[c]);
        out.push_back(Polynomial{{mono}});
    };

    // depth-first over exponent vectors of total degree <= max_degree
    auto rec = [&](auto&& self, size_t c, int remaining) -> void {
        if (c == coords.size()) {
            emit();
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            expo[c] = e;
            if (e > 0)
                for (int i = 0; i < n; ++i) weight[i] += e * coords[c].weight[i];
            self(self, c + 1, remaining - e);
            if (e > 0)
                for (int i = 0; i < n; ++i) weight[i] -= e * coords[c].weight[i];
        }
        expo[c] = 0;
    };
    rec(rec, 0, max_degree);
    return out;
}

bool invariant_vanish_test(const WeightedVector& v, const std::vector<Polynomial>& generators) {
    for (const Polynomial& f : generators)
        if (f.eval(v) != 0) return false;
    return true;
}

namespace {

// A x <= -1 on every support row, sum of coordinates zero.
LpFeasibility contraction_lp(const std::vector<std::vector<int64_t>>& support, int n) {
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    for (const auto& w : support) {
        std::vector<Rat> row(n);
        for (int i = 0; i < n; ++i) row[i] = Rat(w[i]);
        a.push_back(std::move(row));
        b.push_back(Rat(-1));
    }
    std::vector<std::vector<Rat>> c{std::vector<Rat>(n, Rat(1))};
    std::vector<Rat> d{Rat(0)};
    return lp_feasible(a, b, c, d);
}

Cocharacter integral_scale(const std::vector<Rat>& x) {
    Int scale(1);
    for (const Rat& v : x) scale = lcm_int(scale, boost::multiprecision::denominator(v));
    std::vector<int64_t> w;
    for (const Rat& v : x) {
        Rat scaled = v * Rat(scale);
        Int num = boost::multiprecision::numerator(scaled);
        w.push_back(num.convert_to<int64_t>());
    }
    return Cocharacter(w);
}

}  // namespace

TorusInstabilityResult torus_instability(const WeightedVector& v) {
    if (v.is_zero()) throw std::invalid_argument("torus_instability: zero vector");
    auto support = weight_support(v);
    LpFeasibility lp = contraction_lp(support, v.n);

    TorusInstabilityResult res;
    if (lp.feasible) {
        res.destabilizing = integral_scale(lp.x);
        return res;
    }
    // normalize the Farkas multipliers into a convex combination
    Rat total(0);
    for (const Rat& l : lp.ineq_multipliers) total += l;
    if (total <= 0) throw std::logic_error("torus_instability: degenerate hull certificate");
    res.hull_coefficients = lp.ineq_multipliers;
    for (Rat& l : res.hull_coefficients) l /= total;
    std::vector<Rat> hull(v.n, Rat(0));
    for (size_t i = 0; i < support.size(); ++i)
        for (int j = 0; j < v.n; ++j) hull[j] += res.hull_coefficients[i] * Rat(support[i][j]);
    for (int j = 1; j < v.n; ++j)
        if (hull[j] != hull[0]) throw std::logic_error("torus_instability: hull point not diagonal");
    res.hull_level = hull[0];
    return res;
}

Cocharacter flag_cocharacter(const std::vector<std::vector<int64_t>>& root_weights) {
    if (root_weights.empty())
        throw std::invalid_argument("flag_cocharacter: a proper parabolic needs a nonempty radical");
    const int n = int(root_weights[0].size());
    for (const auto& w : root_weights) {
        if (int(w.size()) != n) throw std::invalid_argument("flag_cocharacter: ragged weight list");
        int plus = 0, minus = 0;
        for (int64_t x : w) {
            if (x == 1) ++plus;
            else if (x == -1) ++minus;
            else if (x != 0) plus = -100;
        }
        if (plus != 1 || minus != 1)
            throw std::invalid_argument("flag_cocharacter: weights must be roots e_i - e_j");
    }
    LpFeasibility lp = contraction_lp(root_weights, n);
    if (!lp.feasible)
        throw std::invalid_argument("flag_cocharacter: inputs are not from a common unipotent radical");
    Cocharacter b = integral_scale(lp.x);
    // consistency with the cocharacter parabolic of the opposite direction:
    // every input root must lie in the radical of P_{-b}
    ParabolicFrame f = parabolic_from_cocharacter(b.negated());
    for (const auto& w : root_weights) {
        int i = -1, j = -1;
        for (int c = 0; c < n; ++c) {
            if (w[c] == 1) i = c;
            if (w[c] == -1) j = c;
        }
        if (!(b.weights()[i] < b.weights()[j]))
            throw std::logic_error("flag_cocharacter: root not contracted");
        (void)f;
    }
    return b;
}

Cocharacter generic_perturbation(const Cocharacter& b, const StandardParabolic& p_target) {
    const int n = b.dim();
    if (parabolic_from_cocharacter(b).parabolic != p_target)
        throw std::invalid_argument("generic_perturbation: target parabolic does not match the cocharacter");

    std::set<int64_t> distinct(b.weights().begin(), b.weights().end());
    if (int(distinct.size()) == n) return b;

    // a_i = 2M b_i + (n-1-2i): order preserving once M(b_i - b_j) > i - j
    int64_t m_scale = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (b.weights()[i] <= b.weights()[j]) continue;
            int64_t gap = b.weights()[i] - b.weights()[j];
            int64_t need = (int64_t(i) - j) / gap + 1;
            m_scale = std::max(m_scale, need);
        }
    std::vector<int64_t> a(n);
    for (int i = 0; i < n; ++i) a[i] = 2 * m_scale * b.weights()[i] + (n - 1 - 2 * i);

    Cocharacter out{a};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (b.weights()[i] > b.weights()[j] && !(a[i] > a[j]))
                throw std::logic_error("generic_perturbation: weight order not preserved");
    return out;
}

Rat epsilon1_calibration(const std::vector<Polynomial>& generators, int n,
                         const std::vector<int>& degrees, int bound) {
    if (generators.empty()) throw std::invalid_argument("epsilon1_calibration: no generators");
    std::vector<std::pair<int, uint32_t>> coords;
    for (int s = 0; s < int(degrees.size()); ++s)
        for (uint32_t mask : k_subsets(n, degrees[s])) coords.emplace_back(s, mask);
    double combos = std::pow(2.0 * bound + 1, double(coords.size()));
    if (combos > 2e6) throw std::invalid_argument("epsilon1_calibration: search space too large");

    std::optional<Rat> best;
    std::vector<int> vals(coords.size(), -bound);
    for (;;) {
        WeightedVector v;
        v.n = n;
        v.summands.resize(degrees.size());
        for (size_t s = 0; s < degrees.size(); ++s) {
            v.summands[s].n = n;
            v.summands[s].degree = degrees[s];
        }
        for (size_t c = 0; c < coords.size(); ++c)
            if (vals[c] != 0)
                v.summands[coords[c].first].comps.emplace_back(coords[c].second, Rat(vals[c]));
        for (const Polynomial& f : generators) {
            Rat val = f.eval(v);
            if (val == 0) continue;
            if (val < 0) val = -val;
            if (!best || val < *best) best = val;
        }
        size_t c = 0;
        while (c < coords.size() && vals[c] == bound) vals[c++] = -bound;
        if (c == coords.size()) break;
        ++vals[c];
    }
    if (!best)
        throw std::domain_error("epsilon1_calibration: all generators vanish on the whole box");
    return *best;
}

}  // namespace slnd
