#include "slnd/linprog.hpp"

#include <stdexcept>

namespace slnd {

// Dense phase-1 tableau. Variables are split x = x+ - x-, every inequality
// row gets a slack, every row gets an artificial, and we minimize the sum of
// artificials. Bland's rule keeps the exact simplex from cycling.
LpFeasibility lp_feasible(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                          const std::vector<std::vector<Rat>>& c, const std::vector<Rat>& d) {
    const int m1 = int(a.size());
    const int m2 = int(c.size());
    if (int(b.size()) != m1 || int(d.size()) != m2)
        throw std::invalid_argument("lp_feasible: rhs size mismatch");
    const int m = m1 + m2;
    if (m == 0) return {true, {}, {}, {}};
    const int nvars = int(m1 ? a[0].size() : c[0].size());
    for (const auto& row : a)
        if (int(row.size()) != nvars) throw std::invalid_argument("lp_feasible: ragged rows");
    for (const auto& row : c)
        if (int(row.size()) != nvars) throw std::invalid_argument("lp_feasible: ragged rows");

    // columns: [x+ (nvars)] [x- (nvars)] [slack (m1)] [artificial (m)] [rhs]
    const int col_slack = 2 * nvars;
    const int col_art = col_slack + m1;
    const int ncols = col_art + m;
    std::vector<std::vector<Rat>> t(m, std::vector<Rat>(ncols + 1, Rat(0)));
    std::vector<Rat> sign(m, Rat(1));

    for (int i = 0; i < m; ++i) {
        const auto& row = i < m1 ? a[i] : c[i - m1];
        const Rat& rhs = i < m1 ? b[i] : d[i - m1];
        for (int j = 0; j < nvars; ++j) {
            t[i][j] = row[j];
            t[i][nvars + j] = -row[j];
        }
        if (i < m1) t[i][col_slack + i] = Rat(1);
        t[i][ncols] = rhs;
        if (rhs < 0) {
            sign[i] = Rat(-1);
            for (auto& v : t[i]) v = -v;
        }
        t[i][col_art + i] = Rat(1);
    }

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = col_art + i;

    // reduced-cost row for minimizing the artificial sum
    std::vector<Rat> obj(ncols + 1, Rat(0));
    for (int j = 0; j <= ncols; ++j)
        for (int i = 0; i < m; ++i) obj[j] += t[i][j];
    for (int i = 0; i < m; ++i) obj[col_art + i] -= Rat(1);

    for (;;) {
        int enter = -1;
        for (int j = 0; j < ncols; ++j)
            if (obj[j] > 0) {
                enter = j;
                break;  // Bland: smallest index
            }
        if (enter < 0) break;
        int leave = -1;
        Rat best_ratio(0);
        for (int i = 0; i < m; ++i) {
            if (t[i][enter] <= 0) continue;
            Rat ratio = t[i][ncols] / t[i][enter];
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) throw std::logic_error("lp_feasible: phase-1 objective unbounded");
        Rat piv = t[leave][enter];
        for (auto& v : t[leave]) v /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave || t[i][enter] == 0) continue;
            Rat f = t[i][enter];
            for (int j = 0; j <= ncols; ++j) t[i][j] -= f * t[leave][j];
        }
        if (obj[enter] != 0) {
            Rat f = obj[enter];
            for (int j = 0; j <= ncols; ++j) obj[j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    LpFeasibility res;
    // objective value = -obj[rhs] after eliminations: recompute directly
    Rat artificial_sum(0);
    for (int i = 0; i < m; ++i)
        if (basis[i] >= col_art) artificial_sum += t[i][ncols];

    if (artificial_sum == 0) {
        res.feasible = true;
        res.x.assign(nvars, Rat(0));
        for (int i = 0; i < m; ++i) {
            if (basis[i] < nvars)
                res.x[basis[i]] += t[i][ncols];
            else if (basis[i] < 2 * nvars)
                res.x[basis[i] - nvars] -= t[i][ncols];
        }
        return res;
    }

    // infeasible: y_i = obj[artificial_i] + 1, multipliers from the setup signs
    res.feasible = false;
    res.ineq_multipliers.assign(m1, Rat(0));
    res.eq_multipliers.assign(m2, Rat(0));
    for (int i = 0; i < m; ++i) {
        Rat y = obj[col_art + i] + Rat(1);
        Rat mult = -sign[i] * y;
        if (i < m1)
            res.ineq_multipliers[i] = mult;
        else
            res.eq_multipliers[i - m1] = mult;
    }
    // validate the certificate
    for (int i = 0; i < m1; ++i)
        if (res.ineq_multipliers[i] < 0) throw std::logic_error("lp_feasible: negative Farkas multiplier");
    std::vector<Rat> combo(nvars, Rat(0));
    Rat level(0);
    for (int i = 0; i < m1; ++i) {
        for (int j = 0; j < nvars; ++j) combo[j] += res.ineq_multipliers[i] * a[i][j];
        level += res.ineq_multipliers[i] * b[i];
    }
    for (int i = 0; i < m2; ++i) {
        for (int j = 0; j < nvars; ++j) combo[j] += res.eq_multipliers[i] * c[i][j];
        level += res.eq_multipliers[i] * d[i];
    }
    for (const Rat& v : combo)
        if (v != 0) throw std::logic_error("lp_feasible: Farkas combination does not vanish");
    if (level >= 0) throw std::logic_error("lp_feasible: Farkas level not negative");
    return res;
}

}  // namespace slnd
