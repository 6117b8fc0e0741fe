#include "interim/lp.hpp"

namespace interim {

namespace {

// Dense simplex tableau. Columns: structural vars, then one slack or surplus
// per inequality row, then artificials, then the rhs. The last row holds
// z_j - c_j for the current basis (optimal for maximization when all >= 0).
struct Tableau {
    int m = 0;                        // constraint rows
    int cols = 0;                     // columns excluding rhs
    std::vector<std::vector<Rational>> t;  // (m+1) x (cols+1)
    std::vector<int> basis;           // basic column per row
    std::vector<char> allowed;        // eligible to enter
    const LpOptions* opts = nullptr;
    std::size_t pivots = 0;

    Rational& at(int i, int j) { return t[i][j]; }
    Rational& rhs(int i) { return t[i][cols]; }

    void pivot(int row, int col) {
        if (++pivots > opts->max_pivots)
            throw CapExceeded("simplex pivot limit exceeded");
        const Rational p = t[row][col];
        for (int j = 0; j <= cols; ++j) t[row][j] /= p;
        for (int i = 0; i <= m; ++i) {
            if (i == row || t[i][col] == 0) continue;
            const Rational f = t[i][col];
            for (int j = 0; j <= cols; ++j) {
                if (t[row][j] == 0) continue;
                t[i][j] -= f * t[row][j];
                check_magnitude(t[i][j], opts->max_magnitude_bits);
            }
        }
        basis[row] = col;
    }

    // z_j - c_j = sum_i c_basis[i] * t[i][j] - c_j for the given costs.
    void recompute_objective(const std::vector<Rational>& costs) {
        for (int j = 0; j <= cols; ++j) {
            Rational v = 0;
            for (int i = 0; i < m; ++i) {
                const Rational& cb = costs[basis[i]];
                if (cb != 0 && t[i][j] != 0) v += cb * t[i][j];
            }
            if (j < cols) v -= costs[j];
            t[m][j] = v;
        }
    }

    // Bland's rule: lowest-index entering column with z_j - c_j < 0; leaving
    // row by ratio test, ties to the lowest basic column index.
    // Returns Optimal or Unbounded.
    LpStatus optimize() {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < cols; ++j) {
                if (allowed[j] && t[m][j] < 0) { enter = j; break; }
            }
            if (enter < 0) return LpStatus::Optimal;
            int leave = -1;
            Rational best;
            for (int i = 0; i < m; ++i) {
                if (t[i][enter] <= 0) continue;
                Rational ratio = rhs(i) / t[i][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
    }
};

} // namespace

LpResult solve(const LinearProgram& lp, const LpOptions& options) {
    const int n = lp.num_vars;
    const int m = static_cast<int>(lp.rows.size());
    for (const auto& row : lp.rows)
        if (static_cast<int>(row.coeffs.size()) != n)
            throw InputError("LP row width does not match variable count");
    if (!lp.objective.empty() && static_cast<int>(lp.objective.size()) != n)
        throw InputError("LP objective width does not match variable count");

    // Normalize every row to nonnegative rhs, remembering the sign flip.
    std::vector<int> sign(m, 1);
    std::vector<Relation> rel(m);
    for (int i = 0; i < m; ++i) {
        rel[i] = lp.rows[i].rel;
        if (lp.rows[i].rhs < 0) {
            sign[i] = -1;
            if (rel[i] == Relation::LessEq) rel[i] = Relation::GreaterEq;
            else if (rel[i] == Relation::GreaterEq) rel[i] = Relation::LessEq;
        }
    }

    // Column layout: n structural, then per-row slack/surplus, then per-row
    // artificial where needed.
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    int cols = n;
    for (int i = 0; i < m; ++i)
        if (rel[i] != Relation::Eq) slack_col[i] = cols++;
    int first_art = cols;
    for (int i = 0; i < m; ++i)
        if (rel[i] != Relation::LessEq) art_col[i] = cols++;

    Tableau tab;
    tab.m = m;
    tab.cols = cols;
    tab.opts = &options;
    tab.t.assign(m + 1, std::vector<Rational>(cols + 1, Rational(0)));
    tab.basis.assign(m, -1);
    tab.allowed.assign(cols, 1);

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j)
            tab.at(i, j) = sign[i] == 1 ? lp.rows[i].coeffs[j] : -lp.rows[i].coeffs[j];
        tab.rhs(i) = sign[i] == 1 ? lp.rows[i].rhs : -lp.rows[i].rhs;
        if (slack_col[i] >= 0)
            tab.at(i, slack_col[i]) = rel[i] == Relation::LessEq ? 1 : -1;
        if (art_col[i] >= 0) tab.at(i, art_col[i]) = 1;
        tab.basis[i] = art_col[i] >= 0 ? art_col[i] : slack_col[i];
    }

    // Phase 1: maximize -sum(artificials).
    if (first_art < cols) {
        std::vector<Rational> costs(cols, Rational(0));
        for (int j = first_art; j < cols; ++j) costs[j] = -1;
        tab.recompute_objective(costs);
        tab.optimize();  // bounded below by construction
        if (tab.rhs(m) != 0) {
            // Infeasible. Dual multipliers y_i of the normalized system read
            // off the objective row: slack column of row i carries +/- y_i,
            // equality rows carry y_i + 1 on their artificial column.
            LpResult res;
            res.status = LpStatus::Infeasible;
            res.farkas.assign(m, Rational(0));
            for (int i = 0; i < m; ++i) {
                Rational y;
                if (slack_col[i] >= 0)
                    y = rel[i] == Relation::LessEq ? tab.at(m, slack_col[i])
                                                   : -tab.at(m, slack_col[i]);
                else
                    y = tab.at(m, art_col[i]) - 1;
                res.farkas[i] = sign[i] == 1 ? y : -y;
            }
            return res;
        }
        // Drive leftover artificials out of the basis; rows whose structural
        // part is all zero are redundant and stay inert at zero.
        for (int i = 0; i < m; ++i) {
            if (tab.basis[i] < first_art) continue;
            for (int j = 0; j < first_art; ++j) {
                if (tab.at(i, j) != 0) { tab.pivot(i, j); break; }
            }
        }
        for (int j = first_art; j < cols; ++j) tab.allowed[j] = 0;
    }

    // Phase 2.
    std::vector<Rational> costs(cols, Rational(0));
    for (int j = 0; j < n; ++j) {
        if (lp.objective.empty()) break;
        costs[j] = lp.maximize ? lp.objective[j] : -lp.objective[j];
    }
    tab.recompute_objective(costs);
    if (tab.optimize() == LpStatus::Unbounded) {
        LpResult res;
        res.status = LpStatus::Unbounded;
        return res;
    }

    LpResult res;
    res.status = LpStatus::Optimal;
    res.primal.assign(n, Rational(0));
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < n) res.primal[tab.basis[i]] = tab.rhs(i);
    res.value = tab.rhs(m);
    if (!lp.maximize) res.value = -res.value;
    return res;
}

} // namespace interim
