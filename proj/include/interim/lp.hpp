// Exact rational linear programming: dense two-phase simplex with Bland's
// anti-cycling rule. No scaling, no presolve, no floating point; optimal
// values are exact and infeasibility comes with a verifiable Farkas
// certificate.
#pragma once

#include "interim/rational.hpp"

#include <vector>

namespace interim {

enum class Relation { LessEq, Eq, GreaterEq };

struct LinearProgram {
    struct Row {
        std::vector<Rational> coeffs;  // dense, one per variable
        Relation rel = Relation::LessEq;
        Rational rhs;
    };

    int num_vars = 0;
    bool maximize = true;
    std::vector<Rational> objective;  // dense; empty means all-zero (feasibility)
    std::vector<Row> rows;

    explicit LinearProgram(int vars = 0) : num_vars(vars), objective(vars, Rational(0)) {}
    void add_row(std::vector<Rational> coeffs, Relation rel, Rational rhs) {
        rows.push_back({std::move(coeffs), rel, std::move(rhs)});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOptions {
    // Guard against rational blow-up: abort (CapExceeded) instead of losing
    // exactness. 0 disables.
    std::size_t max_magnitude_bits = 1u << 16;
    std::size_t max_pivots = 2'000'000;
};

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    Rational value;                 // optimal objective (Optimal only)
    std::vector<Rational> primal;   // vertex solution, size num_vars (Optimal)
    // Infeasible only: one multiplier per input row, in input order, with
    //   y_r >= 0 on '<=' rows, y_r <= 0 on '>=' rows, y_r free on '=' rows,
    //   sum_r y_r * a_r >= 0 componentwise, and sum_r y_r * b_r < 0,
    // certifying that no x >= 0 satisfies all rows.
    std::vector<Rational> farkas;
};

LpResult solve(const LinearProgram& lp, const LpOptions& options = {});

} // namespace interim
