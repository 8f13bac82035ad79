#pragma once

#include <vector>

#include "irsmec/errors.hpp"

namespace irsmec {

// min c^T x  s.t.  A x <= b,  lb <= x <= ub  (all bounds finite).
// Rows are stored flat, row-major.
struct LinearProgram {
    int num_vars = 0;
    int num_rows = 0;
    std::vector<double> objective;  // c, length num_vars
    std::vector<double> rows;       // A, num_rows * num_vars
    std::vector<double> rhs;        // b
    std::vector<double> lower;      // lb
    std::vector<double> upper;      // ub

    double& a(int r, int c) { return rows[static_cast<std::size_t>(r) * num_vars + c]; }
    double a(int r, int c) const { return rows[static_cast<std::size_t>(r) * num_vars + c]; }
    void add_row(const std::vector<double>& coeffs, double b);
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
};

// Deterministic dense simplex. Ties in pricing and in the ratio test break
// on the lowest variable index, which also serves as the anti-cycling rule;
// a pivot cap turns pathological cases into NumericalFailure instead of a
// hang. Optimal solutions are re-verified against the original rows.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace irsmec
