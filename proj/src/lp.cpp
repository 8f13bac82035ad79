#include "irsmec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace irsmec {

namespace {

constexpr double kEps = 1e-9;

// Tableau simplex on  max c^T y, A y <= b, y >= 0  with an artificial
// column for phase 1 (the classic compact two-phase formulation).
class Simplex {
public:
    Simplex(int m, int n, std::vector<double> a, std::vector<double> b, std::vector<double> c,
            long pivot_cap)
        : m_(m), n_(n), cols_(n + 2), d_((m + 2) * static_cast<std::size_t>(n + 2)),
          basic_(m), nonbasic_(n + 1), cap_(pivot_cap) {
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) at(i, j) = a[static_cast<std::size_t>(i) * n_ + j];
            at(i, n_) = -1.0;
            at(i, n_ + 1) = b[static_cast<std::size_t>(i)];
            basic_[static_cast<std::size_t>(i)] = n_ + i;
        }
        for (int j = 0; j < n_; ++j) {
            at(m_, j) = -c[static_cast<std::size_t>(j)];
            nonbasic_[static_cast<std::size_t>(j)] = j;
        }
        nonbasic_[static_cast<std::size_t>(n_)] = -1;
        at(m_ + 1, n_) = 1.0;
    }

    // Returns max value of c^T y, -inf if infeasible, +inf if unbounded.
    double solve(std::vector<double>& y) {
        int r = 0;
        for (int i = 1; i < m_; ++i) {
            if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
        }
        if (at(r, n_ + 1) < -kEps) {
            pivot(r, n_);
            if (!run(2) || at(m_ + 1, n_ + 1) < -kEps) {
                return -std::numeric_limits<double>::infinity();
            }
            for (int i = 0; i < m_; ++i) {
                if (basic_[static_cast<std::size_t>(i)] != -1) continue;
                int s = 0;
                for (int j = 1; j <= n_; ++j) {
                    if (better(at(i, j), nonbasic_[static_cast<std::size_t>(j)], at(i, s),
                               nonbasic_[static_cast<std::size_t>(s)]))
                        s = j;
                }
                pivot(i, s);
            }
        }
        const bool bounded = run(1);
        y.assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const int v = basic_[static_cast<std::size_t>(i)];
            if (v >= 0 && v < n_) y[static_cast<std::size_t>(v)] = at(i, n_ + 1);
        }
        return bounded ? at(m_, n_ + 1) : std::numeric_limits<double>::infinity();
    }

private:
    double& at(int r, int c) { return d_[static_cast<std::size_t>(r) * cols_ + c]; }

    static bool better(double lhs_val, int lhs_id, double rhs_val, int rhs_id) {
        return std::make_pair(lhs_val, lhs_id) < std::make_pair(rhs_val, rhs_id);
    }

    void pivot(int r, int s) {
        if (++pivots_ > cap_) {
            throw NumericalFailure("solve_lp: pivot limit exceeded (" + std::to_string(cap_) + ")");
        }
        double* pr = &at(r, 0);
        const double inv = 1.0 / pr[s];
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r) continue;
            double* pi = &at(i, 0);
            if (std::fabs(pi[s]) <= kEps) continue;
            const double f = pi[s] * inv;
            for (int j = 0; j < cols_; ++j) pi[j] -= pr[j] * f;
            pi[s] = pr[s] * f;
        }
        for (int j = 0; j < cols_; ++j) {
            if (j != s) pr[j] *= inv;
        }
        for (int i = 0; i < m_ + 2; ++i) {
            if (i != r) at(i, s) *= -inv;
        }
        pr[s] = inv;
        std::swap(basic_[static_cast<std::size_t>(r)], nonbasic_[static_cast<std::size_t>(s)]);
    }

    bool run(int phase) {
        const int obj = m_ + phase - 1;
        for (;;) {
            // Dantzig pricing with lowest-index ties; switch to Bland's rule
            // (guaranteed finite) if the pivot count suggests cycling.
            const bool bland = pivots_ > cap_ / 2;
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (nonbasic_[static_cast<std::size_t>(j)] == -phase) continue;
                if (bland) {
                    if (at(obj, j) < -kEps &&
                        (s == -1 || nonbasic_[static_cast<std::size_t>(j)] <
                                        nonbasic_[static_cast<std::size_t>(s)]))
                        s = j;
                } else if (s == -1 ||
                           better(at(obj, j), nonbasic_[static_cast<std::size_t>(j)], at(obj, s),
                                  nonbasic_[static_cast<std::size_t>(s)])) {
                    s = j;
                }
            }
            if (s == -1 || at(obj, s) >= -kEps) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (at(i, s) <= kEps) continue;
                if (r == -1 ||
                    better(at(i, n_ + 1) / at(i, s), basic_[static_cast<std::size_t>(i)],
                           at(r, n_ + 1) / at(r, s), basic_[static_cast<std::size_t>(r)]))
                    r = i;
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }

    int m_;
    int n_;
    int cols_;
    std::vector<double> d_;
    std::vector<int> basic_;
    std::vector<int> nonbasic_;
    long pivots_ = 0;
    long cap_;
};

}  // namespace

void LinearProgram::add_row(const std::vector<double>& coeffs, double b) {
    if (static_cast<int>(coeffs.size()) != num_vars) {
        throw DimensionMismatch("LinearProgram::add_row: coefficient count");
    }
    rows.insert(rows.end(), coeffs.begin(), coeffs.end());
    rhs.push_back(b);
    ++num_rows;
}

LpSolution solve_lp(const LinearProgram& lp) {
    const int n = lp.num_vars;
    const int m = lp.num_rows;
    for (int j = 0; j < n; ++j) {
        const double lo = lp.lower[static_cast<std::size_t>(j)];
        const double hi = lp.upper[static_cast<std::size_t>(j)];
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            throw InvalidParams("solve_lp: bounds must be finite");
        }
        if (lo > hi) {
            LpSolution s;
            s.status = LpStatus::infeasible;
            return s;
        }
    }

    // Shift to y = (x - lb) / w with w the box width, so every variable
    // lives in [0, 1] (width rows appended below). Keeps the tableau well
    // scaled across the very different magnitudes of l, f, D, E, w.
    std::vector<double> width(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        width[static_cast<std::size_t>(j)] =
            std::max(lp.upper[static_cast<std::size_t>(j)] - lp.lower[static_cast<std::size_t>(j)],
                     1e-30);
    }
    const int rows_total = m + n;
    std::vector<double> a(static_cast<std::size_t>(rows_total) * n, 0.0);
    std::vector<double> b(static_cast<std::size_t>(rows_total), 0.0);
    for (int i = 0; i < m; ++i) {
        double shift = 0.0;
        double scale = 1.0;
        for (int j = 0; j < n; ++j) {
            shift += lp.a(i, j) * lp.lower[static_cast<std::size_t>(j)];
        }
        double row_max = std::fabs(lp.rhs[static_cast<std::size_t>(i)] - shift);
        for (int j = 0; j < n; ++j) {
            row_max = std::max(row_max, std::fabs(lp.a(i, j) * width[static_cast<std::size_t>(j)]));
        }
        if (row_max > 0.0) scale = 1.0 / row_max;
        for (int j = 0; j < n; ++j) {
            a[static_cast<std::size_t>(i) * n + j] =
                lp.a(i, j) * width[static_cast<std::size_t>(j)] * scale;
        }
        b[static_cast<std::size_t>(i)] = (lp.rhs[static_cast<std::size_t>(i)] - shift) * scale;
    }
    for (int j = 0; j < n; ++j) {
        a[static_cast<std::size_t>(m + j) * n + j] = 1.0;
        b[static_cast<std::size_t>(m + j)] = 1.0;
    }
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        c[static_cast<std::size_t>(j)] =
            -lp.objective[static_cast<std::size_t>(j)] * width[static_cast<std::size_t>(j)];
    }

    const long cap = 20000 + 50L * (rows_total + n);
    Simplex solver(rows_total, n, std::move(a), std::move(b), std::move(c), cap);
    std::vector<double> y;
    const double val = solver.solve(y);

    LpSolution sol;
    if (val == -std::numeric_limits<double>::infinity()) {
        sol.status = LpStatus::infeasible;
        return sol;
    }
    if (val == std::numeric_limits<double>::infinity()) {
        sol.status = LpStatus::unbounded;
        return sol;
    }
    sol.status = LpStatus::optimal;
    sol.x.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double xj = lp.lower[static_cast<std::size_t>(j)] +
                    y[static_cast<std::size_t>(j)] * width[static_cast<std::size_t>(j)];
        xj = std::clamp(xj, lp.lower[static_cast<std::size_t>(j)],
                        lp.upper[static_cast<std::size_t>(j)]);
        sol.x[static_cast<std::size_t>(j)] = xj;
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
        obj += lp.objective[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
    }
    sol.objective_value = obj;

    for (int i = 0; i < m; ++i) {
        double lhs = 0.0;
        double row_scale = 1.0;
        for (int j = 0; j < n; ++j) {
            lhs += lp.a(i, j) * sol.x[static_cast<std::size_t>(j)];
            row_scale = std::max(row_scale, std::fabs(lp.a(i, j) * width[static_cast<std::size_t>(j)]));
        }
        const double bi = lp.rhs[static_cast<std::size_t>(i)];
        if (lhs > bi + 1e-8 * (row_scale + std::fabs(bi))) {
            throw NumericalFailure("solve_lp: optimal point failed feasibility recheck");
        }
    }
    return sol;
}

}  // namespace irsmec
