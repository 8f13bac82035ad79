#pragma once

#include <complex>
#include <vector>

#include "irsmec/errors.hpp"

namespace irsmec {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Sized for desk-scale problems
// (a few hundred rows at most), so everything is plain loops.
class CMat {
public:
    CMat() = default;
    CMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    cplx& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }
    std::size_t size() const { return a_.size(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> a_;
};

CMat operator*(const CMat& a, const CMat& b);
CMat operator+(const CMat& a, const CMat& b);
CMat operator-(const CMat& a, const CMat& b);
CMat operator*(cplx s, const CMat& a);
CMat adjoint(const CMat& a);

// a += s * (x * adjoint(y)); rank-one accumulation used by covariance sums.
void add_outer(CMat& a, const CMat& x, const CMat& y, double s = 1.0);

double max_abs(const CMat& a);
double fro_norm_sq(const CMat& a);
bool is_hermitian(const CMat& a, double tol = 1e-9);

// X with M * X = B for Hermitian positive-definite M (Cholesky).
// Throws NotPositiveDefinite if a factorization pivot is not positive.
CMat solve_hpd(const CMat& m, const CMat& b);

// ln|M| for Hermitian positive-definite M, natural log.
double log_det_hpd(const CMat& m);

// Squared Frobenius norm of H * F.
double gram_norm_sq(const CMat& h, const CMat& f);

}  // namespace irsmec
