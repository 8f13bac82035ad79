#include "irsmec/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace irsmec {

namespace {

void check_same_shape(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("matrix shapes differ");
    }
}

// In-place lower Cholesky of a Hermitian positive-definite matrix.
// Returns the factor L with M = L * L^H; throws on a nonpositive pivot.
CMat cholesky(const CMat& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("cholesky: matrix not square");
    const int n = m.rows();
    CMat l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = m(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw NotPositiveDefinite("cholesky: nonpositive pivot at column " + std::to_string(j));
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            cplx s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

}  // namespace

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
    CMat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

CMat operator+(const CMat& a, const CMat& b) {
    check_same_shape(a, b);
    CMat c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

CMat operator-(const CMat& a, const CMat& b) {
    check_same_shape(a, b);
    CMat c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) -= b(i, j);
    return c;
}

CMat operator*(cplx s, const CMat& a) {
    CMat c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) *= s;
    return c;
}

CMat adjoint(const CMat& a) {
    CMat c(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

void add_outer(CMat& a, const CMat& x, const CMat& y, double s) {
    if (x.cols() != y.cols() || a.rows() != x.rows() || a.cols() != y.rows()) {
        throw DimensionMismatch("add_outer: shapes incompatible");
    }
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < y.rows(); ++j) {
            cplx acc{};
            for (int k = 0; k < x.cols(); ++k) acc += x(i, k) * std::conj(y(j, k));
            a(i, j) += s * acc;
        }
}

double max_abs(const CMat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}

double fro_norm_sq(const CMat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.data()[i]);
    return s;
}

bool is_hermitian(const CMat& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(max_abs(a), 1e-300);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i; j < a.cols(); ++j) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale) return false;
        }
    return true;
}

CMat solve_hpd(const CMat& m, const CMat& b) {
    if (m.rows() != b.rows()) throw DimensionMismatch("solve_hpd: rhs row count");
    const CMat l = cholesky(m);
    const int n = m.rows();
    CMat x = b;
    // forward: L y = b
    for (int c = 0; c < x.cols(); ++c) {
        for (int i = 0; i < n; ++i) {
            cplx s = x(i, c);
            for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        // backward: L^H x = y
        for (int i = n - 1; i >= 0; --i) {
            cplx s = x(i, c);
            for (int k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

double log_det_hpd(const CMat& m) {
    const CMat l = cholesky(m);
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) s += std::log(l(i, i).real());
    return 2.0 * s;
}

double gram_norm_sq(const CMat& h, const CMat& f) {
    if (h.cols() != f.rows()) throw DimensionMismatch("gram_norm_sq: inner dimensions differ");
    double s = 0.0;
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j) {
            cplx acc{};
            for (int k = 0; k < h.cols(); ++k) acc += h(i, k) * f(k, j);
            s += std::norm(acc);
        }
    return s;
}

}  // namespace irsmec
