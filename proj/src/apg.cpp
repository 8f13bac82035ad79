#include "irsmec/apg.hpp"

#include <cmath>

namespace irsmec {

namespace {

double dot_re(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (std::conj(a[i]) * b[i]).real();
    }
    return s;
}

double norm2(const std::vector<cplx>& a) {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(x);
    return s;
}

}  // namespace

std::vector<cplx> apg_minimize(
    std::size_t dim, const std::function<void(const std::vector<cplx>&, std::vector<cplx>&)>& op,
    const std::vector<cplx>& linear_c, const std::function<void(std::vector<cplx>&)>& project,
    std::vector<cplx> x0, const ApgOptions& opts) {
    if (dim == 0) return x0;

    // Lipschitz constant of the gradient map x -> A x - c.
    std::vector<cplx> v(dim), av(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        v[i] = 1.0 + 1e-3 * static_cast<double>(i);
    }
    double lam = 0.0;
    {
        double nv = std::sqrt(norm2(v));
        for (auto& x : v) x /= nv;
        for (int it = 0; it < opts.power_iters; ++it) {
            op(v, av);
            lam = std::sqrt(norm2(av));
            if (lam <= 1e-300) break;
            for (std::size_t i = 0; i < dim; ++i) v[i] = av[i] / lam;
        }
    }
    double lip = std::max(lam * 1.02, 1e-12);

    project(x0);
    auto objective = [&](const std::vector<cplx>& x) {
        op(x, av);
        return dot_re(x, av) - 2.0 * dot_re(linear_c, x);
    };

    std::vector<cplx> x = x0;
    std::vector<cplx> y = x0;
    std::vector<cplx> xn(dim), g(dim);
    double fx = objective(x);
    double t = 1.0;
    for (int it = 0; it < opts.max_iters; ++it) {
        op(y, g);
        for (std::size_t i = 0; i < dim; ++i) g[i] -= linear_c[i];
        for (std::size_t i = 0; i < dim; ++i) xn[i] = y[i] - g[i] / lip;
        project(xn);
        double fn = objective(xn);
        if (fn > fx) {
            // restart momentum at the current best point; back off the step
            // until plain projected gradient makes progress
            y = x;
            t = 1.0;
            bool progressed = false;
            for (int back = 0; back < 60; ++back) {
                op(y, g);
                for (std::size_t i = 0; i < dim; ++i) g[i] -= linear_c[i];
                for (std::size_t i = 0; i < dim; ++i) xn[i] = y[i] - g[i] / lip;
                project(xn);
                fn = objective(xn);
                if (fn <= fx) {
                    progressed = true;
                    break;
                }
                lip *= 2.0;
            }
            if (!progressed) break;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < dim; ++i) {
            y[i] = xn[i] + ((t - 1.0) / tn) * (xn[i] - x[i]);
        }
        const bool converged = std::fabs(fx - fn) <= opts.tol * std::max(1.0, std::fabs(fn));
        x = xn;
        fx = fn;
        t = tn;
        if (converged) break;
    }
    return x;
}

}  // namespace irsmec
