#pragma once

#include <functional>
#include <vector>

#include "irsmec/linalg.hpp"

namespace irsmec {

struct ApgOptions {
    int max_iters = 500;
    double tol = 1e-8;  // relative objective change
    int power_iters = 20;
};

// Accelerated projected gradient for min Re(x^H A x) - 2 Re(c^H x) over a
// convex set given by its projection. A enters as an operator (Hermitian
// PSD); the step size is 1/L with L estimated by power iteration. Momentum
// restarts whenever a step would increase the objective, so the returned
// point is never worse than the start.
std::vector<cplx> apg_minimize(
    std::size_t dim, const std::function<void(const std::vector<cplx>&, std::vector<cplx>&)>& op,
    const std::vector<cplx>& linear_c, const std::function<void(std::vector<cplx>&)>& project,
    std::vector<cplx> x0, const ApgOptions& opts = {});

}  // namespace irsmec
