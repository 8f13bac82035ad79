#pragma once

#include <cstdint>
#include <vector>

#include "irsmec/metrics.hpp"

namespace irsmec {

// Auxiliary variables of the fractional-programming chain, one slot per
// (BS, user) pair. Pairs with no offloaded bits carry all-zero weights and
// drop out of the weighted sum-rate objective.
struct FpState {
    std::vector<double> lambda;     // 1 / R_{q,k} at refresh
    std::vector<double> weight1;    // d(cost)/d(lambda)
    std::vector<double> beta;       // weight1 * lambda
    std::vector<double> wstar;      // lambda * beta
    std::vector<double> gamma;      // scalar SINR
    std::vector<double> alpha;      // dual-transform auxiliary (= gamma)
    std::vector<double> alphastar;  // wstar * (1 + alpha)
    std::vector<double> rho;        // quadratic-transform auxiliary
};

// lambda / weight1 / beta / wstar from the current scalar rates. The latency
// subgradient resolves ties of the max within a 1e-9 relative tolerance by
// splitting the tradeoff weight equally across the tied terms.
void update_weights(FpState& st, const SystemParams& p, const std::vector<CMat>& heff,
                    const std::vector<CMat>& beamformers, const std::vector<double>& offload,
                    const std::vector<double>& edge_cpu);

FpState update_weights(const Decision& dec, const SystemParams& p, const ChannelSet& ch);

// alpha = gamma elementwise (stationarity of the Lagrangian dual transform).
void update_alpha(FpState& st);

// Optimal quadratic-transform auxiliary; the denominator runs over every
// stream power received at BS q plus noise (signal term included).
void update_rho(FpState& st, const std::vector<CMat>& heff,
                const std::vector<CMat>& beamformers, double noise_var, int num_cells,
                int num_users);

// Convex part h of the DC objective and the full surrogate objective
// h - g_quad on the relaxed set (|Theta_n| <= 1, |F| <= 1).
double h_value(const std::vector<CMat>& heff, const std::vector<CMat>& beamformers,
               const FpState& st, int num_cells, int num_users);
double p4g_objective(const std::vector<CMat>& heff, const std::vector<CMat>& beamformers,
                     const FpState& st, double noise_var, int num_cells, int num_users);

// Conjugate-coordinate gradients of h, scaled so the first-order change
// along a step d is Re(grad^H d).
std::vector<cplx> grad_h_theta(const ChannelSet& ch, const std::vector<cplx>& theta,
                               const std::vector<CMat>& beamformers, const FpState& st);
std::vector<CMat> grad_h_beamformers(const std::vector<CMat>& heff,
                                     const std::vector<CMat>& beamformers, const FpState& st);

// One majorization step on the passive block: minimizes the convex
// surrogate over the product of unit disks by accelerated projected
// gradient and returns the updated Theta.
std::vector<cplx> mm_step_theta(const ChannelSet& ch, const std::vector<cplx>& theta,
                                const std::vector<CMat>& beamformers, const FpState& st,
                                double noise_var);

// Same on the active block: all beamformers stacked, per-vector unit balls.
std::vector<CMat> mm_step_beamformers(const ChannelSet& ch, const std::vector<cplx>& theta,
                                      const std::vector<CMat>& beamformers, const FpState& st,
                                      double noise_var);

struct CommOptions {
    int outer_iters = 30;
    double tol = 1e-5;
    int mm_max_iters = 40;
    double mm_tol = 1e-7;
    bool optimize_theta = true;  // frozen-phase benchmarks switch this off
};

struct CommResult {
    Decision decision;
    double cost = 0.0;  // weighted system cost at unit-modulus phases
    int outer_iters_used = 0;
};

// Alternating passive/active beamforming for fixed (l, f^E): refresh the
// FP state, run each block's MM loop to convergence, and keep the best
// unit-modulus iterate so the returned cost never exceeds the input cost.
CommResult solve_comm_subproblem(const Decision& dec, const ChannelSet& ch,
                                 const SystemParams& p, const CommOptions& opts = {});

}  // namespace irsmec
