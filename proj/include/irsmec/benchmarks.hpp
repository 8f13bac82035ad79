#pragma once

#include <cstdint>
#include <utility>

#include "irsmec/bcd.hpp"

namespace irsmec {

struct SaConfig {
    double initial_temp = -1.0;  // <= 0: auto-tune to ~80% initial acceptance
    double cooling = 0.95;
    int steps_per_temp = 100;
    long total_evals = 20000;
    double scale_phase = 0.3;    // radians
    double scale_beam = 0.1;
    double scale_offload = 0.05; // fraction of L_k
    double scale_cpu = 0.05;     // fraction of f^E_total
    std::uint64_t seed = 1;
};

struct SaBlocks {
    bool phases = true;
    bool beams = true;
    bool offload = true;
    bool cpu = true;
};

// Metropolis search over the jointly perturbed blocks; proposals are
// projected back into the constraint set, so every iterate is feasible.
// Returns the best decision ever visited.
RunResult sa_solve(const SystemParams& p, const ChannelSet& ch, const SaConfig& cfg);

RunResult sa_solve_blocks(const SystemParams& p, const ChannelSet& ch, const SaConfig& cfg,
                          const Decision& init, const SaBlocks& blocks);

// MMSE receiver for one stream: U = (J + v v^H)^{-1} v with v = Hbar F.
CMat wmmse_update_U(const std::vector<CMat>& heff, const std::vector<CMat>& beamformers,
                    double noise_var, int q, int k, int num_cells, int num_users);

// Scalar single-stream MSE and its inverse weight at a given decoder.
std::pair<double, double> wmmse_update_WE(const std::vector<CMat>& heff,
                                          const std::vector<CMat>& beamformers, const CMat& u,
                                          double noise_var, int q, int k, int num_cells,
                                          int num_users);

struct WmmseOptions {
    int inner_iters = 30;
    double tol = 1e-6;
};

// BCD with the communication block solved by cycling the decoder, weight,
// beamformer, and phase updates of the weighted-MMSE surrogate.
RunResult bcd_mse_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                        const WmmseOptions& wopts, std::uint64_t seed);

// BCD with the communication block searched by simulated annealing over
// (F, theta) only.
RunResult bcd_sa_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                       const SaConfig& comm_cfg, std::uint64_t seed);

// Phases drawn uniformly once and frozen; everything else optimized.
RunResult rand_phase_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                           std::uint64_t seed);

// IRS removed: both IRS channel families zeroed before running the full
// optimizer.
RunResult no_irs_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                       std::uint64_t seed);

}  // namespace irsmec
