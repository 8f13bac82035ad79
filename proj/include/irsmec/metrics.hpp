#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsmec/linalg.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

// One iterate of the four optimization blocks. Beamformers and the
// offload/edge-cpu tables are Q*K (q major); phases has length M.
struct Decision {
    std::vector<CMat> beamformers;     // N_U x 1 each
    std::vector<double> phases;        // radians in [0, 2pi)
    std::vector<double> offload_bits;  // l_{q,k}
    std::vector<double> edge_cpu;      // f^E_{q,k}, cycles/s
};

struct CostBreakdown {
    std::vector<double> rates;          // per pair, nat/s/Hz
    std::vector<double> latency;        // D_k, s
    std::vector<double> energy;         // E_k, J
    std::vector<double> per_user_cost;  // C_k = E_k + zeta * D_k
    double total = 0.0;                 // sum_k omega_k * C_k
};

// H_bar_{q,k} = H_{q,k} + G_{q,R} diag(e^{j theta}) H_{R,k} for all pairs.
std::vector<CMat> effective_channel(const ChannelSet& ch, const std::vector<double>& phases);

// Same with a general complex diagonal (used on the relaxed |Theta_n| <= 1 set).
std::vector<CMat> effective_channel(const ChannelSet& ch, const std::vector<cplx>& theta);

// Interference-plus-noise covariance at BS q for user k's stream:
// all streams (n,m) != (q,k) arrive through user m's channel to BS q.
CMat interference_cov(const std::vector<CMat>& heff, const std::vector<CMat>& f,
                      double noise_var, int q, int k, int num_cells, int num_users);

// ln|I + H F F^H H^H J^{-1}|, evaluated without forming the explicit inverse.
double rate_logdet(const CMat& hbar, const CMat& f, const CMat& j);

// powers[q*Q*K + i*K + j] = |H_bar_{q,j} F_{i,j}|^2 for all BS/stream combos.
std::vector<double> stream_powers(const std::vector<CMat>& heff, const std::vector<CMat>& f,
                                  int num_cells, int num_users);

struct ScalarRate {
    double sinr = 0.0;
    double rate = 0.0;  // ln(1 + sinr)
};

ScalarRate rate_scalar(const std::vector<CMat>& heff, const std::vector<CMat>& f,
                       double noise_var, int q, int k, int num_cells, int num_users);

ScalarRate rate_scalar_from_powers(const std::vector<double>& powers, double noise_var, int q,
                                   int k, int num_cells, int num_users);

// All Q*K log-det rates; data-parallel over pairs.
std::vector<double> all_rates_logdet(const std::vector<CMat>& heff,
                                     const std::vector<CMat>& f, double noise_var,
                                     int num_cells, int num_users);

// D_k per the max of local and per-BS edge latency; the edge term of an
// unused pair (l = 0) is zero.
double user_latency(const SystemParams& p, const std::vector<double>& offload,
                    const std::vector<double>& edge_cpu, const std::vector<double>& rates, int k);

double user_energy(const SystemParams& p, const std::vector<double>& offload,
                   const std::vector<double>& rates, int k);

CostBreakdown total_cost(const Decision& dec, const ChannelSet& ch, const SystemParams& p);

// Weighted totals used by traces: sum_k omega_k E_k and sum_k omega_k D_k.
double weighted_energy(const SystemParams& p, const CostBreakdown& cb);
double weighted_latency(const SystemParams& p, const CostBreakdown& cb);

// All violated P1 constraints by name (tolerance 1e-9); empty means feasible.
std::vector<std::string> validate_decision(const Decision& dec, const SystemParams& p);

// Random initialization within the constraint set: ball-uniform beamformers,
// uniform phases, half the task split evenly across BSs, equal CPU split.
Decision init_decision(const SystemParams& p, std::uint64_t seed);

}  // namespace irsmec
