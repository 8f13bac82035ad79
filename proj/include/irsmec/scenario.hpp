#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "irsmec/linalg.hpp"

namespace irsmec {

using Vec3 = std::array<double, 3>;

double distance(const Vec3& a, const Vec3& b);

// Every constant of one simulated system: geometry, radio front-end,
// task profile, and the cost weights. Per-user vectors have length K,
// per-BS vectors length Q, tx_power is Q*K row-major (q major).
struct SystemParams {
    int num_cells = 0;      // Q
    int num_users = 0;      // K
    int irs_elements = 0;   // M, 0 encodes the No-IRS configuration
    int bs_antennas = 0;    // N_BS
    int user_antennas = 0;  // N_U

    std::vector<Vec3> bs_positions;
    Vec3 irs_position{};
    std::vector<Vec3> user_positions;

    double bandwidth = 0.0;     // Hz
    double carrier_freq = 0.0;  // Hz
    double noise_var = 0.0;     // W

    std::vector<double> task_bits;              // L_k
    std::vector<double> cycles_per_bit;         // c_k
    std::vector<double> local_cpu;              // f^L_k, cycles/s
    std::vector<double> edge_cpu_total;         // per BS, cycles/s
    std::vector<double> local_energy_per_cycle; // E^d_k, J/cycle
    std::vector<double> edge_energy_per_cycle;  // E^s_q, J/cycle
    std::vector<double> tx_power;               // P^E_{q,k}, W, Q*K

    double tradeoff = 0.0;            // zeta, J/s
    std::vector<double> user_weights; // omega_k

    int pair(int q, int k) const { return q * num_users + k; }
    int num_pairs() const { return num_cells * num_users; }
};

// Rician fading with distance path loss. The defaults are the artifact's
// documented choices: obstructed direct links, near-LoS IRS links.
struct FadingModel {
    double pathloss_ref_db = -30.0;  // at 1 m
    double exponent_direct = 3.5;
    double exponent_irs_bs = 2.2;
    double exponent_user_irs = 2.2;
    double rician_k_direct = 0.0;
    double rician_k_irs = 3.0;
};

// One channel realization. direct is Q*K (q major, N_BS x N_U),
// irs_to_bs is per BS (N_BS x M), user_to_irs per user (M x N_U).
struct ChannelSet {
    int num_cells = 0;
    int num_users = 0;
    int irs_elements = 0;
    std::vector<CMat> direct;
    std::vector<CMat> irs_to_bs;
    std::vector<CMat> user_to_irs;

    const CMat& h(int q, int k) const { return direct[q * num_users + k]; }
};

// Names of all violated invariants; empty means ok.
std::vector<std::string> validate(const SystemParams& params);

std::vector<std::string> validate(const FadingModel& fading);

// Deterministic channel synthesis from (params, fading, seed). Each link
// gets its own substream so the result is identical in serial and
// parallel execution.
ChannelSet generate_channels(const SystemParams& params, const FadingModel& fading,
                             std::uint64_t seed);

// Users dropped uniformly in a disk of the given radius centered on the
// BS centroid, at ground height.
std::vector<Vec3> place_users_in_disk(const std::vector<Vec3>& bs_positions, int num_users,
                                      double radius, std::uint64_t seed);

// Table II constants plus this artifact's documented defaults for the
// values the table leaves open.
SystemParams default_params(int num_cells = 2, int num_users = 3, int irs_elements = 64);

}  // namespace irsmec
