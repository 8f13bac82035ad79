#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irsmec/benchmarks.hpp"

namespace irsmec {

enum class Algo { bcd_fp_dc, sa, bcd_sa, bcd_mse, rand_phase, no_irs };

std::string algo_name(Algo algo);
std::optional<Algo> algo_from_name(const std::string& name);

// Scenario template from the config file. Per-entity fields hold either one
// broadcastable value or a full vector; they are expanded when a concrete
// run is materialized (the sweep may change K or M).
struct ScenarioSpec {
    int num_cells = 2;
    int num_users = 3;
    int irs_elements = 64;
    int bs_antennas = 3;
    int user_antennas = 2;
    std::vector<Vec3> bs_positions{{10.0, -100.0, 0.0}, {10.0, 100.0, 0.0}};
    Vec3 irs_position{-10.0, 0.0, 1.0};
    std::optional<std::vector<Vec3>> user_positions;
    double bandwidth = 1e3;
    double carrier_freq = 2.005e9;
    double noise_var = 3.16e-11;
    double tradeoff = 1.0;
    std::vector<double> task_bits{1000.0};
    std::vector<double> cycles_per_bit{1.0};
    std::vector<double> local_cpu{1.0};
    std::vector<double> local_energy_per_cycle{1e-3};
    std::vector<double> user_weights{1.0};
    std::vector<double> edge_cpu_total{100.0};
    std::vector<double> edge_energy_per_cycle{1e-4};
    std::vector<double> tx_power{0.1};
    FadingModel fading;
    double placement_radius = 20.0;
};

struct SweepSpec {
    std::string variable;  // irs_elements | num_users
    std::vector<int> values;
};

struct ExperimentConfig {
    ScenarioSpec scenario;
    Algo algo = Algo::bcd_fp_dc;
    int outer_iters = 60;
    double outer_tol = 1e-4;
    std::vector<std::uint64_t> seeds;
    std::optional<SweepSpec> sweep;
    std::string output_dir = "out";
    SaConfig sa;
    WmmseOptions wmmse;
};

ExperimentConfig load_config(const std::string& path);

// Concrete params for one run: sweep override applied, per-entity fields
// expanded, users placed (from the seed when no explicit positions).
SystemParams materialize(const ScenarioSpec& spec,
                         const std::optional<std::pair<std::string, int>>& sweep_override,
                         std::uint64_t seed);

// Algorithm 1/2 outer loop with random initialization.
RunResult run_bcd_fp_dc(const SystemParams& p, const ChannelSet& ch, int outer_iters,
                        double outer_tol, std::uint64_t seed);

RunResult run_algorithm(Algo algo, const ExperimentConfig& cfg, const SystemParams& p,
                        const ChannelSet& ch, std::uint64_t seed);

struct RunRecord {
    std::string run_id;
    std::string algo;
    std::string sweep_variable;  // "none" when not sweeping
    int sweep_value = 0;
    std::uint64_t seed = 0;
    std::vector<TraceRow> trace;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct SweepCell {
    std::string algo;
    std::string variable;
    int value = 0;
    int n_seeds = 0;  // successful runs only
    double mean_cost = 0.0;
    double std_cost = 0.0;
    double mean_energy = 0.0;
    double mean_latency = 0.0;
};

struct SweepSummary {
    std::vector<RunRecord> runs;
    std::vector<SweepCell> cells;
};

// Every (sweep value x seed) cell, channels paired by seed across
// algorithms and sweep values; cells run in parallel, failures are
// recorded and skipped in the aggregation.
SweepSummary run_sweep(const ExperimentConfig& cfg);

// convergence.csv and sweep.csv with 12 significant digits and stable row
// order; pure serialization of its inputs.
void emit_outputs(const std::vector<RunRecord>& runs, const std::vector<SweepCell>& cells,
                  const std::string& output_dir);

}  // namespace irsmec
