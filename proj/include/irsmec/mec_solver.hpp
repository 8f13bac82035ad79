#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "irsmec/lp.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

// Epigraph form of the MEC subproblem at fixed rates. Variable layout:
// [l (Q*K) | f^E (Q*K) | D (K) | E (K)]; the D block and the bilinear
// constraints are dropped when tradeoff == 0 and the model is a plain LP.
struct QcpModel {
    int num_cells = 0;
    int num_users = 0;
    bool has_latency = false;
    int num_vars = 0;

    std::vector<double> lower, upper;
    std::vector<double> objective;

    std::vector<double> rows;  // linear rows, flattened row-major
    std::vector<double> rhs;
    int num_rows = 0;

    // coef * x_u * x_v contributes to row `row`
    struct Bilinear {
        int u = 0;
        int v = 0;
        int row = 0;
        double coef = 0.0;
    };
    std::vector<Bilinear> bilinear;

    std::vector<double> rates;   // R_{q,k}, nat/s/Hz, Q*K
    std::vector<char> pinned;    // pairs forced to l = 0 (zero rate)
    SystemParams params;

    int il(int q, int k) const { return q * num_users + k; }
    int if_(int q, int k) const { return num_cells * num_users + q * num_users + k; }
    int id(int k) const { return 2 * num_cells * num_users + k; }
    int ie(int k) const {
        return 2 * num_cells * num_users + (has_latency ? num_users : 0) + k;
    }

    double& row_at(int r, int c) { return rows[static_cast<std::size_t>(r) * num_vars + c]; }
    double row_at(int r, int c) const { return rows[static_cast<std::size_t>(r) * num_vars + c]; }
};

struct BnbNode {
    std::vector<double> lower, upper;
    double bound = 0.0;
    int depth = 0;
};

struct MecSolution {
    std::vector<double> offload;   // Q*K
    std::vector<double> edge_cpu;  // Q*K
    std::vector<double> latency;   // K
    std::vector<double> energy;    // K
    double objective = 0.0;
    double best_bound = 0.0;
    double gap = 0.0;
    long nodes_explored = 0;
    // diagnostics checked by the property tests
    std::vector<double> incumbent_history;
    double max_bound_violation = 0.0;
};

struct HeuristicPoint {
    std::vector<double> offload;
    std::vector<double> edge_cpu;
    std::vector<double> latency;
    std::vector<double> energy;
    double objective = 0.0;
};

// Exact weighted cost of a fixed (l, f^E) block at the given rates;
// +inf if the point is infeasible (overfull sums or used pairs without
// rate or cpu).
double mec_cost(const SystemParams& params, const std::vector<double>& rates,
                const std::vector<double>& offload, const std::vector<double>& edge_cpu);

QcpModel build_qcp(const SystemParams& params, const std::vector<double>& rates);

// LP relaxation of the node: every bilinear product is replaced by an
// auxiliary variable fenced by the four McCormick envelope rows.
LinearProgram mccormick_relax(const QcpModel& model, const BnbNode& node);

// Rounds a relaxed point to feasibility: f^E projected onto the per-BS
// capacity simplex, then the remaining LP in (l, D, E) solved exactly.
HeuristicPoint feasibility_heuristic(const QcpModel& model, const std::vector<double>& relaxed_x);

MecSolution spatial_bnb(
    const QcpModel& model, double rel_gap = 1e-4, long node_budget = 10000,
    const std::optional<std::pair<std::vector<double>, std::vector<double>>>& warm_start =
        std::nullopt);

// Independent verification oracle: exhaustive grid over the offload and
// cpu-split parametrization with golden-section refinement. K <= 2, Q <= 2.
double oracle_grid(const SystemParams& params, const std::vector<double>& rates,
                   int grid_points = 200);

}  // namespace irsmec
