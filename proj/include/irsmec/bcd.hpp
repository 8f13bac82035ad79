#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "irsmec/irs_solver.hpp"
#include "irsmec/mec_solver.hpp"
#include "irsmec/metrics.hpp"

namespace irsmec {

struct BcdOptions {
    int outer_iters = 60;
    // stop once the per-iteration improvement drops below
    // outer_tol * initial cost
    double outer_tol = 1e-4;
    double mec_rel_gap = 1e-4;
    long mec_node_budget = 10000;
    CommOptions comm;
};

struct TraceRow {
    int iteration = 0;
    double cost = 0.0;
    double energy = 0.0;   // sum_k omega_k E_k
    double latency = 0.0;  // sum_k omega_k D_k
    double wallclock_s = 0.0;
};

struct RunResult {
    Decision decision;
    std::vector<TraceRow> trace;
    bool converged = false;
};

// Communication-block solver plugged into the outer loop; must return a
// decision whose cost does not exceed the input's.
using CommBlockSolver =
    std::function<Decision(const Decision&, const ChannelSet&, const SystemParams&, int iter)>;

// The alternating outer loop: exact MEC block via branch-and-bound (warm
// started from the incumbent so the trace is monotone), then the supplied
// communication solver, until the improvement falls below tolerance.
RunResult bcd_loop(const SystemParams& p, const ChannelSet& ch, Decision init,
                   const CommBlockSolver& comm, const BcdOptions& opts);

// First iterations of a trace until the drop falls below rel * initial cost;
// returns trace length if it never does.
int iterations_to_threshold(const std::vector<TraceRow>& trace, double rel);

}  // namespace irsmec
