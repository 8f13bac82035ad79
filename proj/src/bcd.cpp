#include "irsmec/bcd.hpp"

#include <chrono>
#include <cmath>

namespace irsmec {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunResult bcd_loop(const SystemParams& p, const ChannelSet& ch, Decision init,
                   const CommBlockSolver& comm, const BcdOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    res.decision = std::move(init);

    CostBreakdown cb = total_cost(res.decision, ch, p);
    double cost = cb.total;
    res.trace.push_back({1, cost, weighted_energy(p, cb), weighted_latency(p, cb),
                         seconds_since(t0)});
    const double eps = opts.outer_tol * std::fabs(cost);

    for (int n = 2; n <= opts.outer_iters; ++n) {
        // MEC block at the current rates
        const QcpModel model = build_qcp(p, cb.rates);
        const MecSolution mec =
            spatial_bnb(model, opts.mec_rel_gap, opts.mec_node_budget,
                        std::make_pair(res.decision.offload_bits, res.decision.edge_cpu));
        if (mec.objective <= cost) {
            res.decision.offload_bits = mec.offload;
            res.decision.edge_cpu = mec.edge_cpu;
            cost = mec.objective;
        }
        // communication block
        res.decision = comm(res.decision, ch, p, n);

        cb = total_cost(res.decision, ch, p);
        const double next = cb.total;
        res.trace.push_back({n, next, weighted_energy(p, cb), weighted_latency(p, cb),
                             seconds_since(t0)});
        const double drop = cost - next;
        cost = next;
        if (drop < eps) {
            res.converged = true;
            break;
        }
    }
    return res;
}

int iterations_to_threshold(const std::vector<TraceRow>& trace, double rel) {
    if (trace.empty()) return 0;
    const double eps = rel * std::fabs(trace.front().cost);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i - 1].cost - trace[i].cost < eps) return static_cast<int>(i + 1);
    }
    return static_cast<int>(trace.size());
}

}  // namespace irsmec
