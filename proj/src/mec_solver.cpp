#include "irsmec/mec_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "irsmec/parallel.hpp"

namespace irsmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroRate = 1e-12;  // rates at or below this pin l to 0

double all_local_cost(const SystemParams& p) {
    double c0 = 0.0;
    for (int k = 0; k < p.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double e = p.cycles_per_bit[ku] * p.local_energy_per_cycle[ku] * p.task_bits[ku];
        const double d = p.task_bits[ku] * p.cycles_per_bit[ku] / p.local_cpu[ku];
        c0 += p.user_weights[ku] * (e + p.tradeoff * d);
    }
    return c0;
}

// Euclidean projection of v onto {f >= 0, sum f <= cap}.
void project_capacity(std::vector<double>& v, double cap) {
    double sum = 0.0;
    for (double& x : v) {
        x = std::max(x, 0.0);
        sum += x;
    }
    if (sum <= cap) return;
    // project onto the face sum f = cap: threshold form of the simplex
    // projection, deterministic via sorted copy
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double acc = 0.0;
    double tau = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i];
        const double t = (acc - cap) / static_cast<double>(i + 1);
        if (i + 1 == u.size() || u[i + 1] <= t) {
            tau = t;
            if (u[i] > t) break;
        }
    }
    for (double& x : v) x = std::max(x - tau, 0.0);
}

struct Incumbent {
    std::vector<double> offload;
    std::vector<double> edge_cpu;
    double objective = kInf;
};

void fill_exact(const SystemParams& p, const std::vector<double>& rates,
                const std::vector<double>& offload, const std::vector<double>& edge_cpu,
                std::vector<double>& latency, std::vector<double>& energy) {
    latency.assign(static_cast<std::size_t>(p.num_users), 0.0);
    energy.assign(static_cast<std::size_t>(p.num_users), 0.0);
    for (int k = 0; k < p.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        double off = 0.0;
        double edge = 0.0;
        double e = 0.0;
        for (int q = 0; q < p.num_cells; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            const double l = offload[idx];
            off += l;
            if (l <= 0.0) continue;
            const double br = p.bandwidth * rates[idx];
            edge = std::max(edge, l / br + l * p.cycles_per_bit[ku] / edge_cpu[idx]);
            e += p.cycles_per_bit[ku] * p.edge_energy_per_cycle[static_cast<std::size_t>(q)] * l +
                 p.tx_power[idx] * l / br;
        }
        const double local = (p.task_bits[ku] - off) * p.cycles_per_bit[ku] / p.local_cpu[ku];
        latency[ku] = std::max(local, edge);
        energy[ku] = e + p.cycles_per_bit[ku] * p.local_energy_per_cycle[ku] *
                             (p.task_bits[ku] - off);
    }
}

}  // namespace

double mec_cost(const SystemParams& p, const std::vector<double>& rates,
                const std::vector<double>& offload, const std::vector<double>& edge_cpu) {
    const double tol = 1e-9;
    double cost = 0.0;
    std::vector<double> cap(static_cast<std::size_t>(p.num_cells), 0.0);
    for (int q = 0; q < p.num_cells; ++q)
        for (int k = 0; k < p.num_users; ++k) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            if (offload[idx] < -tol || edge_cpu[idx] < -tol) return kInf;
            cap[static_cast<std::size_t>(q)] += edge_cpu[idx];
        }
    for (int q = 0; q < p.num_cells; ++q) {
        if (cap[static_cast<std::size_t>(q)] >
            p.edge_cpu_total[static_cast<std::size_t>(q)] * (1.0 + tol) + tol)
            return kInf;
    }
    for (int k = 0; k < p.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        double off = 0.0;
        double edge = 0.0;
        double e = 0.0;
        for (int q = 0; q < p.num_cells; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            const double l = offload[idx];
            off += l;
            if (l <= 0.0) continue;
            if (rates[idx] <= kZeroRate || edge_cpu[idx] <= 0.0) return kInf;
            const double br = p.bandwidth * rates[idx];
            edge = std::max(edge, l / br + l * p.cycles_per_bit[ku] / edge_cpu[idx]);
            e += p.cycles_per_bit[ku] * p.edge_energy_per_cycle[static_cast<std::size_t>(q)] * l +
                 p.tx_power[idx] * l / br;
        }
        if (off > p.task_bits[ku] * (1.0 + tol) + tol) return kInf;
        const double local = (p.task_bits[ku] - off) * p.cycles_per_bit[ku] / p.local_cpu[ku];
        const double d = std::max(local, edge);
        e += p.cycles_per_bit[ku] * p.local_energy_per_cycle[ku] * (p.task_bits[ku] - off);
        cost += p.user_weights[ku] * (e + p.tradeoff * d);
    }
    return cost;
}

QcpModel build_qcp(const SystemParams& p, const std::vector<double>& rates) {
    for (double r : rates) {
        if (r < 0.0 || !std::isfinite(r)) throw InvalidRates("build_qcp: negative rate");
    }
    QcpModel m;
    m.num_cells = p.num_cells;
    m.num_users = p.num_users;
    m.has_latency = p.tradeoff > 0.0;
    m.params = p;
    m.rates = rates;
    const int qk = p.num_pairs();
    m.num_vars = 2 * qk + (m.has_latency ? 2 : 1) * p.num_users;
    m.lower.assign(static_cast<std::size_t>(m.num_vars), 0.0);
    m.upper.assign(static_cast<std::size_t>(m.num_vars), 0.0);
    m.objective.assign(static_cast<std::size_t>(m.num_vars), 0.0);
    m.pinned.assign(static_cast<std::size_t>(qk), 0);

    const double c0 = all_local_cost(p);
    for (int q = 0; q < p.num_cells; ++q)
        for (int k = 0; k < p.num_users; ++k) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            m.pinned[idx] = rates[idx] <= kZeroRate ? 1 : 0;
            m.upper[static_cast<std::size_t>(m.il(q, k))] =
                m.pinned[idx] ? 0.0 : p.task_bits[static_cast<std::size_t>(k)];
            m.upper[static_cast<std::size_t>(m.if_(q, k))] =
                p.edge_cpu_total[static_cast<std::size_t>(q)];
        }
    for (int k = 0; k < p.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        double e_ub = p.cycles_per_bit[ku] * p.local_energy_per_cycle[ku] * p.task_bits[ku];
        for (int q = 0; q < p.num_cells; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            if (m.pinned[idx]) continue;
            e_ub += (p.cycles_per_bit[ku] * p.edge_energy_per_cycle[static_cast<std::size_t>(q)] +
                     p.tx_power[idx] / (p.bandwidth * rates[idx])) *
                    p.task_bits[ku];
        }
        m.upper[static_cast<std::size_t>(m.ie(k))] = e_ub;
        m.objective[static_cast<std::size_t>(m.ie(k))] = p.user_weights[ku];
        if (m.has_latency) {
            // latency epigraph upper bound comes from the all-local incumbent:
            // zeta * omega_k * D_k can never exceed c0 at any improving point
            m.upper[static_cast<std::size_t>(m.id(k))] = c0 / (p.tradeoff * p.user_weights[ku]);
            m.objective[static_cast<std::size_t>(m.id(k))] = p.tradeoff * p.user_weights[ku];
        }
    }

    auto add_row = [&](const std::vector<std::pair<int, double>>& coeffs, double rhs) {
        m.rows.insert(m.rows.end(), static_cast<std::size_t>(m.num_vars), 0.0);
        for (const auto& [j, v] : coeffs) m.row_at(m.num_rows, j) += v;
        m.rhs.push_back(rhs);
        ++m.num_rows;
    };

    // (17): energy epigraph per user
    for (int k = 0; k < p.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        std::vector<std::pair<int, double>> coeffs;
        for (int q = 0; q < p.num_cells; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            double a = p.cycles_per_bit[ku] *
                           (p.edge_energy_per_cycle[static_cast<std::size_t>(q)] -
                            p.local_energy_per_cycle[ku]);
            if (!m.pinned[idx]) a += p.tx_power[idx] / (p.bandwidth * rates[idx]);
            coeffs.emplace_back(m.il(q, k), a);
        }
        coeffs.emplace_back(m.ie(k), -1.0);
        add_row(coeffs, -p.cycles_per_bit[ku] * p.local_energy_per_cycle[ku] * p.task_bits[ku]);
    }
    if (m.has_latency) {
        // (18): local latency epigraph per user
        for (int k = 0; k < p.num_users; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            std::vector<std::pair<int, double>> coeffs;
            const double slope = p.cycles_per_bit[ku] / p.local_cpu[ku];
            for (int q = 0; q < p.num_cells; ++q) coeffs.emplace_back(m.il(q, k), -slope);
            coeffs.emplace_back(m.id(k), -1.0);
            add_row(coeffs, -p.task_bits[ku] * slope);
        }
        // (19): edge latency epigraph per active pair, bilinear in
        // (l, f^E) and (D, f^E)
        for (int q = 0; q < p.num_cells; ++q)
            for (int k = 0; k < p.num_users; ++k) {
                const auto idx = static_cast<std::size_t>(p.pair(q, k));
                if (m.pinned[idx]) continue;
                const auto ku = static_cast<std::size_t>(k);
                add_row({{m.il(q, k), p.cycles_per_bit[ku]}}, 0.0);
                const int row = m.num_rows - 1;
                m.bilinear.push_back(
                    {m.il(q, k), m.if_(q, k), row, 1.0 / (p.bandwidth * rates[idx])});
                m.bilinear.push_back({m.id(k), m.if_(q, k), row, -1.0});
            }
    }
    // (15c): offload volume per user
    for (int k = 0; k < p.num_users; ++k) {
        std::vector<std::pair<int, double>> coeffs;
        for (int q = 0; q < p.num_cells; ++q) coeffs.emplace_back(m.il(q, k), 1.0);
        add_row(coeffs, p.task_bits[static_cast<std::size_t>(k)]);
    }
    // (15d): cpu capacity per BS
    for (int q = 0; q < p.num_cells; ++q) {
        std::vector<std::pair<int, double>> coeffs;
        for (int k = 0; k < p.num_users; ++k) coeffs.emplace_back(m.if_(q, k), 1.0);
        add_row(coeffs, p.edge_cpu_total[static_cast<std::size_t>(q)]);
    }
    return m;
}

LinearProgram mccormick_relax(const QcpModel& m, const BnbNode& node) {
    const int n = m.num_vars;
    const int nw = static_cast<int>(m.bilinear.size());
    for (int j = 0; j < n; ++j) {
        if (node.lower[static_cast<std::size_t>(j)] >
            node.upper[static_cast<std::size_t>(j)] + 1e-15) {
            throw EmptyBox("mccormick_relax: empty node box");
        }
    }
    LinearProgram lp;
    lp.num_vars = n + nw;
    lp.objective.assign(static_cast<std::size_t>(lp.num_vars), 0.0);
    std::copy(m.objective.begin(), m.objective.end(), lp.objective.begin());
    lp.lower = node.lower;
    lp.upper = node.upper;
    lp.lower.resize(static_cast<std::size_t>(lp.num_vars));
    lp.upper.resize(static_cast<std::size_t>(lp.num_vars));

    for (int t = 0; t < nw; ++t) {
        const auto& bl = m.bilinear[static_cast<std::size_t>(t)];
        const double ul = node.lower[static_cast<std::size_t>(bl.u)];
        const double uu = node.upper[static_cast<std::size_t>(bl.u)];
        const double vl = node.lower[static_cast<std::size_t>(bl.v)];
        const double vu = node.upper[static_cast<std::size_t>(bl.v)];
        const double corners[4] = {ul * vl, ul * vu, uu * vl, uu * vu};
        lp.lower[static_cast<std::size_t>(n + t)] = *std::min_element(corners, corners + 4);
        lp.upper[static_cast<std::size_t>(n + t)] = *std::max_element(corners, corners + 4);
    }

    // linear rows with w substituted for each product
    for (int r = 0; r < m.num_rows; ++r) {
        std::vector<double> row(static_cast<std::size_t>(lp.num_vars), 0.0);
        for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = m.row_at(r, j);
        for (int t = 0; t < nw; ++t) {
            if (m.bilinear[static_cast<std::size_t>(t)].row == r) {
                row[static_cast<std::size_t>(n + t)] =
                    m.bilinear[static_cast<std::size_t>(t)].coef;
            }
        }
        lp.add_row(row, m.rhs[static_cast<std::size_t>(r)]);
    }
    // the four envelope rows per product
    for (int t = 0; t < nw; ++t) {
        const auto& bl = m.bilinear[static_cast<std::size_t>(t)];
        const double ul = node.lower[static_cast<std::size_t>(bl.u)];
        const double uu = node.upper[static_cast<std::size_t>(bl.u)];
        const double vl = node.lower[static_cast<std::size_t>(bl.v)];
        const double vu = node.upper[static_cast<std::size_t>(bl.v)];
        auto envelope = [&](double cu, double cv, double sign, double rhs) {
            std::vector<double> row(static_cast<std::size_t>(lp.num_vars), 0.0);
            row[static_cast<std::size_t>(bl.u)] = sign * cv;
            row[static_cast<std::size_t>(bl.v)] = sign * cu;
            row[static_cast<std::size_t>(n + t)] = -sign;
            lp.add_row(row, rhs);
        };
        envelope(ul, vl, 1.0, ul * vl);    //  w >= ul*v + vl*u - ul*vl
        envelope(uu, vu, 1.0, uu * vu);    //  w >= uu*v + vu*u - uu*vu
        envelope(uu, vl, -1.0, -uu * vl);  //  w <= uu*v + vl*u - uu*vl
        envelope(ul, vu, -1.0, -ul * vu);  //  w <= ul*v + vu*u - ul*vu
    }
    return lp;
}

HeuristicPoint feasibility_heuristic(const QcpModel& m, const std::vector<double>& relaxed_x) {
    const SystemParams& p = m.params;
    const int qk = p.num_pairs();

    HeuristicPoint out;
    out.edge_cpu.assign(static_cast<std::size_t>(qk), 0.0);
    for (int q = 0; q < p.num_cells; ++q) {
        std::vector<double> f(static_cast<std::size_t>(p.num_users));
        for (int k = 0; k < p.num_users; ++k)
            f[static_cast<std::size_t>(k)] = relaxed_x[static_cast<std::size_t>(m.if_(q, k))];
        project_capacity(f, p.edge_cpu_total[static_cast<std::size_t>(q)]);
        for (int k = 0; k < p.num_users; ++k)
            out.edge_cpu[static_cast<std::size_t>(p.pair(q, k))] = f[static_cast<std::size_t>(k)];
    }

    // remaining LP over (l, D, E) with f fixed
    const int nl = qk;
    const int nd = m.has_latency ? p.num_users : 0;
    LinearProgram lp;
    lp.num_vars = nl + nd + p.num_users;
    auto jl = [&](int q, int k) { return p.pair(q, k); };
    auto jd = [&](int k) { return nl + k; };
    auto je = [&](int k) { return nl + nd + k; };
    lp.objective.assign(static_cast<std::size_t>(lp.num_vars), 0.0);
    lp.lower.assign(static_cast<std::size_t>(lp.num_vars), 0.0);
    lp.upper.assign(static_cast<std::size_t>(lp.num_vars), 0.0);
    for (int q = 0; q < p.num_cells; ++q)
        for (int k = 0; k < p.num_users; ++k)
            lp.upper[static_cast<std::size_t>(jl(q, k))] =
                m.upper[static_cast<std::size_t>(m.il(q, k))];
    for (int k = 0; k < p.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        lp.upper[static_cast<std::size_t>(je(k))] = m.upper[static_cast<std::size_t>(m.ie(k))];
        lp.objective[static_cast<std::size_t>(je(k))] = p.user_weights[ku];
        if (m.has_latency) {
            lp.upper[static_cast<std::size_t>(jd(k))] = m.upper[static_cast<std::size_t>(m.id(k))];
            lp.objective[static_cast<std::size_t>(jd(k))] = p.tradeoff * p.user_weights[ku];
        }
    }
    for (int k = 0; k < p.num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        std::vector<double> row(static_cast<std::size_t>(lp.num_vars), 0.0);
        for (int q = 0; q < p.num_cells; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            double a = p.cycles_per_bit[ku] *
                       (p.edge_energy_per_cycle[static_cast<std::size_t>(q)] -
                        p.local_energy_per_cycle[ku]);
            if (!m.pinned[idx]) a += p.tx_power[idx] / (p.bandwidth * m.rates[idx]);
            row[static_cast<std::size_t>(jl(q, k))] = a;
        }
        row[static_cast<std::size_t>(je(k))] = -1.0;
        lp.add_row(row, -p.cycles_per_bit[ku] * p.local_energy_per_cycle[ku] * p.task_bits[ku]);
    }
    if (m.has_latency) {
        for (int k = 0; k < p.num_users; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            std::vector<double> row(static_cast<std::size_t>(lp.num_vars), 0.0);
            const double slope = p.cycles_per_bit[ku] / p.local_cpu[ku];
            for (int q = 0; q < p.num_cells; ++q)
                row[static_cast<std::size_t>(jl(q, k))] = -slope;
            row[static_cast<std::size_t>(jd(k))] = -1.0;
            lp.add_row(row, -p.task_bits[ku] * slope);
        }
        for (int q = 0; q < p.num_cells; ++q)
            for (int k = 0; k < p.num_users; ++k) {
                const auto idx = static_cast<std::size_t>(p.pair(q, k));
                if (m.pinned[idx]) continue;
                const auto ku = static_cast<std::size_t>(k);
                const double f = out.edge_cpu[idx];
                std::vector<double> row(static_cast<std::size_t>(lp.num_vars), 0.0);
                row[static_cast<std::size_t>(jl(q, k))] =
                    f / (p.bandwidth * m.rates[idx]) + p.cycles_per_bit[ku];
                row[static_cast<std::size_t>(jd(k))] = -f;
                lp.add_row(row, 0.0);
            }
    }
    for (int k = 0; k < p.num_users; ++k) {
        std::vector<double> row(static_cast<std::size_t>(lp.num_vars), 0.0);
        for (int q = 0; q < p.num_cells; ++q) row[static_cast<std::size_t>(jl(q, k))] = 1.0;
        lp.add_row(row, p.task_bits[static_cast<std::size_t>(k)]);
    }

    out.offload.assign(static_cast<std::size_t>(qk), 0.0);
    LpSolution sol;
    try {
        sol = solve_lp(lp);
    } catch (const NumericalFailure&) {
        sol.status = LpStatus::infeasible;
    }
    if (sol.status == LpStatus::optimal) {
        for (int q = 0; q < p.num_cells; ++q)
            for (int k = 0; k < p.num_users; ++k) {
                double l = sol.x[static_cast<std::size_t>(jl(q, k))];
                out.offload[static_cast<std::size_t>(p.pair(q, k))] = std::max(l, 0.0);
            }
        // clamp the per-user sums against LP roundoff
        for (int k = 0; k < p.num_users; ++k) {
            double sum = 0.0;
            for (int q = 0; q < p.num_cells; ++q)
                sum += out.offload[static_cast<std::size_t>(p.pair(q, k))];
            const double lk = p.task_bits[static_cast<std::size_t>(k)];
            if (sum > lk) {
                const double s = lk / sum;
                for (int q = 0; q < p.num_cells; ++q)
                    out.offload[static_cast<std::size_t>(p.pair(q, k))] *= s;
            }
        }
    }
    // all-local fallback covers LP failure (offload already zeroed)
    out.objective = mec_cost(p, m.rates, out.offload, out.edge_cpu);
    if (!std::isfinite(out.objective)) {
        out.offload.assign(static_cast<std::size_t>(qk), 0.0);
        out.edge_cpu.assign(static_cast<std::size_t>(qk), 0.0);
        out.objective = mec_cost(p, m.rates, out.offload, out.edge_cpu);
    }
    fill_exact(p, m.rates, out.offload, out.edge_cpu, out.latency, out.energy);
    return out;
}

MecSolution spatial_bnb(
    const QcpModel& m, double rel_gap, long node_budget,
    const std::optional<std::pair<std::vector<double>, std::vector<double>>>& warm_start) {
    const SystemParams& p = m.params;
    const int qk = p.num_pairs();

    Incumbent inc;
    inc.offload.assign(static_cast<std::size_t>(qk), 0.0);
    inc.edge_cpu.assign(static_cast<std::size_t>(qk), 0.0);
    inc.objective = mec_cost(p, m.rates, inc.offload, inc.edge_cpu);  // all-local

    MecSolution out;
    out.incumbent_history.push_back(inc.objective);
    auto consider = [&](const std::vector<double>& l, const std::vector<double>& f) {
        const double c = mec_cost(p, m.rates, l, f);
        if (c < inc.objective) {
            inc.offload = l;
            inc.edge_cpu = f;
            inc.objective = c;
            out.incumbent_history.push_back(c);
        }
    };
    if (warm_start) {
        std::vector<double> l = warm_start->first;
        for (int i = 0; i < qk; ++i) {
            if (m.pinned[static_cast<std::size_t>(i)]) l[static_cast<std::size_t>(i)] = 0.0;
        }
        consider(l, warm_start->second);
    }

    struct Open {
        double bound;
        long id;
        std::vector<double> lower, upper;
        std::vector<double> x;
        int depth;
    };
    auto cmp = [](const Open& a, const Open& b) {
        return a.bound > b.bound || (a.bound == b.bound && a.id > b.id);
    };
    std::priority_queue<Open, std::vector<Open>, decltype(cmp)> open(cmp);
    long next_id = 0;

    auto push_node = [&](std::vector<double> lo, std::vector<double> hi, int depth) {
        BnbNode node{lo, hi, 0.0, depth};
        LpSolution sol;
        try {
            sol = solve_lp(mccormick_relax(m, node));
        } catch (const NumericalFailure&) {
            return;  // give up on the node, incumbent keeps correctness
        }
        if (sol.status != LpStatus::optimal) return;
        if (sol.objective_value >= inc.objective - 1e-12) return;  // cannot improve
        open.push(Open{sol.objective_value, next_id++, std::move(lo), std::move(hi),
                       std::move(sol.x), depth});
    };

    push_node(m.lower, m.upper, 0);

    const double scale = std::max(1.0, std::fabs(inc.objective));
    double best_bound = open.empty() ? inc.objective : open.top().bound;
    while (!open.empty() && out.nodes_explored < node_budget) {
        Open node = open.top();
        open.pop();
        best_bound = node.bound;
        if (inc.objective - node.bound <=
            rel_gap * std::max(1.0, std::fabs(inc.objective))) {
            break;
        }
        ++out.nodes_explored;
        if (node.bound > inc.objective + 1e-9) {
            out.max_bound_violation =
                std::max(out.max_bound_violation, node.bound - inc.objective);
        }

        const HeuristicPoint hp = feasibility_heuristic(m, node.x);
        consider(hp.offload, hp.edge_cpu);

        // branch on the largest envelope violation |w - u*v|
        int pick = -1;
        double worst = 1e-9 * scale;
        for (std::size_t t = 0; t < m.bilinear.size(); ++t) {
            const auto& bl = m.bilinear[t];
            const double w = node.x[static_cast<std::size_t>(m.num_vars) + t];
            const double v = std::fabs(w - node.x[static_cast<std::size_t>(bl.u)] *
                                               node.x[static_cast<std::size_t>(bl.v)]) *
                             std::fabs(bl.coef);
            if (v > worst) {
                worst = v;
                pick = static_cast<int>(t);
            }
        }
        if (pick < 0) continue;  // relaxation essentially exact here

        const auto& bl = m.bilinear[static_cast<std::size_t>(pick)];
        auto norm_width = [&](int j) {
            const double mw = m.upper[static_cast<std::size_t>(j)] -
                              m.lower[static_cast<std::size_t>(j)];
            if (mw <= 0.0) return 0.0;
            return (node.upper[static_cast<std::size_t>(j)] -
                    node.lower[static_cast<std::size_t>(j)]) /
                   mw;
        };
        const int jb = norm_width(bl.u) >= norm_width(bl.v) ? bl.u : bl.v;
        const double mid = 0.5 * (node.lower[static_cast<std::size_t>(jb)] +
                                  node.upper[static_cast<std::size_t>(jb)]);
        {
            std::vector<double> hi = node.upper;
            hi[static_cast<std::size_t>(jb)] = mid;
            push_node(node.lower, std::move(hi), node.depth + 1);
        }
        {
            std::vector<double> lo = node.lower;
            lo[static_cast<std::size_t>(jb)] = mid;
            push_node(std::move(lo), node.upper, node.depth + 1);
        }
    }
    if (open.empty()) best_bound = inc.objective;

    out.offload = inc.offload;
    out.edge_cpu = inc.edge_cpu;
    // with no latency term in the objective the cpu block is free; spread
    // each BS's capacity so that used pairs always get strictly positive cpu
    if (!m.has_latency) {
        for (int q = 0; q < p.num_cells; ++q) {
            int used = 0;
            for (int k = 0; k < p.num_users; ++k)
                used += out.offload[static_cast<std::size_t>(p.pair(q, k))] > 0.0 ? 1 : 0;
            for (int k = 0; k < p.num_users; ++k) {
                const auto idx = static_cast<std::size_t>(p.pair(q, k));
                out.edge_cpu[idx] = used > 0 && out.offload[idx] > 0.0
                                        ? p.edge_cpu_total[static_cast<std::size_t>(q)] / used
                                        : 0.0;
            }
        }
        inc.objective = mec_cost(p, m.rates, out.offload, out.edge_cpu);
    }
    out.objective = inc.objective;
    out.best_bound = std::min(best_bound, inc.objective);
    out.gap = (out.objective - out.best_bound) / std::max(1.0, std::fabs(out.objective));
    fill_exact(p, m.rates, out.offload, out.edge_cpu, out.latency, out.energy);
    return out;
}

namespace {

// Grid/golden-section oracle internals: the search space is parametrized
// per user by (s_k, a_k) with l_1 = s*a, l_2 = s*(1-a) (a only when Q = 2)
// and per BS by the cpu split t_q (only when K = 2, full capacity use).
struct OracleSpace {
    const SystemParams* p = nullptr;
    const std::vector<double>* rates = nullptr;
    std::vector<double> lo, hi;
    int dims = 0;

    double eval(const std::vector<double>& z) const {
        const SystemParams& pp = *p;
        const int qn = pp.num_cells;
        const int kn = pp.num_users;
        std::vector<double> l(static_cast<std::size_t>(qn) * kn, 0.0);
        std::vector<double> f(static_cast<std::size_t>(qn) * kn, 0.0);
        int pos = 0;
        for (int k = 0; k < kn; ++k) {
            const double s = z[static_cast<std::size_t>(pos++)];
            const double a = qn == 2 ? z[static_cast<std::size_t>(pos++)] : 1.0;
            l[static_cast<std::size_t>(pp.pair(0, k))] = s * a;
            if (qn == 2) l[static_cast<std::size_t>(pp.pair(1, k))] = s * (1.0 - a);
        }
        for (int q = 0; q < qn; ++q) {
            const double cap = pp.edge_cpu_total[static_cast<std::size_t>(q)];
            const double t = kn == 2 ? z[static_cast<std::size_t>(pos++)] : 1.0;
            f[static_cast<std::size_t>(pp.pair(q, 0))] = cap * t;
            if (kn == 2) f[static_cast<std::size_t>(pp.pair(q, 1))] = cap * (1.0 - t);
        }
        return mec_cost(pp, *rates, l, f);
    }
};

double golden_refine(const OracleSpace& sp, std::vector<double>& z, double fz, double step0) {
    constexpr double kGolden = 0.6180339887498949;
    double best = fz;
    for (int pass = 0; pass < 80; ++pass) {
        const double before = best;
        for (int d = 0; d < sp.dims; ++d) {
            const double width = sp.hi[static_cast<std::size_t>(d)] -
                                 sp.lo[static_cast<std::size_t>(d)];
            if (width <= 0.0) continue;
            double a = std::max(sp.lo[static_cast<std::size_t>(d)],
                                z[static_cast<std::size_t>(d)] - step0 * width);
            double b = std::min(sp.hi[static_cast<std::size_t>(d)],
                                z[static_cast<std::size_t>(d)] + step0 * width);
            double x1 = b - kGolden * (b - a);
            double x2 = a + kGolden * (b - a);
            std::vector<double> zz = z;
            zz[static_cast<std::size_t>(d)] = x1;
            double f1 = sp.eval(zz);
            zz[static_cast<std::size_t>(d)] = x2;
            double f2 = sp.eval(zz);
            for (int it = 0; it < 70 && b - a > 1e-12 * (1.0 + std::fabs(b)); ++it) {
                if (f1 <= f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - kGolden * (b - a);
                    zz[static_cast<std::size_t>(d)] = x1;
                    f1 = sp.eval(zz);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + kGolden * (b - a);
                    zz[static_cast<std::size_t>(d)] = x2;
                    f2 = sp.eval(zz);
                }
            }
            const double xm = f1 <= f2 ? x1 : x2;
            const double fm = std::min(f1, f2);
            if (fm < best) {
                best = fm;
                z[static_cast<std::size_t>(d)] = xm;
            }
        }
        if (before - best <= 1e-13 * (1.0 + std::fabs(best))) break;
    }
    return best;
}

}  // namespace

double oracle_grid(const SystemParams& p, const std::vector<double>& rates, int grid_points) {
    if (p.num_users > 2 || p.num_cells > 2) {
        throw TooLarge("oracle_grid: supports K <= 2, Q <= 2 only");
    }
    OracleSpace sp;
    sp.p = &p;
    sp.rates = &rates;
    for (int k = 0; k < p.num_users; ++k) {
        sp.lo.push_back(0.0);
        sp.hi.push_back(p.task_bits[static_cast<std::size_t>(k)]);
        if (p.num_cells == 2) {
            sp.lo.push_back(0.0);
            sp.hi.push_back(1.0);
        }
    }
    if (p.num_users == 2) {
        for (int q = 0; q < p.num_cells; ++q) {
            sp.lo.push_back(0.0);
            sp.hi.push_back(1.0);
        }
    }
    sp.dims = static_cast<int>(sp.lo.size());

    int g;
    switch (sp.dims) {
        case 1:
        case 2:
            g = std::max(grid_points, 3);
            break;
        case 3:
        case 4:
            g = 21;
            break;
        default:
            g = 9;
            break;
    }

    long total = 1;
    for (int d = 0; d < sp.dims; ++d) total *= g;

    struct Best {
        double f = kInf;
        long idx = -1;
    };
    const std::size_t slices = static_cast<std::size_t>(g);
    std::vector<Best> slice_best(slices);
    const long per_slice = total / g;
    par::parallel_for(slices, [&](std::size_t s) {
        std::vector<double> z(static_cast<std::size_t>(sp.dims));
        Best b;
        for (long r = 0; r < per_slice; ++r) {
            long code = r;
            z[0] = sp.lo[0] + (sp.hi[0] - sp.lo[0]) * static_cast<double>(s) / (g - 1);
            for (int d = 1; d < sp.dims; ++d) {
                const long i = code % g;
                code /= g;
                z[static_cast<std::size_t>(d)] =
                    sp.lo[static_cast<std::size_t>(d)] +
                    (sp.hi[static_cast<std::size_t>(d)] - sp.lo[static_cast<std::size_t>(d)]) *
                        static_cast<double>(i) / (g - 1);
            }
            const double f = sp.eval(z);
            const long idx = static_cast<long>(s) * per_slice + r;
            if (f < b.f || (f == b.f && idx < b.idx)) {
                b.f = f;
                b.idx = idx;
            }
        }
        slice_best[s] = b;
    });

    // refine from the best few coarse points
    std::vector<Best> order(slice_best);
    std::sort(order.begin(), order.end(), [](const Best& a, const Best& b) {
        if (a.f != b.f) return a.f < b.f;
        return a.idx < b.idx;
    });
    double best = kInf;
    const int starts = std::min<int>(5, static_cast<int>(order.size()));
    const double step = 1.0 / std::max(g - 1, 1);
    for (int s = 0; s < starts; ++s) {
        if (!std::isfinite(order[static_cast<std::size_t>(s)].f)) continue;
        long code = order[static_cast<std::size_t>(s)].idx;
        std::vector<double> z(static_cast<std::size_t>(sp.dims));
        const long s0 = code / (total / g);
        z[0] = sp.lo[0] + (sp.hi[0] - sp.lo[0]) * static_cast<double>(s0) / (g - 1);
        code %= total / g;
        for (int d = 1; d < sp.dims; ++d) {
            const long i = code % g;
            code /= g;
            z[static_cast<std::size_t>(d)] =
                sp.lo[static_cast<std::size_t>(d)] +
                (sp.hi[static_cast<std::size_t>(d)] - sp.lo[static_cast<std::size_t>(d)]) *
                    static_cast<double>(i) / (g - 1);
        }
        best = std::min(best, golden_refine(sp, z, order[static_cast<std::size_t>(s)].f, step));
    }
    if (!std::isfinite(best)) {
        // no feasible grid point (degenerate rates): the all-local decision
        std::vector<double> l(static_cast<std::size_t>(p.num_pairs()), 0.0);
        std::vector<double> f(static_cast<std::size_t>(p.num_pairs()), 0.0);
        best = mec_cost(p, rates, l, f);
    }
    return best;
}

}  // namespace irsmec
