#include "irsmec/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "irsmec/apg.hpp"
#include "irsmec/rng.hpp"

namespace irsmec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Full weighted cost of a decision, +inf instead of throwing on proposals
// that land outside the feasible set.
double sa_cost(const SystemParams& p, const ChannelSet& ch, const Decision& dec) {
    const auto heff = effective_channel(ch, dec.phases);
    const auto rates =
        all_rates_logdet(heff, dec.beamformers, p.noise_var, p.num_cells, p.num_users);
    return mec_cost(p, rates, dec.offload_bits, dec.edge_cpu);
}

Decision propose(const SystemParams& p, const Decision& cur, const SaConfig& cfg,
                 const SaBlocks& blocks, rng::Rng& gen) {
    Decision next = cur;
    if (blocks.phases) {
        for (auto& th : next.phases) {
            th += cfg.scale_phase * gen.gaussian();
            th = std::fmod(th, kTwoPi);
            if (th < 0.0) th += kTwoPi;
        }
    }
    if (blocks.beams) {
        for (auto& f : next.beamformers) {
            double n2 = 0.0;
            for (int i = 0; i < f.rows(); ++i) {
                f(i, 0) += cfg.scale_beam * gen.cgaussian();
                n2 += std::norm(f(i, 0));
            }
            if (n2 > 1.0) {
                const double s = 1.0 / std::sqrt(n2);
                for (int i = 0; i < f.rows(); ++i) f(i, 0) *= s;
            }
        }
    }
    if (blocks.offload) {
        for (int k = 0; k < p.num_users; ++k) {
            const double lk = p.task_bits[static_cast<std::size_t>(k)];
            double sum = 0.0;
            for (int q = 0; q < p.num_cells; ++q) {
                const auto idx = static_cast<std::size_t>(p.pair(q, k));
                double l = next.offload_bits[idx] + cfg.scale_offload * lk * gen.gaussian();
                l = std::clamp(l, 0.0, lk);
                next.offload_bits[idx] = l;
                sum += l;
            }
            if (sum > lk) {
                const double s = lk / sum;
                for (int q = 0; q < p.num_cells; ++q)
                    next.offload_bits[static_cast<std::size_t>(p.pair(q, k))] *= s;
            }
        }
    }
    if (blocks.cpu) {
        for (int q = 0; q < p.num_cells; ++q) {
            const double cap = p.edge_cpu_total[static_cast<std::size_t>(q)];
            double sum = 0.0;
            for (int k = 0; k < p.num_users; ++k) {
                const auto idx = static_cast<std::size_t>(p.pair(q, k));
                double f = next.edge_cpu[idx] + cfg.scale_cpu * cap * gen.gaussian();
                f = std::max(f, 0.0);
                next.edge_cpu[idx] = f;
                sum += f;
            }
            if (sum > cap) {
                const double s = cap / sum;
                for (int k = 0; k < p.num_users; ++k)
                    next.edge_cpu[static_cast<std::size_t>(p.pair(q, k))] *= s;
            }
        }
    }
    return next;
}

double tune_temperature(const SystemParams& p, const ChannelSet& ch, const Decision& init,
                        double init_cost, const SaConfig& cfg, const SaBlocks& blocks) {
    rng::Rng gen(rng::derive(cfg.seed, 0x7E11));
    double uphill_sum = 0.0;
    int uphill = 0;
    for (int i = 0; i < 100; ++i) {
        const Decision cand = propose(p, init, cfg, blocks, gen);
        const double c = sa_cost(p, ch, cand);
        if (std::isfinite(c) && c > init_cost) {
            uphill_sum += c - init_cost;
            ++uphill;
        }
    }
    if (uphill == 0) return 1.0;
    // accept an average uphill move with probability ~0.8
    return (uphill_sum / uphill) / std::log(1.0 / 0.8);
}

}  // namespace

RunResult sa_solve_blocks(const SystemParams& p, const ChannelSet& ch, const SaConfig& cfg,
                          const Decision& init, const SaBlocks& blocks) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    RunResult res;
    res.decision = init;
    double best = sa_cost(p, ch, init);
    {
        const CostBreakdown cb = total_cost(init, ch, p);
        res.trace.push_back({1, cb.total, weighted_energy(p, cb), weighted_latency(p, cb),
                             elapsed()});
    }
    if (cfg.total_evals <= 0) return res;

    double temp = cfg.initial_temp > 0.0 ? cfg.initial_temp
                                         : tune_temperature(p, ch, init, best, cfg, blocks);
    rng::Rng gen(rng::derive(cfg.seed, 0x5A5A));
    Decision cur = init;
    double cur_cost = best;
    int stage = 1;
    for (long e = 0; e < cfg.total_evals; ++e) {
        const Decision cand = propose(p, cur, cfg, blocks, gen);
        const double c = sa_cost(p, ch, cand);
        const double delta = c - cur_cost;
        bool accept = false;
        if (std::isfinite(c)) {
            accept = delta <= 0.0 ||
                     gen.uniform() < std::exp(-delta / std::max(temp, 1e-300));
        }
        if (accept) {
            cur = cand;
            cur_cost = c;
            if (c < best) {
                best = c;
                res.decision = cand;
            }
        }
        if ((e + 1) % cfg.steps_per_temp == 0) {
            temp *= cfg.cooling;
            ++stage;
            const CostBreakdown cb = total_cost(res.decision, ch, p);
            res.trace.push_back({stage, cb.total, weighted_energy(p, cb),
                                 weighted_latency(p, cb), elapsed()});
        }
    }
    res.converged = true;
    return res;
}

RunResult sa_solve(const SystemParams& p, const ChannelSet& ch, const SaConfig& cfg) {
    return sa_solve_blocks(p, ch, cfg, init_decision(p, cfg.seed), SaBlocks{});
}

CMat wmmse_update_U(const std::vector<CMat>& heff, const std::vector<CMat>& beamformers,
                    double noise_var, int q, int k, int num_cells, int num_users) {
    const auto idx = static_cast<std::size_t>(q * num_users + k);
    const CMat v = heff[idx] * beamformers[idx];
    CMat m = interference_cov(heff, beamformers, noise_var, q, k, num_cells, num_users);
    add_outer(m, v, v);
    return solve_hpd(m, v);
}

std::pair<double, double> wmmse_update_WE(const std::vector<CMat>& heff,
                                          const std::vector<CMat>& beamformers, const CMat& u,
                                          double noise_var, int q, int k, int num_cells,
                                          int num_users) {
    const auto idx = static_cast<std::size_t>(q * num_users + k);
    const CMat v = heff[idx] * beamformers[idx];
    cplx uv{};
    for (int i = 0; i < u.rows(); ++i) uv += std::conj(u(i, 0)) * v(i, 0);
    const CMat j = interference_cov(heff, beamformers, noise_var, q, k, num_cells, num_users);
    const CMat ju = j * u;
    double uju = 0.0;
    for (int i = 0; i < u.rows(); ++i) uju += (std::conj(u(i, 0)) * ju(i, 0)).real();
    const double e = std::norm(1.0 - uv) + uju;
    if (!(e > 0.0)) throw DegenerateMse("wmmse_update_WE: nonpositive mse");
    return {e, 1.0 / e};
}

namespace {

// One communication-block solve of the weighted-MMSE surrogate.
Decision wmmse_comm_step(const Decision& dec, const ChannelSet& ch, const SystemParams& p,
                         const WmmseOptions& wopts) {
    bool any_active = false;
    for (double l : dec.offload_bits) any_active = any_active || l > 0.0;
    if (!any_active) return dec;

    const int qn = p.num_cells;
    const int kn = p.num_users;
    const std::size_t qk = static_cast<std::size_t>(qn) * kn;
    const int nu = p.user_antennas;
    const int m = ch.irs_elements;

    Decision best = dec;
    double best_cost = total_cost(dec, ch, p).total;

    std::vector<cplx> theta(dec.phases.size());
    for (std::size_t n = 0; n < theta.size(); ++n)
        theta[n] = {std::cos(dec.phases[n]), std::sin(dec.phases[n])};
    std::vector<CMat> f = dec.beamformers;

    auto heff = effective_channel(ch, theta);
    FpState st;
    update_weights(st, p, heff, f, dec.offload_bits, dec.edge_cpu);

    double prev = best_cost;
    for (int it = 0; it < wopts.inner_iters; ++it) {
        heff = effective_channel(ch, theta);
        std::vector<CMat> u(qk);
        std::vector<double> w(qk, 0.0);
        for (int q = 0; q < qn; ++q)
            for (int k = 0; k < kn; ++k) {
                const auto idx = static_cast<std::size_t>(q * kn + k);
                u[idx] = wmmse_update_U(heff, f, p.noise_var, q, k, qn, kn);
                w[idx] = wmmse_update_WE(heff, f, u[idx], p.noise_var, q, k, qn, kn).second;
            }

        // beamformer block: min sum omega* W E, per-vector unit balls
        {
            std::vector<CMat> amat(static_cast<std::size_t>(kn));
            for (int j = 0; j < kn; ++j) {
                CMat acc(nu, nu);
                for (int q = 0; q < qn; ++q)
                    for (int k = 0; k < kn; ++k) {
                        const auto idx = static_cast<std::size_t>(q * kn + k);
                        const double wt = st.wstar[idx] * w[idx];
                        if (wt <= 0.0) continue;
                        const CMat hu =
                            adjoint(heff[static_cast<std::size_t>(q * kn + j)]) * u[idx];
                        add_outer(acc, hu, hu, wt);
                    }
                amat[static_cast<std::size_t>(j)] = acc;
            }
            std::vector<cplx> c(qk * static_cast<std::size_t>(nu), cplx{});
            std::vector<cplx> x0(qk * static_cast<std::size_t>(nu), cplx{});
            for (std::size_t blk = 0; blk < qk; ++blk) {
                const double wt = st.wstar[blk] * w[blk];
                CMat hu = adjoint(heff[blk]) * u[blk];
                for (int i = 0; i < nu; ++i) {
                    c[blk * nu + static_cast<std::size_t>(i)] = wt * hu(i, 0);
                    x0[blk * nu + static_cast<std::size_t>(i)] = f[blk](i, 0);
                }
            }
            auto op = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
                for (std::size_t blk = 0; blk < qk; ++blk) {
                    const CMat& mat = amat[blk % static_cast<std::size_t>(kn)];
                    for (int r = 0; r < nu; ++r) {
                        cplx s{};
                        for (int cc = 0; cc < nu; ++cc)
                            s += mat(r, cc) * x[blk * nu + static_cast<std::size_t>(cc)];
                        y[blk * nu + static_cast<std::size_t>(r)] = s;
                    }
                }
            };
            auto project = [&](std::vector<cplx>& x) {
                for (std::size_t blk = 0; blk < qk; ++blk) {
                    double n2 = 0.0;
                    for (int i = 0; i < nu; ++i)
                        n2 += std::norm(x[blk * nu + static_cast<std::size_t>(i)]);
                    if (n2 > 1.0) {
                        const double s = 1.0 / std::sqrt(n2);
                        for (int i = 0; i < nu; ++i)
                            x[blk * nu + static_cast<std::size_t>(i)] *= s;
                    }
                }
            };
            const auto sol = apg_minimize(qk * static_cast<std::size_t>(nu), op, c, project, x0);
            for (std::size_t blk = 0; blk < qk; ++blk)
                for (int i = 0; i < nu; ++i)
                    f[blk](i, 0) = sol[blk * nu + static_cast<std::size_t>(i)];
        }

        // phase block: every scalar U^H Hbar F is affine in Theta
        if (m > 0) {
            CMat a(m, m);
            std::vector<cplx> c(static_cast<std::size_t>(m), cplx{});
            std::vector<CMat> mf_cache(qk);
            for (std::size_t blk = 0; blk < qk; ++blk) {
                mf_cache[blk] = ch.user_to_irs[blk % static_cast<std::size_t>(kn)] * f[blk];
            }
            for (int q = 0; q < qn; ++q)
                for (int k = 0; k < kn; ++k) {
                    const auto idx = static_cast<std::size_t>(q * kn + k);
                    const double wt = st.wstar[idx] * w[idx];
                    if (wt <= 0.0) continue;
                    const CMat gu = adjoint(ch.irs_to_bs[static_cast<std::size_t>(q)]) * u[idx];
                    for (int i = 0; i < qn; ++i)
                        for (int j = 0; j < kn; ++j) {
                            const CMat& mf = mf_cache[static_cast<std::size_t>(i * kn + j)];
                            const CMat hf = ch.direct[static_cast<std::size_t>(q * kn + j)] *
                                            f[static_cast<std::size_t>(i * kn + j)];
                            cplx c0{};
                            for (int r = 0; r < hf.rows(); ++r)
                                c0 += std::conj(u[idx](r, 0)) * hf(r, 0);
                            std::vector<cplx> rvec(static_cast<std::size_t>(m));
                            for (int n = 0; n < m; ++n)
                                rvec[static_cast<std::size_t>(n)] =
                                    std::conj(gu(n, 0)) * mf(n, 0);
                            const cplx aterm =
                                (q == i && k == j) ? (1.0 - c0) : (-c0);
                            for (int r = 0; r < m; ++r) {
                                const cplx wr = std::conj(rvec[static_cast<std::size_t>(r)]);
                                for (int cc = 0; cc < m; ++cc)
                                    a(r, cc) += wt * wr * rvec[static_cast<std::size_t>(cc)];
                                c[static_cast<std::size_t>(r)] += wt * aterm * wr;
                            }
                        }
                }
            auto op = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
                for (int r = 0; r < m; ++r) {
                    cplx s{};
                    for (int cc = 0; cc < m; ++cc) s += a(r, cc) * x[static_cast<std::size_t>(cc)];
                    y[static_cast<std::size_t>(r)] = s;
                }
            };
            auto project = [](std::vector<cplx>& x) {
                for (auto& t : x) {
                    const double mag = std::abs(t);
                    if (mag > 1.0) t /= mag;
                }
            };
            theta = apg_minimize(static_cast<std::size_t>(m), op, c, project, theta);
        }

        // unit-modulus candidate with the no-regression guard
        Decision cand = dec;
        cand.beamformers = f;
        cand.phases.resize(theta.size());
        for (std::size_t n = 0; n < theta.size(); ++n) {
            if (std::abs(theta[n]) == 0.0) {
                cand.phases[n] = 0.0;
            } else {
                double ph = std::arg(theta[n]);
                if (ph < 0.0) ph += kTwoPi;
                if (ph >= kTwoPi) ph = 0.0;
                cand.phases[n] = ph;
            }
        }
        for (auto& bf : cand.beamformers) {
            const double n2 = fro_norm_sq(bf);
            if (n2 > 1.0) {
                const double s = 1.0 / std::sqrt(n2);
                for (int i = 0; i < bf.rows(); ++i) bf(i, 0) *= s;
            }
        }
        const double cost = total_cost(cand, ch, p).total;
        if (cost <= best_cost) {
            best = cand;
            best_cost = cost;
        }
        if (std::fabs(prev - cost) < wopts.tol * std::max(1.0, std::fabs(cost))) break;
        prev = cost;
    }
    return best;
}

ChannelSet zero_irs(const ChannelSet& ch) {
    ChannelSet out = ch;
    for (auto& g : out.irs_to_bs) g = CMat(g.rows(), g.cols());
    for (auto& h : out.user_to_irs) h = CMat(h.rows(), h.cols());
    return out;
}

}  // namespace

RunResult bcd_mse_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                        const WmmseOptions& wopts, std::uint64_t seed) {
    auto comm = [&wopts](const Decision& d, const ChannelSet& c, const SystemParams& pp,
                         int) { return wmmse_comm_step(d, c, pp, wopts); };
    return bcd_loop(p, ch, init_decision(p, seed), comm, opts);
}

RunResult bcd_sa_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                       const SaConfig& comm_cfg, std::uint64_t seed) {
    auto comm = [&comm_cfg, seed](const Decision& d, const ChannelSet& c,
                                  const SystemParams& pp, int iter) {
        SaConfig cfg = comm_cfg;
        cfg.seed = rng::derive(seed, 0xC0117 + static_cast<std::uint64_t>(iter));
        SaBlocks blocks;
        blocks.offload = false;
        blocks.cpu = false;
        return sa_solve_blocks(pp, c, cfg, d, blocks).decision;
    };
    return bcd_loop(p, ch, init_decision(p, seed), comm, opts);
}

RunResult rand_phase_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                           std::uint64_t seed) {
    BcdOptions o = opts;
    o.comm.optimize_theta = false;
    auto comm = [&o](const Decision& d, const ChannelSet& c, const SystemParams& pp, int) {
        return solve_comm_subproblem(d, c, pp, o.comm).decision;
    };
    return bcd_loop(p, ch, init_decision(p, seed), comm, o);
}

RunResult no_irs_solve(const SystemParams& p, const ChannelSet& ch, const BcdOptions& opts,
                       std::uint64_t seed) {
    const ChannelSet ch0 = zero_irs(ch);
    auto comm = [&opts](const Decision& d, const ChannelSet& c, const SystemParams& pp, int) {
        return solve_comm_subproblem(d, c, pp, opts.comm).decision;
    };
    return bcd_loop(p, ch0, init_decision(p, seed), comm, opts);
}

}  // namespace irsmec
