#include "irsmec/irs_solver.hpp"

#include <algorithm>
#include <cmath>

#include "irsmec/apg.hpp"

namespace irsmec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void resize_state(FpState& st, std::size_t n) {
    st.lambda.assign(n, 0.0);
    st.weight1.assign(n, 0.0);
    st.beta.assign(n, 0.0);
    st.wstar.assign(n, 0.0);
    st.gamma.assign(n, 0.0);
    st.alpha.assign(n, 0.0);
    st.alphastar.assign(n, 0.0);
    st.rho.assign(n, 0.0);
}

// H_R[k] * F[q,k]: the per-element field the IRS redirects for one stream.
CMat irs_field(const ChannelSet& ch, const std::vector<CMat>& f, int i, int j) {
    return ch.user_to_irs[static_cast<std::size_t>(j)] *
           f[static_cast<std::size_t>(i) * ch.num_users + j];
}

void update_gamma(FpState& st, const std::vector<CMat>& heff, const std::vector<CMat>& f,
                  double noise_var, int num_cells, int num_users) {
    const auto powers = stream_powers(heff, f, num_cells, num_users);
    for (int q = 0; q < num_cells; ++q)
        for (int k = 0; k < num_users; ++k) {
            st.gamma[static_cast<std::size_t>(q * num_users + k)] =
                rate_scalar_from_powers(powers, noise_var, q, k, num_cells, num_users).sinr;
        }
}

void clip_to_ball(CMat& f) {
    const double n2 = fro_norm_sq(f);
    if (n2 > 1.0) {
        const double s = 1.0 / std::sqrt(n2);
        for (int i = 0; i < f.rows(); ++i) f(i, 0) *= s;
    }
}

}  // namespace

void update_weights(FpState& st, const SystemParams& p, const std::vector<CMat>& heff,
                    const std::vector<CMat>& beamformers, const std::vector<double>& offload,
                    const std::vector<double>& edge_cpu) {
    const int qn = p.num_cells;
    const int kn = p.num_users;
    resize_state(st, static_cast<std::size_t>(qn) * kn);

    const auto powers = stream_powers(heff, beamformers, qn, kn);
    std::vector<double> rate(static_cast<std::size_t>(qn) * kn, 0.0);
    for (int q = 0; q < qn; ++q)
        for (int k = 0; k < kn; ++k) {
            rate[static_cast<std::size_t>(q * kn + k)] =
                rate_scalar_from_powers(powers, p.noise_var, q, k, qn, kn).rate;
        }

    for (int k = 0; k < kn; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        // latency terms under the scalar-rate model, for the max subgradient
        double off = 0.0;
        std::vector<double> edge_term(static_cast<std::size_t>(qn), 0.0);
        for (int q = 0; q < qn; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            const double l = offload[idx];
            off += l;
            if (l <= 0.0) continue;
            if (!(rate[idx] > 0.0)) {
                throw ZeroRate("update_weights: offloaded bits on a zero-rate link");
            }
            if (!(edge_cpu[idx] > 0.0)) {
                throw InfeasibleDecision("update_weights: offloaded bits with zero cpu");
            }
            edge_term[static_cast<std::size_t>(q)] =
                l / (p.bandwidth * rate[idx]) + l * p.cycles_per_bit[ku] / edge_cpu[idx];
        }
        const double local = (p.task_bits[ku] - off) * p.cycles_per_bit[ku] / p.local_cpu[ku];
        double dk = local;
        for (int q = 0; q < qn; ++q) dk = std::max(dk, edge_term[static_cast<std::size_t>(q)]);
        const double tie_tol = 1e-9 * std::max(1.0, std::fabs(dk));
        int tied = (dk - local <= tie_tol) ? 1 : 0;
        for (int q = 0; q < qn; ++q) {
            if (offload[static_cast<std::size_t>(p.pair(q, k))] > 0.0 &&
                dk - edge_term[static_cast<std::size_t>(q)] <= tie_tol)
                ++tied;
        }
        for (int q = 0; q < qn; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            const double l = offload[idx];
            if (l <= 0.0) continue;  // unused link: weights stay zero
            const double zeta_share =
                (dk - edge_term[static_cast<std::size_t>(q)] <= tie_tol)
                    ? p.tradeoff / static_cast<double>(std::max(tied, 1))
                    : 0.0;
            st.lambda[idx] = 1.0 / rate[idx];
            st.weight1[idx] = p.user_weights[ku] * l / p.bandwidth * (p.tx_power[idx] + zeta_share);
            st.beta[idx] = st.weight1[idx] * st.lambda[idx];
            st.wstar[idx] = st.lambda[idx] * st.beta[idx];
        }
    }
}

FpState update_weights(const Decision& dec, const SystemParams& p, const ChannelSet& ch) {
    FpState st;
    const auto heff = effective_channel(ch, dec.phases);
    update_weights(st, p, heff, dec.beamformers, dec.offload_bits, dec.edge_cpu);
    update_gamma(st, heff, dec.beamformers, p.noise_var, p.num_cells, p.num_users);
    return st;
}

void update_alpha(FpState& st) {
    for (std::size_t i = 0; i < st.gamma.size(); ++i) {
        st.alpha[i] = st.gamma[i];
        st.alphastar[i] = st.wstar[i] * (1.0 + st.alpha[i]);
    }
}

void update_rho(FpState& st, const std::vector<CMat>& heff,
                const std::vector<CMat>& beamformers, double noise_var, int num_cells,
                int num_users) {
    const auto powers = stream_powers(heff, beamformers, num_cells, num_users);
    for (int q = 0; q < num_cells; ++q) {
        double den = noise_var;
        for (int i = 0; i < num_cells; ++i)
            for (int j = 0; j < num_users; ++j) {
                den += powers[(static_cast<std::size_t>(q) * num_cells + i) * num_users + j];
            }
        for (int k = 0; k < num_users; ++k) {
            const auto idx = static_cast<std::size_t>(q * num_users + k);
            const double sig =
                powers[(static_cast<std::size_t>(q) * num_cells + q) * num_users + k];
            st.rho[idx] = std::sqrt(st.alphastar[idx]) * std::sqrt(sig) / den;
        }
    }
}

double h_value(const std::vector<CMat>& heff, const std::vector<CMat>& beamformers,
               const FpState& st, int num_cells, int num_users) {
    double h = 0.0;
    for (int q = 0; q < num_cells; ++q)
        for (int k = 0; k < num_users; ++k) {
            const auto idx = static_cast<std::size_t>(q * num_users + k);
            const double w = st.rho[idx] * std::sqrt(st.alphastar[idx]);
            if (w <= 0.0) continue;
            h += 2.0 * w *
                 std::sqrt(gram_norm_sq(heff[idx], beamformers[idx]));
        }
    return h;
}

double p4g_objective(const std::vector<CMat>& heff, const std::vector<CMat>& beamformers,
                     const FpState& st, double noise_var, int num_cells, int num_users) {
    const auto powers = stream_powers(heff, beamformers, num_cells, num_users);
    double g = 0.0;
    for (int q = 0; q < num_cells; ++q) {
        double den = noise_var;
        for (int i = 0; i < num_cells; ++i)
            for (int j = 0; j < num_users; ++j)
                den += powers[(static_cast<std::size_t>(q) * num_cells + i) * num_users + j];
        double t = 0.0;
        for (int k = 0; k < num_users; ++k)
            t += st.rho[static_cast<std::size_t>(q * num_users + k)] *
                 st.rho[static_cast<std::size_t>(q * num_users + k)];
        g += t * den;
    }
    return h_value(heff, beamformers, st, num_cells, num_users) - g;
}

std::vector<cplx> grad_h_theta(const ChannelSet& ch, const std::vector<cplx>& theta,
                               const std::vector<CMat>& beamformers, const FpState& st) {
    const int qn = ch.num_cells;
    const int kn = ch.num_users;
    const auto heff = effective_channel(ch, theta);
    std::vector<cplx> grad(theta.size(), cplx{});
    for (int q = 0; q < qn; ++q)
        for (int k = 0; k < kn; ++k) {
            const auto idx = static_cast<std::size_t>(q * kn + k);
            const double w = st.rho[idx] * std::sqrt(st.alphastar[idx]);
            if (w <= 0.0) continue;
            const CMat v = heff[idx] * beamformers[idx];
            const double nv = std::sqrt(fro_norm_sq(v));
            if (nv <= 0.0) continue;  // subgradient 0 at the kink
            const CMat m = irs_field(ch, beamformers, q, k);
            const CMat gv = adjoint(ch.irs_to_bs[static_cast<std::size_t>(q)]) * v;  // M x 1
            const double coef = 2.0 * w / nv;
            for (std::size_t n = 0; n < theta.size(); ++n) {
                grad[n] += coef * std::conj(m(static_cast<int>(n), 0)) * gv(static_cast<int>(n), 0);
            }
        }
    return grad;
}

std::vector<CMat> grad_h_beamformers(const std::vector<CMat>& heff,
                                     const std::vector<CMat>& beamformers, const FpState& st) {
    std::vector<CMat> grad(beamformers.size());
    for (std::size_t idx = 0; idx < beamformers.size(); ++idx) {
        grad[idx] = CMat(beamformers[idx].rows(), 1);
        const double w = st.rho[idx] * std::sqrt(st.alphastar[idx]);
        if (w <= 0.0) continue;
        const CMat v = heff[idx] * beamformers[idx];
        const double nv = std::sqrt(fro_norm_sq(v));
        if (nv <= 0.0) continue;
        const CMat g = adjoint(heff[idx]) * v;
        for (int i = 0; i < g.rows(); ++i) grad[idx](i, 0) = (2.0 * w / nv) * g(i, 0);
    }
    return grad;
}

std::vector<cplx> mm_step_theta(const ChannelSet& ch, const std::vector<cplx>& theta,
                                const std::vector<CMat>& beamformers, const FpState& st,
                                double noise_var) {
    (void)noise_var;  // constant in the surrogate
    const int qn = ch.num_cells;
    const int kn = ch.num_users;
    const std::size_t m = theta.size();
    if (m == 0) return theta;

    // per-BS quadratic weight T_q = sum_k rho^2
    std::vector<double> t_q(static_cast<std::size_t>(qn), 0.0);
    for (int q = 0; q < qn; ++q)
        for (int k = 0; k < kn; ++k)
            t_q[static_cast<std::size_t>(q)] +=
                st.rho[static_cast<std::size_t>(q * kn + k)] *
                st.rho[static_cast<std::size_t>(q * kn + k)];

    // A = (sum_q T_q G_q^H G_q) Hadamard (sum_ij conj(m m^H));
    // b_n = sum_ij conj(m_n) (sum_q T_q G_q^H H_{q,j} F_{i,j})_n
    CMat w(static_cast<int>(m), static_cast<int>(m));
    for (int q = 0; q < qn; ++q) {
        if (t_q[static_cast<std::size_t>(q)] <= 0.0) continue;
        const CMat& g = ch.irs_to_bs[static_cast<std::size_t>(q)];
        const CMat gram = adjoint(g) * g;
        for (std::size_t i = 0; i < w.size(); ++i)
            w.data()[i] += t_q[static_cast<std::size_t>(q)] * gram.data()[i];
    }
    CMat a(static_cast<int>(m), static_cast<int>(m));
    std::vector<cplx> b(m, cplx{});
    for (int i = 0; i < qn; ++i)
        for (int j = 0; j < kn; ++j) {
            const CMat mf = irs_field(ch, beamformers, i, j);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) {
                    a(static_cast<int>(r), static_cast<int>(c)) +=
                        std::conj(mf(static_cast<int>(r), 0)) * mf(static_cast<int>(c), 0) *
                        w(static_cast<int>(r), static_cast<int>(c));
                }
            CMat v(static_cast<int>(m), 1);
            for (int q = 0; q < qn; ++q) {
                if (t_q[static_cast<std::size_t>(q)] <= 0.0) continue;
                const CMat hf = ch.direct[static_cast<std::size_t>(q * kn + j)] *
                                beamformers[static_cast<std::size_t>(i * kn + j)];
                const CMat gv = adjoint(ch.irs_to_bs[static_cast<std::size_t>(q)]) * hf;
                for (std::size_t n = 0; n < m; ++n)
                    v(static_cast<int>(n), 0) += t_q[static_cast<std::size_t>(q)] *
                                                 gv(static_cast<int>(n), 0);
            }
            for (std::size_t n = 0; n < m; ++n)
                b[n] += std::conj(mf(static_cast<int>(n), 0)) * v(static_cast<int>(n), 0);
        }

    const auto grad_h = grad_h_theta(ch, theta, beamformers, st);
    std::vector<cplx> c(m);
    for (std::size_t n = 0; n < m; ++n) c[n] = 0.5 * grad_h[n] - b[n];

    auto op = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
        for (std::size_t r = 0; r < m; ++r) {
            cplx s{};
            for (std::size_t cc = 0; cc < m; ++cc) s += a(static_cast<int>(r), static_cast<int>(cc)) * x[cc];
            y[r] = s;
        }
    };
    auto project = [](std::vector<cplx>& x) {
        for (auto& t : x) {
            const double mag = std::abs(t);
            if (mag > 1.0) t /= mag;
        }
    };
    return apg_minimize(m, op, c, project, theta);
}

std::vector<CMat> mm_step_beamformers(const ChannelSet& ch, const std::vector<cplx>& theta,
                                      const std::vector<CMat>& beamformers, const FpState& st,
                                      double noise_var) {
    (void)noise_var;
    const int qn = ch.num_cells;
    const int kn = ch.num_users;
    const auto heff = effective_channel(ch, theta);
    const int nu = beamformers.empty() ? 0 : beamformers[0].rows();
    const std::size_t blocks = beamformers.size();
    const std::size_t dim = blocks * static_cast<std::size_t>(nu);

    std::vector<double> t_q(static_cast<std::size_t>(qn), 0.0);
    for (int q = 0; q < qn; ++q)
        for (int k = 0; k < kn; ++k)
            t_q[static_cast<std::size_t>(q)] +=
                st.rho[static_cast<std::size_t>(q * kn + k)] *
                st.rho[static_cast<std::size_t>(q * kn + k)];

    // per-user block matrix M_j = sum_q T_q Hbar_{q,j}^H Hbar_{q,j}
    std::vector<CMat> mj(static_cast<std::size_t>(kn));
    for (int j = 0; j < kn; ++j) {
        CMat acc(nu, nu);
        for (int q = 0; q < qn; ++q) {
            if (t_q[static_cast<std::size_t>(q)] <= 0.0) continue;
            const CMat& hb = heff[static_cast<std::size_t>(q * kn + j)];
            const CMat g = adjoint(hb) * hb;
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc.data()[i] += t_q[static_cast<std::size_t>(q)] * g.data()[i];
        }
        mj[static_cast<std::size_t>(j)] = acc;
    }

    const auto grad_h = grad_h_beamformers(heff, beamformers, st);
    std::vector<cplx> c(dim, cplx{});
    std::vector<cplx> x0(dim, cplx{});
    for (std::size_t blk = 0; blk < blocks; ++blk)
        for (int i = 0; i < nu; ++i) {
            c[blk * nu + static_cast<std::size_t>(i)] = 0.5 * grad_h[blk](i, 0);
            x0[blk * nu + static_cast<std::size_t>(i)] = beamformers[blk](i, 0);
        }

    auto op = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
        for (std::size_t blk = 0; blk < blocks; ++blk) {
            const int j = static_cast<int>(blk) % kn;
            const CMat& mat = mj[static_cast<std::size_t>(j)];
            for (int r = 0; r < nu; ++r) {
                cplx s{};
                for (int cc = 0; cc < nu; ++cc) s += mat(r, cc) * x[blk * nu + static_cast<std::size_t>(cc)];
                y[blk * nu + static_cast<std::size_t>(r)] = s;
            }
        }
    };
    auto project = [&](std::vector<cplx>& x) {
        for (std::size_t blk = 0; blk < blocks; ++blk) {
            double n2 = 0.0;
            for (int i = 0; i < nu; ++i) n2 += std::norm(x[blk * nu + static_cast<std::size_t>(i)]);
            if (n2 > 1.0) {
                const double s = 1.0 / std::sqrt(n2);
                for (int i = 0; i < nu; ++i) x[blk * nu + static_cast<std::size_t>(i)] *= s;
            }
        }
    };
    const auto sol = apg_minimize(dim, op, c, project, x0);

    std::vector<CMat> out(blocks);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        out[blk] = CMat(nu, 1);
        for (int i = 0; i < nu; ++i) out[blk](i, 0) = sol[blk * nu + static_cast<std::size_t>(i)];
    }
    return out;
}

CommResult solve_comm_subproblem(const Decision& dec, const ChannelSet& ch,
                                 const SystemParams& p, const CommOptions& opts) {
    CommResult res;
    res.decision = dec;
    res.cost = total_cost(dec, ch, p).total;

    bool any_active = false;
    for (double l : dec.offload_bits) any_active = any_active || l > 0.0;
    if (!any_active) return res;  // objective constant in (F, theta)

    std::vector<cplx> theta(dec.phases.size());
    for (std::size_t n = 0; n < theta.size(); ++n) {
        theta[n] = {std::cos(dec.phases[n]), std::sin(dec.phases[n])};
    }
    std::vector<CMat> f = dec.beamformers;
    FpState st;
    double prev_cost = res.cost;

    for (int outer = 1; outer <= opts.outer_iters; ++outer) {
        res.outer_iters_used = outer;
        auto heff = effective_channel(ch, theta);
        update_weights(st, p, heff, f, dec.offload_bits, dec.edge_cpu);
        update_gamma(st, heff, f, p.noise_var, p.num_cells, p.num_users);
        update_alpha(st);
        update_rho(st, heff, f, p.noise_var, p.num_cells, p.num_users);

        if (opts.optimize_theta && ch.irs_elements > 0) {
            double obj = p4g_objective(heff, f, st, p.noise_var, p.num_cells, p.num_users);
            for (int it = 0; it < opts.mm_max_iters; ++it) {
                theta = mm_step_theta(ch, theta, f, st, p.noise_var);
                heff = effective_channel(ch, theta);
                const double next =
                    p4g_objective(heff, f, st, p.noise_var, p.num_cells, p.num_users);
                const bool done = std::fabs(next - obj) <= opts.mm_tol * std::max(1.0, std::fabs(next));
                obj = next;
                if (done) break;
            }
        }
        {
            double obj = p4g_objective(heff, f, st, p.noise_var, p.num_cells, p.num_users);
            for (int it = 0; it < opts.mm_max_iters; ++it) {
                f = mm_step_beamformers(ch, theta, f, st, p.noise_var);
                const double next =
                    p4g_objective(heff, f, st, p.noise_var, p.num_cells, p.num_users);
                const bool done = std::fabs(next - obj) <= opts.mm_tol * std::max(1.0, std::fabs(next));
                obj = next;
                if (done) break;
            }
        }

        // unit-modulus candidate; arg(0) maps to phase 0
        Decision cand = dec;
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
        cand.beamformers = f;
        for (auto& bf : cand.beamformers) clip_to_ball(bf);
        const double cost = total_cost(cand, ch, p).total;
        if (cost <= res.cost) {
            res.decision = cand;
            res.cost = cost;
        }
        if (std::fabs(prev_cost - cost) < opts.tol * std::max(1.0, std::fabs(cost))) break;
        prev_cost = cost;
    }
    return res;
}

}  // namespace irsmec
