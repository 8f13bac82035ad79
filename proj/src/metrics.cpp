#include "irsmec/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "irsmec/parallel.hpp"
#include "irsmec/rng.hpp"

namespace irsmec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kFeasTol = 1e-9;

CMat apply_phase(const CMat& g, const std::vector<cplx>& theta, const CMat& hr) {
    // g * diag(theta) * hr without forming the diagonal
    CMat out(g.rows(), hr.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int n = 0; n < g.cols(); ++n) {
            const cplx w = g(i, n) * theta[static_cast<std::size_t>(n)];
            for (int j = 0; j < hr.cols(); ++j) out(i, j) += w * hr(n, j);
        }
    return out;
}

}  // namespace

std::vector<CMat> effective_channel(const ChannelSet& ch, const std::vector<double>& phases) {
    std::vector<cplx> theta(phases.size());
    for (std::size_t n = 0; n < phases.size(); ++n) {
        theta[n] = {std::cos(phases[n]), std::sin(phases[n])};
    }
    return effective_channel(ch, theta);
}

std::vector<CMat> effective_channel(const ChannelSet& ch, const std::vector<cplx>& theta) {
    if (static_cast<int>(theta.size()) != ch.irs_elements) {
        throw DimensionMismatch("effective_channel: phase count");
    }
    const int q_count = ch.num_cells;
    const int k_count = ch.num_users;
    std::vector<CMat> heff(static_cast<std::size_t>(q_count) * k_count);
    par::parallel_for(heff.size(), [&](std::size_t idx) {
        const int q = static_cast<int>(idx) / k_count;
        const int k = static_cast<int>(idx) % k_count;
        if (ch.irs_elements == 0) {
            heff[idx] = ch.direct[idx];
        } else {
            heff[idx] = ch.direct[idx] + apply_phase(ch.irs_to_bs[q], theta, ch.user_to_irs[k]);
        }
    });
    return heff;
}

CMat interference_cov(const std::vector<CMat>& heff, const std::vector<CMat>& f,
                      double noise_var, int q, int k, int num_cells, int num_users) {
    const int n_bs = heff[0].rows();
    CMat j(n_bs, n_bs);
    for (int i = 0; i < n_bs; ++i) j(i, i) = noise_var;
    for (int n = 0; n < num_cells; ++n)
        for (int m = 0; m < num_users; ++m) {
            if (n == q && m == k) continue;
            // stream (n,m) reaches BS q through user m's channel to q
            const CMat v = heff[static_cast<std::size_t>(q) * num_users + m] *
                           f[static_cast<std::size_t>(n) * num_users + m];
            add_outer(j, v, v);
        }
    return j;
}

double rate_logdet(const CMat& hbar, const CMat& f, const CMat& j) {
    const CMat v = hbar * f;  // N_BS x 1
    // ln|I + v v^H J^{-1}| = ln|J + v v^H| - ln|J|
    CMat m = j;
    add_outer(m, v, v);
    return log_det_hpd(m) - log_det_hpd(j);
}

std::vector<double> stream_powers(const std::vector<CMat>& heff, const std::vector<CMat>& f,
                                  int num_cells, int num_users) {
    const std::size_t qk = static_cast<std::size_t>(num_cells) * num_users;
    std::vector<double> powers(static_cast<std::size_t>(num_cells) * qk);
    for (int q = 0; q < num_cells; ++q)
        for (int i = 0; i < num_cells; ++i)
            for (int j = 0; j < num_users; ++j) {
                powers[(static_cast<std::size_t>(q) * num_cells + i) * num_users + j] =
                    gram_norm_sq(heff[static_cast<std::size_t>(q) * num_users + j],
                                 f[static_cast<std::size_t>(i) * num_users + j]);
            }
    return powers;
}

ScalarRate rate_scalar_from_powers(const std::vector<double>& powers, double noise_var, int q,
                                   int k, int num_cells, int num_users) {
    double den = noise_var;
    for (int i = 0; i < num_cells; ++i)
        for (int j = 0; j < num_users; ++j) {
            if (i == q && j == k) continue;
            den += powers[(static_cast<std::size_t>(q) * num_cells + i) * num_users + j];
        }
    const double sig = powers[(static_cast<std::size_t>(q) * num_cells + q) * num_users + k];
    ScalarRate r;
    r.sinr = sig / den;
    r.rate = std::log1p(r.sinr);
    return r;
}

ScalarRate rate_scalar(const std::vector<CMat>& heff, const std::vector<CMat>& f,
                       double noise_var, int q, int k, int num_cells, int num_users) {
    double den = noise_var;
    for (int i = 0; i < num_cells; ++i)
        for (int j = 0; j < num_users; ++j) {
            if (i == q && j == k) continue;
            den += gram_norm_sq(heff[static_cast<std::size_t>(q) * num_users + j],
                                f[static_cast<std::size_t>(i) * num_users + j]);
        }
    ScalarRate r;
    r.sinr = gram_norm_sq(heff[static_cast<std::size_t>(q) * num_users + k],
                          f[static_cast<std::size_t>(q) * num_users + k]) /
             den;
    r.rate = std::log1p(r.sinr);
    return r;
}

std::vector<double> all_rates_logdet(const std::vector<CMat>& heff,
                                     const std::vector<CMat>& f, double noise_var,
                                     int num_cells, int num_users) {
    std::vector<double> rates(static_cast<std::size_t>(num_cells) * num_users);
    par::parallel_for(rates.size(), [&](std::size_t idx) {
        const int q = static_cast<int>(idx) / num_users;
        const int k = static_cast<int>(idx) % num_users;
        const CMat j = interference_cov(heff, f, noise_var, q, k, num_cells, num_users);
        rates[idx] = rate_logdet(heff[idx], f[idx], j);
    });
    return rates;
}

double user_latency(const SystemParams& p, const std::vector<double>& offload,
                    const std::vector<double>& edge_cpu, const std::vector<double>& rates,
                    int k) {
    double offloaded = 0.0;
    for (int q = 0; q < p.num_cells; ++q) offloaded += offload[static_cast<std::size_t>(p.pair(q, k))];
    const double local = (p.task_bits[static_cast<std::size_t>(k)] - offloaded) *
                         p.cycles_per_bit[static_cast<std::size_t>(k)] /
                         p.local_cpu[static_cast<std::size_t>(k)];
    double edge = 0.0;
    for (int q = 0; q < p.num_cells; ++q) {
        const auto idx = static_cast<std::size_t>(p.pair(q, k));
        const double l = offload[idx];
        if (l <= 0.0) continue;
        if (!(rates[idx] > 0.0) || !(edge_cpu[idx] > 0.0)) {
            throw InfeasibleDecision("user_latency: offloaded bits with zero rate or cpu");
        }
        const double t = l / (p.bandwidth * rates[idx]) +
                         l * p.cycles_per_bit[static_cast<std::size_t>(k)] / edge_cpu[idx];
        edge = std::max(edge, t);
    }
    return std::max(local, edge);
}

double user_energy(const SystemParams& p, const std::vector<double>& offload,
                   const std::vector<double>& rates, int k) {
    double offloaded = 0.0;
    for (int q = 0; q < p.num_cells; ++q) offloaded += offload[static_cast<std::size_t>(p.pair(q, k))];
    const double ck = p.cycles_per_bit[static_cast<std::size_t>(k)];
    double e = ck * p.local_energy_per_cycle[static_cast<std::size_t>(k)] *
               (p.task_bits[static_cast<std::size_t>(k)] - offloaded);
    for (int q = 0; q < p.num_cells; ++q) {
        const auto idx = static_cast<std::size_t>(p.pair(q, k));
        const double l = offload[idx];
        if (l <= 0.0) continue;
        if (!(rates[idx] > 0.0)) {
            throw InfeasibleDecision("user_energy: offloaded bits with zero rate");
        }
        e += ck * p.edge_energy_per_cycle[static_cast<std::size_t>(q)] * l;
        e += p.tx_power[idx] * l / (p.bandwidth * rates[idx]);
    }
    return e;
}

CostBreakdown total_cost(const Decision& dec, const ChannelSet& ch, const SystemParams& p) {
    CostBreakdown cb;
    const auto heff = effective_channel(ch, dec.phases);
    cb.rates = all_rates_logdet(heff, dec.beamformers, p.noise_var, p.num_cells, p.num_users);
    cb.latency.resize(static_cast<std::size_t>(p.num_users));
    cb.energy.resize(static_cast<std::size_t>(p.num_users));
    cb.per_user_cost.resize(static_cast<std::size_t>(p.num_users));
    cb.total = 0.0;
    for (int k = 0; k < p.num_users; ++k) {
        const double d = user_latency(p, dec.offload_bits, dec.edge_cpu, cb.rates, k);
        const double e = user_energy(p, dec.offload_bits, cb.rates, k);
        cb.latency[static_cast<std::size_t>(k)] = d;
        cb.energy[static_cast<std::size_t>(k)] = e;
        cb.per_user_cost[static_cast<std::size_t>(k)] = e + p.tradeoff * d;
        cb.total += p.user_weights[static_cast<std::size_t>(k)] *
                    cb.per_user_cost[static_cast<std::size_t>(k)];
    }
    return cb;
}

double weighted_energy(const SystemParams& p, const CostBreakdown& cb) {
    double s = 0.0;
    for (int k = 0; k < p.num_users; ++k)
        s += p.user_weights[static_cast<std::size_t>(k)] * cb.energy[static_cast<std::size_t>(k)];
    return s;
}

double weighted_latency(const SystemParams& p, const CostBreakdown& cb) {
    double s = 0.0;
    for (int k = 0; k < p.num_users; ++k)
        s += p.user_weights[static_cast<std::size_t>(k)] * cb.latency[static_cast<std::size_t>(k)];
    return s;
}

std::vector<std::string> validate_decision(const Decision& dec, const SystemParams& p) {
    std::vector<std::string> errs;
    const auto qk = static_cast<std::size_t>(p.num_pairs());
    if (dec.beamformers.size() != qk || dec.offload_bits.size() != qk ||
        dec.edge_cpu.size() != qk ||
        dec.phases.size() != static_cast<std::size_t>(p.irs_elements)) {
        errs.emplace_back("block sizes");
        return errs;
    }
    for (const auto& f : dec.beamformers) {
        if (f.rows() != p.user_antennas || f.cols() != 1) {
            errs.emplace_back("beamformer shape");
            return errs;
        }
        if (fro_norm_sq(f) > 1.0 + kFeasTol) {
            errs.emplace_back("beamformer norm");
            break;
        }
    }
    for (double th : dec.phases) {
        if (!(th >= 0.0) || th >= kTwoPi) {
            errs.emplace_back("phase range");
            break;
        }
    }
    for (int k = 0; k < p.num_users; ++k) {
        double sum = 0.0;
        for (int q = 0; q < p.num_cells; ++q) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            if (dec.offload_bits[idx] < -kFeasTol) {
                errs.emplace_back("offload negative");
            }
            sum += dec.offload_bits[idx];
            if (dec.offload_bits[idx] > 0.0 && !(dec.edge_cpu[idx] > 0.0)) {
                errs.emplace_back("edge cpu zero on used pair");
            }
        }
        if (sum > p.task_bits[static_cast<std::size_t>(k)] * (1.0 + kFeasTol) + kFeasTol) {
            errs.emplace_back("offload exceeds task");
        }
    }
    for (int q = 0; q < p.num_cells; ++q) {
        double sum = 0.0;
        for (int k = 0; k < p.num_users; ++k) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            if (dec.edge_cpu[idx] < -kFeasTol) errs.emplace_back("edge cpu negative");
            sum += dec.edge_cpu[idx];
        }
        if (sum > p.edge_cpu_total[static_cast<std::size_t>(q)] * (1.0 + kFeasTol) + kFeasTol) {
            errs.emplace_back("edge cpu exceeds capacity");
        }
    }
    std::sort(errs.begin(), errs.end());
    errs.erase(std::unique(errs.begin(), errs.end()), errs.end());
    return errs;
}

Decision init_decision(const SystemParams& p, std::uint64_t seed) {
    Decision dec;
    const int qk = p.num_pairs();
    rng::Rng gen(rng::derive(seed, 0x1417));
    dec.beamformers.resize(static_cast<std::size_t>(qk));
    for (auto& f : dec.beamformers) {
        f = CMat(p.user_antennas, 1);
        double nrm = 0.0;
        for (int i = 0; i < p.user_antennas; ++i) {
            f(i, 0) = gen.cgaussian();
            nrm += std::norm(f(i, 0));
        }
        nrm = std::sqrt(nrm);
        const double radius = std::pow(gen.uniform(), 1.0 / (2.0 * p.user_antennas));
        if (nrm > 0.0) {
            for (int i = 0; i < p.user_antennas; ++i) f(i, 0) *= radius / nrm;
        }
    }
    dec.phases.resize(static_cast<std::size_t>(p.irs_elements));
    for (auto& th : dec.phases) th = gen.uniform(0.0, kTwoPi);
    dec.offload_bits.resize(static_cast<std::size_t>(qk));
    dec.edge_cpu.resize(static_cast<std::size_t>(qk));
    for (int q = 0; q < p.num_cells; ++q)
        for (int k = 0; k < p.num_users; ++k) {
            const auto idx = static_cast<std::size_t>(p.pair(q, k));
            dec.offload_bits[idx] =
                p.task_bits[static_cast<std::size_t>(k)] / (2.0 * p.num_cells);
            dec.edge_cpu[idx] = p.edge_cpu_total[static_cast<std::size_t>(q)] / p.num_users;
        }
    return dec;
}

}  // namespace irsmec
