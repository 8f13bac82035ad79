#include "irsmec/scenario.hpp"

#include <cmath>

#include "irsmec/parallel.hpp"
#include "irsmec/rng.hpp"

namespace irsmec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream tags so each channel block draws from its own substream.
constexpr std::uint64_t kStreamDirect = 1;
constexpr std::uint64_t kStreamIrsBs = 2;
constexpr std::uint64_t kStreamUserIrs = 3;

double pathloss(double ref_db, double dist_m, double exponent) {
    return std::pow(10.0, ref_db / 10.0) * std::pow(dist_m, -exponent);
}

// Half-wavelength ULA response along the y axis for a link direction u.
std::vector<cplx> steering(int n, const Vec3& u) {
    std::vector<cplx> a(static_cast<std::size_t>(n));
    const double omega = u[1];  // direction cosine on the array axis
    for (int i = 0; i < n; ++i) {
        const double phase = kPi * i * omega;
        a[static_cast<std::size_t>(i)] = {std::cos(phase), std::sin(phase)};
    }
    return a;
}

// rows: receive side, cols: transmit side.
CMat rician_block(int rows, int cols, const Vec3& tx, const Vec3& rx, double pl_ref_db,
                  double exponent, double rician_k, rng::Rng& gen) {
    const double d = distance(tx, rx);
    const double amp = std::sqrt(pathloss(pl_ref_db, d, exponent));
    Vec3 u{(rx[0] - tx[0]) / d, (rx[1] - tx[1]) / d, (rx[2] - tx[2]) / d};
    const auto a_rx = steering(rows, u);
    const auto a_tx = steering(cols, u);
    const double w_los = std::sqrt(rician_k / (1.0 + rician_k));
    const double w_nlos = std::sqrt(1.0 / (1.0 + rician_k));
    CMat h(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const cplx los = a_rx[static_cast<std::size_t>(i)] * std::conj(a_tx[static_cast<std::size_t>(j)]);
            h(i, j) = amp * (w_los * los + w_nlos * gen.cgaussian());
        }
    return h;
}

void require_len(std::vector<std::string>& errs, std::size_t got, std::size_t want,
                 const char* what) {
    if (got != want) errs.emplace_back(what);
}

void require_positive(std::vector<std::string>& errs, const std::vector<double>& v,
                      const char* what) {
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            errs.emplace_back(what);
            return;
        }
    }
}

}  // namespace

double distance(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<std::string> validate(const SystemParams& p) {
    std::vector<std::string> errs;
    if (p.num_cells < 1) errs.emplace_back("num_cells");
    if (p.num_users < 1) errs.emplace_back("num_users");
    if (p.irs_elements < 0) errs.emplace_back("irs_elements negative");
    if (p.bs_antennas < 1) errs.emplace_back("bs_antennas");
    if (p.user_antennas < 1) errs.emplace_back("user_antennas");
    if (p.num_cells < 1 || p.num_users < 1) return errs;

    const auto q = static_cast<std::size_t>(p.num_cells);
    const auto k = static_cast<std::size_t>(p.num_users);
    require_len(errs, p.bs_positions.size(), q, "position count");
    require_len(errs, p.user_positions.size(), k, "position count");
    require_len(errs, p.task_bits.size(), k, "task_bits length");
    require_len(errs, p.cycles_per_bit.size(), k, "cycles_per_bit length");
    require_len(errs, p.local_cpu.size(), k, "local_cpu length");
    require_len(errs, p.local_energy_per_cycle.size(), k, "local_energy_per_cycle length");
    require_len(errs, p.user_weights.size(), k, "user_weights length");
    require_len(errs, p.edge_cpu_total.size(), q, "edge_cpu_total length");
    require_len(errs, p.edge_energy_per_cycle.size(), q, "edge_energy_per_cycle length");
    require_len(errs, p.tx_power.size(), q * k, "tx_power length");

    if (!(p.bandwidth > 0.0)) errs.emplace_back("bandwidth");
    if (!(p.carrier_freq > 0.0)) errs.emplace_back("carrier_freq");
    if (!(p.noise_var > 0.0)) errs.emplace_back("noise_var");
    require_positive(errs, p.task_bits, "task_bits positive");
    require_positive(errs, p.cycles_per_bit, "cycles_per_bit positive");
    require_positive(errs, p.local_cpu, "local_cpu positive");
    require_positive(errs, p.local_energy_per_cycle, "local_energy_per_cycle positive");
    require_positive(errs, p.user_weights, "user_weights positive");
    require_positive(errs, p.edge_cpu_total, "edge_cpu_total positive");
    require_positive(errs, p.edge_energy_per_cycle, "edge_energy_per_cycle positive");
    require_positive(errs, p.tx_power, "tx_power positive");
    if (!(p.tradeoff >= 0.0)) errs.emplace_back("tradeoff negative");
    return errs;
}

std::vector<std::string> validate(const FadingModel& f) {
    std::vector<std::string> errs;
    auto exp_ok = [](double e) { return e >= 1.5 && e <= 6.0; };
    if (!exp_ok(f.exponent_direct)) errs.emplace_back("exponent_direct range");
    if (!exp_ok(f.exponent_irs_bs)) errs.emplace_back("exponent_irs_bs range");
    if (!exp_ok(f.exponent_user_irs)) errs.emplace_back("exponent_user_irs range");
    if (!(f.rician_k_direct >= 0.0)) errs.emplace_back("rician_k_direct negative");
    if (!(f.rician_k_irs >= 0.0)) errs.emplace_back("rician_k_irs negative");
    return errs;
}

ChannelSet generate_channels(const SystemParams& p, const FadingModel& f, std::uint64_t seed) {
    {
        auto errs = validate(p);
        auto ferrs = validate(f);
        errs.insert(errs.end(), ferrs.begin(), ferrs.end());
        if (!errs.empty()) {
            std::string msg = "generate_channels:";
            for (const auto& e : errs) msg += " " + e;
            throw InvalidParams(msg);
        }
    }
    const int q_count = p.num_cells;
    const int k_count = p.num_users;
    const int m = p.irs_elements;

    ChannelSet ch;
    ch.num_cells = q_count;
    ch.num_users = k_count;
    ch.irs_elements = m;
    ch.direct.resize(static_cast<std::size_t>(q_count) * k_count);
    ch.irs_to_bs.resize(static_cast<std::size_t>(q_count));
    ch.user_to_irs.resize(static_cast<std::size_t>(k_count));

    par::parallel_for(static_cast<std::size_t>(q_count) * k_count, [&](std::size_t idx) {
        const int q = static_cast<int>(idx) / k_count;
        const int k = static_cast<int>(idx) % k_count;
        rng::Rng gen(rng::derive(seed, (kStreamDirect << 32) | idx));
        ch.direct[idx] = rician_block(p.bs_antennas, p.user_antennas, p.user_positions[k],
                                      p.bs_positions[q], f.pathloss_ref_db, f.exponent_direct,
                                      f.rician_k_direct, gen);
    });
    par::parallel_for(static_cast<std::size_t>(q_count), [&](std::size_t q) {
        rng::Rng gen(rng::derive(seed, (kStreamIrsBs << 32) | q));
        ch.irs_to_bs[q] = (m == 0) ? CMat(p.bs_antennas, 0)
                                   : rician_block(p.bs_antennas, m, p.irs_position,
                                                  p.bs_positions[q], f.pathloss_ref_db,
                                                  f.exponent_irs_bs, f.rician_k_irs, gen);
    });
    par::parallel_for(static_cast<std::size_t>(k_count), [&](std::size_t k) {
        rng::Rng gen(rng::derive(seed, (kStreamUserIrs << 32) | k));
        ch.user_to_irs[k] = (m == 0) ? CMat(0, p.user_antennas)
                                     : rician_block(m, p.user_antennas, p.user_positions[k],
                                                    p.irs_position, f.pathloss_ref_db,
                                                    f.exponent_user_irs, f.rician_k_irs, gen);
    });
    return ch;
}

std::vector<Vec3> place_users_in_disk(const std::vector<Vec3>& bs_positions, int num_users,
                                      double radius, std::uint64_t seed) {
    Vec3 c{0.0, 0.0, 0.0};
    for (const auto& b : bs_positions) {
        c[0] += b[0];
        c[1] += b[1];
    }
    if (!bs_positions.empty()) {
        c[0] /= static_cast<double>(bs_positions.size());
        c[1] /= static_cast<double>(bs_positions.size());
    }
    rng::Rng gen(rng::derive(seed, 0xBA5E));
    std::vector<Vec3> out(static_cast<std::size_t>(num_users));
    for (auto& u : out) {
        const double r = radius * std::sqrt(gen.uniform());
        const double phi = 2.0 * kPi * gen.uniform();
        u = {c[0] + r * std::cos(phi), c[1] + r * std::sin(phi), 0.0};
    }
    return out;
}

SystemParams default_params(int num_cells, int num_users, int irs_elements) {
    SystemParams p;
    p.num_cells = num_cells;
    p.num_users = num_users;
    p.irs_elements = irs_elements;
    p.bs_antennas = 3;
    p.user_antennas = 2;
    p.bs_positions = {{10.0, -100.0, 0.0}, {10.0, 100.0, 0.0}};
    p.bs_positions.resize(static_cast<std::size_t>(num_cells),
                          Vec3{10.0, 0.0, 0.0});
    p.irs_position = {-10.0, 0.0, 1.0};
    p.user_positions = place_users_in_disk(p.bs_positions, num_users, 20.0, 1);
    p.bandwidth = 1e3;
    p.carrier_freq = 2.005e9;
    p.noise_var = 3.16e-11;
    p.task_bits.assign(static_cast<std::size_t>(num_users), 1000.0);
    p.cycles_per_bit.assign(static_cast<std::size_t>(num_users), 1.0);
    p.local_cpu.assign(static_cast<std::size_t>(num_users), 1.0);
    p.edge_cpu_total.assign(static_cast<std::size_t>(num_cells), 100.0);
    p.local_energy_per_cycle.assign(static_cast<std::size_t>(num_users), 1e-3);
    p.edge_energy_per_cycle.assign(static_cast<std::size_t>(num_cells), 1e-4);
    p.tx_power.assign(static_cast<std::size_t>(num_cells) * num_users, 0.1);
    p.tradeoff = 1.0;
    p.user_weights.assign(static_cast<std::size_t>(num_users), 1.0);
    return p;
}

}  // namespace irsmec
