#include "irsmec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "irsmec/parallel.hpp"
#include "irsmec/rng.hpp"

namespace irsmec {

namespace {

using nlohmann::json;

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("IRSMEC_LOG");
        if (env == nullptr) return 1;
        const std::string v(env);
        if (v == "quiet" || v == "0") return 0;
        if (v == "debug" || v == "2") return 2;
        return 1;
    }();
    return level;
}

void log_line(int level, const std::string& msg) {
    if (log_level() >= level) std::fprintf(stderr, "[irsmec] %s\n", msg.c_str());
}

std::vector<double> number_or_array(const json& j, const char* key,
                                    const std::vector<double>& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_number()) return {v.get<double>()};
    std::vector<double> out;
    for (const auto& x : v) {
        if (x.is_array()) {  // nested rows (e.g. tx_power given per BS)
            for (const auto& y : x) out.push_back(y.get<double>());
        } else {
            out.push_back(x.get<double>());
        }
    }
    if (out.empty()) throw InvalidParams(std::string("config: empty array for ") + key);
    return out;
}

Vec3 parse_vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw InvalidParams("config: positions must be [x,y,z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<double> expand(const std::vector<double>& v, std::size_t n, const char* what) {
    if (v.size() == n) return v;
    if (v.size() == 1) return std::vector<double>(n, v[0]);
    // a uniform vector may be re-broadcast when a sweep changes the count
    if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) {
        return std::vector<double>(n, v[0]);
    }
    throw InvalidParams(std::string("config: cannot expand ") + what + " to " +
                        std::to_string(n) + " entries");
}

constexpr std::uint64_t kPlacementStream = 0x9A7CE;

void format_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out += buf;
}

}  // namespace

std::string algo_name(Algo algo) {
    switch (algo) {
        case Algo::bcd_fp_dc: return "bcd-fp-dc";
        case Algo::sa: return "sa";
        case Algo::bcd_sa: return "bcd-sa";
        case Algo::bcd_mse: return "bcd-mse";
        case Algo::rand_phase: return "rand-phase";
        case Algo::no_irs: return "no-irs";
    }
    return "unknown";
}

std::optional<Algo> algo_from_name(const std::string& name) {
    for (Algo a : {Algo::bcd_fp_dc, Algo::sa, Algo::bcd_sa, Algo::bcd_mse, Algo::rand_phase,
                   Algo::no_irs}) {
        if (algo_name(a) == name) return a;
    }
    return std::nullopt;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidParams(std::string("config: parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        ScenarioSpec& sc = cfg.scenario;
        sc.num_cells = s.value("num_cells", sc.num_cells);
        sc.num_users = s.value("num_users", sc.num_users);
        sc.irs_elements = s.value("irs_elements", sc.irs_elements);
        sc.bs_antennas = s.value("bs_antennas", sc.bs_antennas);
        sc.user_antennas = s.value("user_antennas", sc.user_antennas);
        if (s.contains("bs_positions")) {
            sc.bs_positions.clear();
            for (const auto& v : s.at("bs_positions")) sc.bs_positions.push_back(parse_vec3(v));
        }
        if (s.contains("irs_position")) sc.irs_position = parse_vec3(s.at("irs_position"));
        if (s.contains("user_positions") && !s.at("user_positions").is_null()) {
            std::vector<Vec3> up;
            for (const auto& v : s.at("user_positions")) up.push_back(parse_vec3(v));
            sc.user_positions = up;
        }
        sc.bandwidth = s.value("bandwidth", sc.bandwidth);
        sc.carrier_freq = s.value("carrier_freq", sc.carrier_freq);
        sc.noise_var = s.value("noise_var", sc.noise_var);
        sc.tradeoff = s.value("tradeoff", sc.tradeoff);
        sc.task_bits = number_or_array(s, "task_bits", sc.task_bits);
        sc.cycles_per_bit = number_or_array(s, "cycles_per_bit", sc.cycles_per_bit);
        sc.local_cpu = number_or_array(s, "local_cpu", sc.local_cpu);
        sc.local_energy_per_cycle =
            number_or_array(s, "local_energy_per_cycle", sc.local_energy_per_cycle);
        sc.user_weights = number_or_array(s, "user_weights", sc.user_weights);
        sc.edge_cpu_total = number_or_array(s, "edge_cpu_total", sc.edge_cpu_total);
        sc.edge_energy_per_cycle =
            number_or_array(s, "edge_energy_per_cycle", sc.edge_energy_per_cycle);
        sc.tx_power = number_or_array(s, "tx_power", sc.tx_power);
        sc.placement_radius = s.value("placement_radius", sc.placement_radius);
        if (s.contains("fading")) {
            const auto& f = s.at("fading");
            sc.fading.pathloss_ref_db = f.value("pathloss_ref_db", sc.fading.pathloss_ref_db);
            sc.fading.exponent_direct = f.value("exponent_direct", sc.fading.exponent_direct);
            sc.fading.exponent_irs_bs = f.value("exponent_irs_bs", sc.fading.exponent_irs_bs);
            sc.fading.exponent_user_irs =
                f.value("exponent_user_irs", sc.fading.exponent_user_irs);
            sc.fading.rician_k_direct = f.value("rician_K_direct", sc.fading.rician_k_direct);
            sc.fading.rician_k_irs = f.value("rician_K_irs", sc.fading.rician_k_irs);
        }
    }
    if (j.contains("algo")) {
        const auto name = j.at("algo").get<std::string>();
        const auto a = algo_from_name(name);
        if (!a) throw InvalidParams("config: unknown algo " + name);
        cfg.algo = *a;
    }
    cfg.outer_iters = j.value("outer_iters", cfg.outer_iters);
    cfg.outer_tol = j.value("outer_tol", cfg.outer_tol);
    if (cfg.outer_iters < 1) throw InvalidParams("config: outer_iters must be >= 1");
    if (!(cfg.outer_tol > 0.0)) throw InvalidParams("config: outer_tol must be > 0");
    if (j.contains("seeds")) {
        for (const auto& s : j.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
        SweepSpec sw;
        sw.variable = j.at("sweep").value("variable", std::string{});
        if (sw.variable != "irs_elements" && sw.variable != "num_users") {
            throw InvalidParams("config: sweep.variable must be irs_elements or num_users");
        }
        for (const auto& v : j.at("sweep").at("values")) {
            const int value = v.get<int>();
            if (value <= 0 && !(sw.variable == "irs_elements" && value == 0)) {
                throw InvalidParams("config: sweep values must be positive");
            }
            sw.values.push_back(value);
        }
        cfg.sweep = sw;
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("sa")) {
        const auto& s = j.at("sa");
        cfg.sa.initial_temp = s.value("initial_temp", cfg.sa.initial_temp);
        cfg.sa.cooling = s.value("cooling", cfg.sa.cooling);
        cfg.sa.steps_per_temp = s.value("steps_per_temp", cfg.sa.steps_per_temp);
        cfg.sa.total_evals = s.value("total_evals", cfg.sa.total_evals);
        cfg.sa.scale_phase = s.value("scale_phase", cfg.sa.scale_phase);
        cfg.sa.scale_beam = s.value("scale_beam", cfg.sa.scale_beam);
        cfg.sa.scale_offload = s.value("scale_offload", cfg.sa.scale_offload);
        cfg.sa.scale_cpu = s.value("scale_cpu", cfg.sa.scale_cpu);
        if (!(cfg.sa.cooling > 0.0 && cfg.sa.cooling < 1.0)) {
            throw InvalidParams("config: sa.cooling must be in (0,1)");
        }
    }
    if (j.contains("wmmse")) {
        cfg.wmmse.inner_iters = j.at("wmmse").value("inner_iters", cfg.wmmse.inner_iters);
        cfg.wmmse.tol = j.at("wmmse").value("tol", cfg.wmmse.tol);
    }
    return cfg;
}

SystemParams materialize(const ScenarioSpec& spec,
                         const std::optional<std::pair<std::string, int>>& sweep_override,
                         std::uint64_t seed) {
    SystemParams p;
    p.num_cells = spec.num_cells;
    p.num_users = spec.num_users;
    p.irs_elements = spec.irs_elements;
    if (sweep_override) {
        if (sweep_override->first == "irs_elements") {
            p.irs_elements = sweep_override->second;
        } else if (sweep_override->first == "num_users") {
            p.num_users = sweep_override->second;
        } else {
            throw InvalidParams("materialize: unknown sweep variable " + sweep_override->first);
        }
    }
    p.bs_antennas = spec.bs_antennas;
    p.user_antennas = spec.user_antennas;
    p.bs_positions = spec.bs_positions;
    p.irs_position = spec.irs_position;
    p.bandwidth = spec.bandwidth;
    p.carrier_freq = spec.carrier_freq;
    p.noise_var = spec.noise_var;
    p.tradeoff = spec.tradeoff;

    const auto k = static_cast<std::size_t>(p.num_users);
    const auto q = static_cast<std::size_t>(p.num_cells);
    p.task_bits = expand(spec.task_bits, k, "task_bits");
    p.cycles_per_bit = expand(spec.cycles_per_bit, k, "cycles_per_bit");
    p.local_cpu = expand(spec.local_cpu, k, "local_cpu");
    p.local_energy_per_cycle = expand(spec.local_energy_per_cycle, k, "local_energy_per_cycle");
    p.user_weights = expand(spec.user_weights, k, "user_weights");
    p.edge_cpu_total = expand(spec.edge_cpu_total, q, "edge_cpu_total");
    p.edge_energy_per_cycle = expand(spec.edge_energy_per_cycle, q, "edge_energy_per_cycle");
    p.tx_power = expand(spec.tx_power, q * k, "tx_power");

    if (spec.user_positions && spec.user_positions->size() == k) {
        p.user_positions = *spec.user_positions;
    } else {
        p.user_positions = place_users_in_disk(p.bs_positions, p.num_users,
                                               spec.placement_radius,
                                               rng::derive(seed, kPlacementStream));
    }
    auto errs = validate(p);
    if (!errs.empty()) {
        std::string msg = "materialize:";
        for (const auto& e : errs) msg += " " + e;
        throw InvalidParams(msg);
    }
    return p;
}

RunResult run_bcd_fp_dc(const SystemParams& p, const ChannelSet& ch, int outer_iters,
                        double outer_tol, std::uint64_t seed) {
    BcdOptions opts;
    opts.outer_iters = outer_iters;
    opts.outer_tol = outer_tol;
    auto comm = [&opts](const Decision& d, const ChannelSet& c, const SystemParams& pp, int) {
        return solve_comm_subproblem(d, c, pp, opts.comm).decision;
    };
    return bcd_loop(p, ch, init_decision(p, seed), comm, opts);
}

RunResult run_algorithm(Algo algo, const ExperimentConfig& cfg, const SystemParams& p,
                        const ChannelSet& ch, std::uint64_t seed) {
    BcdOptions opts;
    opts.outer_iters = cfg.outer_iters;
    opts.outer_tol = cfg.outer_tol;
    switch (algo) {
        case Algo::bcd_fp_dc:
            return run_bcd_fp_dc(p, ch, cfg.outer_iters, cfg.outer_tol, seed);
        case Algo::sa: {
            SaConfig sa = cfg.sa;
            sa.seed = seed;
            return sa_solve(p, ch, sa);
        }
        case Algo::bcd_sa:
            return bcd_sa_solve(p, ch, opts, cfg.sa, seed);
        case Algo::bcd_mse:
            return bcd_mse_solve(p, ch, opts, cfg.wmmse, seed);
        case Algo::rand_phase:
            return rand_phase_solve(p, ch, opts, seed);
        case Algo::no_irs:
            return no_irs_solve(p, ch, opts, seed);
    }
    throw InvalidParams("run_algorithm: unknown algorithm");
}

SweepSummary run_sweep(const ExperimentConfig& cfg) {
    const std::string variable = cfg.sweep ? cfg.sweep->variable : "none";
    const std::vector<int> values = cfg.sweep ? cfg.sweep->values : std::vector<int>{0};

    struct Cell {
        int value;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (int v : values)
        for (std::uint64_t s : cfg.seeds) cells.push_back({v, s});

    SweepSummary summary;
    summary.runs.resize(cells.size());
    par::parallel_for(cells.size(), [&](std::size_t i) {
        const Cell& cell = cells[i];
        RunRecord rec;
        rec.algo = algo_name(cfg.algo);
        rec.sweep_variable = variable;
        rec.sweep_value = cell.value;
        rec.seed = cell.seed;
        rec.run_id = rec.algo + "-" + variable + std::to_string(cell.value) + "-seed" +
                     std::to_string(cell.seed);
        try {
            const std::optional<std::pair<std::string, int>> ov =
                cfg.sweep ? std::make_optional(std::make_pair(variable, cell.value))
                          : std::nullopt;
            const SystemParams p = materialize(cfg.scenario, ov, cell.seed);
            const ChannelSet ch = generate_channels(p, cfg.scenario.fading, cell.seed);
            RunResult run = run_algorithm(cfg.algo, cfg, p, ch, cell.seed);
            const auto violations = validate_decision(run.decision, p);
            if (!violations.empty()) {
                std::string msg = "final decision infeasible:";
                for (const auto& v : violations) msg += " " + v;
                throw NumericalFailure(msg);
            }
            rec.trace = std::move(run.trace);
            rec.converged = run.converged;
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        summary.runs[i] = std::move(rec);
    });

    for (const auto& r : summary.runs) {
        if (r.failed) log_line(1, "run " + r.run_id + " failed: " + r.error);
    }

    for (int v : values) {
        SweepCell cell;
        cell.algo = algo_name(cfg.algo);
        cell.variable = variable;
        cell.value = v;
        double sum = 0.0, sum_sq = 0.0, sum_e = 0.0, sum_d = 0.0;
        int n = 0;
        for (const auto& r : summary.runs) {
            if (r.failed || r.sweep_value != v || r.trace.empty()) continue;
            const TraceRow& last = r.trace.back();
            sum += last.cost;
            sum_sq += last.cost * last.cost;
            sum_e += last.energy;
            sum_d += last.latency;
            ++n;
        }
        cell.n_seeds = n;
        if (n > 0) {
            cell.mean_cost = sum / n;
            cell.mean_energy = sum_e / n;
            cell.mean_latency = sum_d / n;
            if (n > 1) {
                const double var = (sum_sq - sum * sum / n) / (n - 1);
                cell.std_cost = std::sqrt(std::max(var, 0.0));
            }
        }
        summary.cells.push_back(cell);
    }
    return summary;
}

void emit_outputs(const std::vector<RunRecord>& runs, const std::vector<SweepCell>& cells,
                  const std::string& output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw IoError("emit_outputs: cannot create " + output_dir + ": " + ec.message());

    std::vector<const RunRecord*> sorted;
    for (const auto& r : runs) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
        return std::tie(a->algo, a->sweep_value, a->seed) <
               std::tie(b->algo, b->sweep_value, b->seed);
    });

    const fs::path conv_path = fs::path(output_dir) / "convergence.csv";
    {
        std::string out = "run_id,algo,sweep_value,seed,iteration,cost,energy,latency,wallclock_s\n";
        for (const RunRecord* r : sorted) {
            if (r->failed) continue;
            for (const auto& row : r->trace) {
                out += r->run_id;
                out += ',';
                out += r->algo;
                out += ',';
                out += std::to_string(r->sweep_value);
                out += ',';
                out += std::to_string(r->seed);
                out += ',';
                out += std::to_string(row.iteration);
                out += ',';
                format_value(out, row.cost);
                out += ',';
                format_value(out, row.energy);
                out += ',';
                format_value(out, row.latency);
                out += ',';
                format_value(out, row.wallclock_s);
                out += '\n';
            }
        }
        std::ofstream f(conv_path, std::ios::binary);
        if (!f) throw IoError("emit_outputs: cannot write " + conv_path.string());
        f << out;
    }

    std::vector<const SweepCell*> cs;
    for (const auto& c : cells) cs.push_back(&c);
    std::sort(cs.begin(), cs.end(), [](const SweepCell* a, const SweepCell* b) {
        return std::tie(a->algo, a->value) < std::tie(b->algo, b->value);
    });
    const fs::path sweep_path = fs::path(output_dir) / "sweep.csv";
    {
        std::string out =
            "algo,sweep_variable,sweep_value,n_seeds,mean_cost,std_cost,mean_energy,mean_latency\n";
        for (const SweepCell* c : cs) {
            out += c->algo;
            out += ',';
            out += c->variable;
            out += ',';
            out += std::to_string(c->value);
            out += ',';
            out += std::to_string(c->n_seeds);
            out += ',';
            format_value(out, c->mean_cost);
            out += ',';
            format_value(out, c->std_cost);
            out += ',';
            format_value(out, c->mean_energy);
            out += ',';
            format_value(out, c->mean_latency);
            out += '\n';
        }
        std::ofstream f(sweep_path, std::ios::binary);
        if (!f) throw IoError("emit_outputs: cannot write " + sweep_path.string());
        f << out;
    }
    log_line(2, "wrote " + conv_path.string() + " and " + sweep_path.string());
}

}  // namespace irsmec
