#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irsmec/experiment.hpp"

namespace {

std::vector<int> parse_values(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

int run_cells(irsmec::ExperimentConfig cfg) {
    try {
        const irsmec::SweepSummary summary = irsmec::run_sweep(cfg);
        irsmec::emit_outputs(summary.runs, summary.cells, cfg.output_dir);
        bool all_failed = !summary.runs.empty();
        for (const auto& r : summary.runs) all_failed = all_failed && r.failed;
        if (all_failed) {
            std::fprintf(stderr, "irsmec: every run failed\n");
            return 2;
        }
        for (const auto& c : summary.cells) {
            std::printf("%s %s=%d n=%d mean_cost=%.6g std=%.3g\n", c.algo.c_str(),
                        c.variable.c_str(), c.value, c.n_seeds, c.mean_cost, c.std_cost);
        }
        return 0;
    } catch (const irsmec::InvalidParams& e) {
        std::fprintf(stderr, "irsmec: config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "irsmec: solver failure: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRS-aided multi-cell MEC cost minimization"};
    app.require_subcommand(1);

    std::string config_path;
    std::string algo_override;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;

    CLI::App* run = app.add_subcommand("run", "run the configured algorithm over the seeds");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--algo", algo_override, "algorithm override");
    run->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed_override = s; }, "single-seed override");
    run->add_option("--out", out_override, "output directory override");

    std::string sweep_var;
    std::string sweep_values;
    CLI::App* sweep = app.add_subcommand("sweep", "sweep irs_elements or num_users");
    sweep->add_option("--config", config_path, "experiment config (JSON)")->required();
    sweep->add_option("--var", sweep_var, "sweep variable (irs_elements|num_users)");
    sweep->add_option("--values", sweep_values, "comma-separated sweep values");
    sweep->add_option("--algo", algo_override, "algorithm override");
    sweep->add_option("--out", out_override, "output directory override");

    CLI11_PARSE(app, argc, argv);

    irsmec::ExperimentConfig cfg;
    try {
        cfg = irsmec::load_config(config_path);
        if (!algo_override.empty()) {
            const auto a = irsmec::algo_from_name(algo_override);
            if (!a) throw irsmec::InvalidParams("unknown algo " + algo_override);
            cfg.algo = *a;
        }
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (run->parsed()) {
            cfg.sweep.reset();
            if (seed_override) cfg.seeds = {*seed_override};
        } else {
            if (!sweep_var.empty() || !sweep_values.empty()) {
                irsmec::SweepSpec sw;
                sw.variable = sweep_var;
                sw.values = parse_values(sweep_values);
                if (sw.variable != "irs_elements" && sw.variable != "num_users") {
                    throw irsmec::InvalidParams("sweep variable must be irs_elements or num_users");
                }
                if (sw.values.empty()) throw irsmec::InvalidParams("sweep values are empty");
                cfg.sweep = sw;
            }
            if (!cfg.sweep) throw irsmec::InvalidParams("sweep requires --var/--values or a config sweep");
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "irsmec: config error: %s\n", e.what());
        return 1;
    }
    return run_cells(std::move(cfg));
}
