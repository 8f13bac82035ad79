// Compares the serial reference and the OpenMP execution of the
// data-parallel kernels: channel synthesis, batch rate evaluation, the MEC
// grid oracle, and a multi-seed solver sweep.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "irsmec/bcd.hpp"
#include "irsmec/experiment.hpp"
#include "irsmec/mec_solver.hpp"
#include "irsmec/parallel.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double>(Clock::now() - t0).count() / reps;
}

void report(const char* name, const std::function<void()>& fn, int reps) {
    irsmec::par::set_mode(irsmec::par::Mode::serial);
    const double ts = time_of(fn, reps);
    irsmec::par::set_mode(irsmec::par::Mode::openmp);
    const double tp = time_of(fn, reps);
    std::printf("%-28s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx\n", name, ts * 1e3,
                tp * 1e3, ts / tp);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", irsmec::par::max_threads());

    const irsmec::SystemParams p = irsmec::default_params(2, 3, 128);
    const irsmec::FadingModel fading;

    report("generate_channels M=128", [&] {
        for (std::uint64_t s = 1; s <= 8; ++s) irsmec::generate_channels(p, fading, s);
    }, 5);

    const irsmec::ChannelSet ch = irsmec::generate_channels(p, fading, 1);
    const irsmec::Decision dec = irsmec::init_decision(p, 1);
    report("batch log-det rates", [&] {
        const auto heff = irsmec::effective_channel(ch, dec.phases);
        for (int i = 0; i < 200; ++i) {
            irsmec::all_rates_logdet(heff, dec.beamformers, p.noise_var, p.num_cells,
                                     p.num_users);
        }
    }, 3);

    {
        const irsmec::SystemParams small = irsmec::default_params(2, 2, 0);
        std::vector<double> rates(static_cast<std::size_t>(small.num_pairs()), 0.7);
        report("mec oracle grid K=2 Q=2", [&] { irsmec::oracle_grid(small, rates, 200); }, 3);
    }

    {
        const irsmec::SystemParams mid = irsmec::default_params(2, 3, 16);
        irsmec::ExperimentConfig cfg;
        cfg.scenario.irs_elements = 16;
        cfg.outer_iters = 6;
        cfg.seeds = {1, 2, 3, 4};
        (void)mid;
        report("bcd-fp-dc 4-seed sweep", [&] { irsmec::run_sweep(cfg); }, 1);
    }
    return 0;
}
