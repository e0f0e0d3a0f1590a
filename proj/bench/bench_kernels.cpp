// Timings of the batch kernels against their serial references.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "nonholo/batch.hpp"
#include "nonholo/sampling.hpp"

using namespace nonholo;

namespace {

double time_once(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, const std::function<void()>& serial, const std::function<void()>& parallel) {
    serial();  // warmup and page-in
    const double ts = time_once(serial);
    const double tp = time_once(parallel);
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, 1e3 * ts, 1e3 * tp, ts / tp);
}

}  // namespace

int main() {
    apply_thread_cap_from_env();
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    const DriftlessSystem brockett = make_system("brockett");
    const DriftlessSystem unicycle = make_system("unicycle");
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));

    row("rank grid (50k points)",
        [&] { rank_grid_check_serial(unicycle, 1.0, 50000); },
        [&] { rank_grid_check(unicycle, 1.0, 50000); });

    LyapunovSpec anon = quadratic_lyapunov(Vec{{1.0, 2.0, 0.5}});
    anon.consts.reset();
    row("constant estimation (50k)",
        [&] { estimate_constants_serial(anon, 3, 1.0, 50000); },
        [&] { estimate_constants(anon, 3, 1.0, 50000); });

    const auto states = halton_ball(3, 2.0, 2000);
    row("parameter synthesis (2k)",
        [&] { solve_grid_serial(brockett, lyap, states, 0.1); },
        [&] { solve_grid(brockett, lyap, states, 0.1); });

    SweepSpec spec;
    spec.system = "brockett";
    spec.eps_values = {0.125, 0.25, 0.5, 1.0};
    spec.x0_values = halton_ball(3, 1.5, 16);
    spec.num_intervals = 10;
    spec.steps_per_interval = 256;
    row("sweep (64 runs)",
        [&] { run_sweep_serial(spec); },
        [&] { run_sweep(spec); });

    return 0;
}
