#pragma once

#include <string>
#include <vector>

#include "nonholo/analysis.hpp"
#include "nonholo/simulator.hpp"
#include "nonholo/synthesis.hpp"
#include "nonholo/systems.hpp"

namespace nonholo {

// Batch kernels: embarrassingly parallel loops over independent points or
// runs. Each kernel has an OpenMP implementation and a plain-loop *_serial
// reference; both produce bitwise-identical results (per-index outputs,
// order-independent min/max reductions only), which the tests assert and the
// bench target times against each other.

/// Honour the NONHOLO_THREADS environment variable (caps the OpenMP pool).
void apply_thread_cap_from_env();

struct RankGridReport {
    bool all_ok = false;
    double worst_cond = 0.0;
    double min_rel_gap = 0.0;  ///< smallest sigma_min / sigma_max seen
    long points = 0;
};

/// Frame-rank test on a deterministic grid in the ball of the given radius.
RankGridReport rank_grid_check(const DriftlessSystem& sys, double radius, int points, double tol = 1e-10);
RankGridReport rank_grid_check_serial(const DriftlessSystem& sys, double radius, int points, double tol = 1e-10);

/// Parameter synthesis at a batch of states.
std::vector<SynthesisReport> solve_grid(const DriftlessSystem& sys, const LyapunovSpec& lyap,
                                        const std::vector<Vec>& states, double eps,
                                        const SolveOptions& opts = {});
std::vector<SynthesisReport> solve_grid_serial(const DriftlessSystem& sys, const LyapunovSpec& lyap,
                                               const std::vector<Vec>& states, double eps,
                                               const SolveOptions& opts = {});

struct SweepSpec {
    std::string system = "brockett";
    std::vector<double> eps_values;
    std::vector<Vec> x0_values;
    SimMode mode = SimMode::Sampled;
    int num_intervals = 12;
    double t_final = 12.0;
    int steps_per_interval = 256;
    Branch branch = Branch::Plus;
    bool closed_form_feedback = true;  ///< Brockett only; others always re-solve
    Vec weights;                       ///< Lyapunov weights; empty = all ones
};

struct SweepRow {
    double eps = 0.0;
    Vec x0;
    double lambda = 0.0;
    double sigma = 0.0;
    double final_norm = 0.0;
    int status = 0;  ///< 0 ok, 2 synthesis failure, 3 domain escape, 1 other
};

/// One run per (eps, x0) combination; failures are recorded in the row
/// status, never fatal. Rows come back in deterministic grid order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);
std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

}  // namespace nonholo
