#include "nonholo/batch.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "nonholo/brockett.hpp"
#include "nonholo/sampling.hpp"

namespace nonholo {

void apply_thread_cap_from_env() {
    const char* env = std::getenv("NONHOLO_THREADS");
    if (!env) return;
    const int cap = std::atoi(env);
    if (cap > 0) omp_set_num_threads(cap);
}

namespace {

RankGridReport reduce_rank(const std::vector<RankReport>& reports) {
    RankGridReport rep;
    rep.all_ok = true;
    rep.min_rel_gap = 1.0;
    rep.points = static_cast<long>(reports.size());
    for (const auto& r : reports) {
        rep.all_ok = rep.all_ok && r.ok;
        rep.worst_cond = std::max(rep.worst_cond, r.cond);
        if (r.sigma_max > 0.0) rep.min_rel_gap = std::min(rep.min_rel_gap, r.sigma_min / r.sigma_max);
    }
    return rep;
}

}  // namespace

RankGridReport rank_grid_check(const DriftlessSystem& sys, double radius, int points, double tol) {
    const auto grid = halton_ball(sys.n, radius, points);
    std::vector<RankReport> reports(grid.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(grid.size()); ++i) {
        reports[static_cast<size_t>(i)] = check_rank(sys, grid[static_cast<size_t>(i)], tol);
    }
    return reduce_rank(reports);
}

RankGridReport rank_grid_check_serial(const DriftlessSystem& sys, double radius, int points, double tol) {
    const auto grid = halton_ball(sys.n, radius, points);
    std::vector<RankReport> reports(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) reports[i] = check_rank(sys, grid[i], tol);
    return reduce_rank(reports);
}

namespace {

// Failures become non-converged reports so that exceptions never unwind out
// of a parallel region.
SynthesisReport solve_one_safe(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x, double eps,
                               const SolveOptions& opts) {
    try {
        return solve_params(sys, lyap, x, eps, opts);
    } catch (const std::exception&) {
        SynthesisReport rep;
        rep.residual_norm = std::numeric_limits<double>::quiet_NaN();
        rep.converged = false;
        return rep;
    }
}

}  // namespace

std::vector<SynthesisReport> solve_grid(const DriftlessSystem& sys, const LyapunovSpec& lyap,
                                        const std::vector<Vec>& states, double eps, const SolveOptions& opts) {
    std::vector<SynthesisReport> reports(states.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(states.size()); ++i) {
        reports[static_cast<size_t>(i)] = solve_one_safe(sys, lyap, states[static_cast<size_t>(i)], eps, opts);
    }
    return reports;
}

std::vector<SynthesisReport> solve_grid_serial(const DriftlessSystem& sys, const LyapunovSpec& lyap,
                                               const std::vector<Vec>& states, double eps,
                                               const SolveOptions& opts) {
    std::vector<SynthesisReport> reports(states.size());
    for (size_t i = 0; i < states.size(); ++i) reports[i] = solve_one_safe(sys, lyap, states[i], eps, opts);
    return reports;
}

namespace {

SweepRow sweep_one(const SweepSpec& spec, const DriftlessSystem& sys, const LyapunovSpec& lyap, double eps,
                   const Vec& x0) {
    SweepRow row;
    row.eps = eps;
    row.x0 = x0;
    try {
        StateFeedback law;
        if (spec.system == "brockett" && spec.closed_form_feedback) {
            law = make_brockett_feedback(eps, spec.branch);
        } else {
            law = make_synthesis_feedback(sys, lyap, eps);
        }
        Trajectory traj;
        if (spec.mode == SimMode::Sampled) {
            traj = run_sampled(sys, law, lyap, x0, eps, spec.num_intervals, spec.steps_per_interval);
        } else {
            traj = run_classical(sys, law, lyap, x0, eps, spec.t_final, eps / spec.steps_per_interval);
        }
        const DecayReport decay = decay_check(traj, lyap);
        row.lambda = decay.lambda;
        row.sigma = decay.sigma;
        row.final_norm = traj.states.back().norm();
    } catch (const SynthesisFailure&) {
        row.status = 2;
    } catch (const DomainEscape&) {
        row.status = 3;
    } catch (const std::exception&) {
        row.status = 1;
    }
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (spec.eps_values.empty()) throw std::invalid_argument("run_sweep: empty eps list");
    if (spec.x0_values.empty()) throw std::invalid_argument("run_sweep: empty x0 grid");
    const DriftlessSystem sys = make_system(spec.system);
    const Vec weights = spec.weights.size() == sys.n ? spec.weights : Vec(Vec::Ones(sys.n));
    const LyapunovSpec lyap = quadratic_lyapunov(weights);

    const long total = static_cast<long>(spec.eps_values.size() * spec.x0_values.size());
    std::vector<SweepRow> rows(static_cast<size_t>(total));
#pragma omp parallel for schedule(dynamic)
    for (long idx = 0; idx < total; ++idx) {
        const size_t ie = static_cast<size_t>(idx) / spec.x0_values.size();
        const size_t ix = static_cast<size_t>(idx) % spec.x0_values.size();
        rows[static_cast<size_t>(idx)] = sweep_one(spec, sys, lyap, spec.eps_values[ie], spec.x0_values[ix]);
    }
    return rows;
}

std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec) {
    if (spec.eps_values.empty()) throw std::invalid_argument("run_sweep: empty eps list");
    if (spec.x0_values.empty()) throw std::invalid_argument("run_sweep: empty x0 grid");
    const DriftlessSystem sys = make_system(spec.system);
    const Vec weights = spec.weights.size() == sys.n ? spec.weights : Vec(Vec::Ones(sys.n));
    const LyapunovSpec lyap = quadratic_lyapunov(weights);

    std::vector<SweepRow> rows;
    rows.reserve(spec.eps_values.size() * spec.x0_values.size());
    for (double eps : spec.eps_values) {
        for (const Vec& x0 : spec.x0_values) rows.push_back(sweep_one(spec, sys, lyap, eps, x0));
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    const int n = rows.empty() ? 0 : static_cast<int>(rows.front().x0.size());
    std::string header = "eps";
    for (int i = 1; i <= n; ++i) header += ",x0_" + std::to_string(i);
    header += ",lambda,sigma,final_norm,status\n";
    os << header;
    char buf[128];
    for (const auto& row : rows) {
        std::string line;
        std::snprintf(buf, sizeof(buf), "%.17g", row.eps);
        line += buf;
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", row.x0[i]);
            line += buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g,%d\n", row.lambda, row.sigma, row.final_norm,
                      row.status);
        line += buf;
        os << line;
    }
}

}  // namespace nonholo
