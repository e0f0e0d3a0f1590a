#include "nonholo/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace nonholo {

Vec rk4_step(const DerivativeFn& deriv, const Vec& x, double t, double h) {
    if (h <= 0.0) throw std::invalid_argument("rk4_step: step must be positive");
    const Vec k1 = deriv(x, t);
    const Vec k2 = deriv(x + 0.5 * h * k1, t + 0.5 * h);
    const Vec k3 = deriv(x + 0.5 * h * k2, t + 0.5 * h);
    const Vec k4 = deriv(x + h * k3, t + h);
    Vec next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) throw std::runtime_error("rk4_step: state became non-finite");
    return next;
}

namespace {

Vec drift(const DriftlessSystem& sys, const Vec& x, const Vec& u) {
    Vec dx = Vec::Zero(sys.n);
    for (int i = 0; i < sys.m; ++i) dx += u[i] * sys.field(i, x);
    return dx;
}

void record(Trajectory& traj, const LyapunovSpec& lyap, double t, const Vec& x, const Vec& u) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.controls.push_back(u);
    traj.lyapunov.push_back(lyap.value(x));
}

void guard_domain(const DriftlessSystem& sys, const Vec& x, double t) {
    const double norm = x.norm();
    if (norm > 10.0 * sys.domain_radius) {
        throw DomainEscape(t, norm,
                           "state left the certified neighbourhood at t = " + std::to_string(t) +
                               " (||x|| = " + std::to_string(norm) + ")");
    }
}

}  // namespace

Trajectory run_sampled(const DriftlessSystem& sys, const StateFeedback& law, const LyapunovSpec& lyap,
                       const Vec& x0, double eps, int num_intervals, int steps_per_interval) {
    if (eps <= 0.0) throw std::invalid_argument("run_sampled: eps must be positive");
    if (num_intervals <= 0) throw std::invalid_argument("run_sampled: need at least one interval");
    if (x0.norm() > sys.domain_radius) {
        throw std::invalid_argument("run_sampled: x0 lies outside the system's certified ball");
    }
    const SamplingSchedule schedule{eps};
    Trajectory traj;
    traj.eps = eps;
    traj.mode = SimMode::Sampled;

    Vec x = x0;
    traj.sample_states.push_back(x);
    const double h = eps / steps_per_interval;
    for (long j = 0; j < num_intervals; ++j) {
        const ControlParams params = sampled_feedback(law, schedule, j, x);
        if (steps_per_interval < 16 * std::max(1, params.max_abs_k())) {
            throw std::invalid_argument("run_sampled: steps_per_interval too small to resolve the fastest oscillation");
        }
        traj.interval_params.push_back(params);
        const double t0 = schedule.start(j);
        const auto deriv = [&](const Vec& xx, double tloc) { return drift(sys, xx, u_eval(params, tloc)); };
        for (int s = 0; s < steps_per_interval; ++s) {
            const double tloc = s * h;
            record(traj, lyap, t0 + tloc, x, u_eval(params, tloc));
            x = rk4_step(deriv, x, tloc, h);
            guard_domain(sys, x, t0 + (s + 1) * h);
        }
        traj.sample_states.push_back(x);
    }
    record(traj, lyap, schedule.start(num_intervals), x, u_eval(traj.interval_params.back(), eps));
    return traj;
}

Trajectory run_classical(const DriftlessSystem& sys, const StateFeedback& law, const LyapunovSpec& lyap,
                         const Vec& x0, double eps, double t_final, double step) {
    if (eps <= 0.0 || t_final <= 0.0 || step <= 0.0) {
        throw std::invalid_argument("run_classical: eps, t_final and step must be positive");
    }
    const long nsteps = std::max(1L, std::lround(std::ceil(t_final / step)));
    const double h = t_final / static_cast<double>(nsteps);

    Trajectory traj;
    traj.eps = eps;
    traj.mode = SimMode::Classical;

    // u recomputed from the current state at every integrator stage, with the
    // trigonometric phase running on absolute time.
    const auto deriv = [&](const Vec& xx, double t) { return drift(sys, xx, u_eval(law(xx), t)); };

    Vec x = x0;
    long next_sample = 0;
    for (long s = 0; s <= nsteps; ++s) {
        const double t = (s == nsteps) ? t_final : s * h;
        if (next_sample * eps <= t + 0.5 * h) {
            traj.sample_states.push_back(x);
            ++next_sample;
        }
        record(traj, lyap, t, x, u_eval(law(x), t));
        if (s == nsteps) break;
        x = rk4_step(deriv, x, t, h);
        guard_domain(sys, x, t + h);
    }
    return traj;
}

Trajectory run_open_loop(const DriftlessSystem& sys, const ControlParams& params, const LyapunovSpec& lyap,
                         const Vec& x0, int steps) {
    if (steps <= 0) throw std::invalid_argument("run_open_loop: need a positive step count");
    Trajectory traj;
    traj.eps = params.eps;
    traj.mode = SimMode::Sampled;
    traj.interval_params.push_back(params);
    traj.sample_states.push_back(x0);

    const double h = params.eps / steps;
    const auto deriv = [&](const Vec& xx, double tloc) { return drift(sys, xx, u_eval(params, tloc)); };
    Vec x = x0;
    for (int s = 0; s < steps; ++s) {
        const double tloc = s * h;
        record(traj, lyap, tloc, x, u_eval(params, tloc));
        x = rk4_step(deriv, x, tloc, h);
    }
    record(traj, lyap, params.eps, x, u_eval(params, params.eps));
    traj.sample_states.push_back(x);
    return traj;
}

namespace {

void append_double(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

}  // namespace

void write_csv(const Trajectory& traj, std::ostream& os) {
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    const int m = traj.controls.empty() ? 0 : static_cast<int>(traj.controls.front().size());
    std::string header = "t";
    for (int i = 1; i <= n; ++i) header += ",x" + std::to_string(i);
    for (int i = 1; i <= m; ++i) header += ",u" + std::to_string(i);
    header += ",V\n";
    os << header;
    for (size_t r = 0; r < traj.times.size(); ++r) {
        std::string line;
        append_double(line, traj.times[r]);
        for (int i = 0; i < n; ++i) {
            line += ',';
            append_double(line, traj.states[r][i]);
        }
        for (int i = 0; i < m; ++i) {
            line += ',';
            append_double(line, traj.controls[r][i]);
        }
        line += ',';
        append_double(line, traj.lyapunov[r]);
        line += '\n';
        os << line;
    }
}

void write_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open '" + path + "'");
    write_csv(traj, os);
}

Trajectory read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("read_csv: missing header");
    int n = 0, m = 0;
    {
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) {
            if (col.size() > 1 && col[0] == 'x') ++n;
            if (col.size() > 1 && col[0] == 'u') ++m;
        }
    }
    Trajectory traj;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (static_cast<int>(row.size()) != 1 + n + m + 1) throw std::runtime_error("read_csv: malformed row");
        traj.times.push_back(row[0]);
        Vec x(n), u(m);
        for (int i = 0; i < n; ++i) x[i] = row[static_cast<size_t>(1 + i)];
        for (int i = 0; i < m; ++i) u[i] = row[static_cast<size_t>(1 + n + i)];
        traj.states.push_back(x);
        traj.controls.push_back(u);
        traj.lyapunov.push_back(row.back());
    }
    return traj;
}

}  // namespace nonholo
