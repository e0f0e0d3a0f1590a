#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonholo/controller.hpp"
#include "nonholo/lyapunov.hpp"
#include "nonholo/systems.hpp"

namespace nonholo {

enum class SimMode { Sampled, Classical };

/// Time series of one closed- or open-loop run. `sample_states` holds the
/// states at the interval starts t_j = j * eps (plus the final endpoint).
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> controls;
    std::vector<double> lyapunov;
    double eps = 0.0;
    SimMode mode = SimMode::Sampled;
    std::vector<Vec> sample_states;
    std::vector<ControlParams> interval_params;  ///< parameters held per interval
};

/// A run left the certified neighbourhood (||x|| > 10 * domain radius).
struct DomainEscape : std::runtime_error {
    DomainEscape(double time_, double norm_, const std::string& what_)
        : std::runtime_error(what_), time(time_), norm(norm_) {}
    double time;
    double norm;
};

using DerivativeFn = std::function<Vec(const Vec&, double)>;

/// One classic fourth-order Runge-Kutta step; local error O(h^5).
Vec rk4_step(const DerivativeFn& deriv, const Vec& x, double t, double h);

/// Sample-and-hold run: parameters are re-synthesized from the state at each
/// interval start and held; the trigonometric phase restarts with each
/// interval. Requires steps_per_interval >= 16 * max |k| so the fastest
/// oscillation stays resolved, and ||x0|| within the system's domain radius.
Trajectory run_sampled(const DriftlessSystem& sys, const StateFeedback& law, const LyapunovSpec& lyap,
                       const Vec& x0, double eps, int num_intervals, int steps_per_interval);

/// Closed-loop run u = u(t, x(t)): parameters are re-evaluated from the
/// current state at every integrator stage and the phase uses absolute time.
Trajectory run_classical(const DriftlessSystem& sys, const StateFeedback& law, const LyapunovSpec& lyap,
                         const Vec& x0, double eps, double t_final, double step);

/// Integrate one interval [0, params.eps] under fixed parameters (no domain
/// guard; steering may legitimately swing wide before landing).
Trajectory run_open_loop(const DriftlessSystem& sys, const ControlParams& params, const LyapunovSpec& lyap,
                         const Vec& x0, int steps);

/// CSV with header t,x1..xn,u1..um,V; 17 significant digits, so parsing the
/// file reproduces the in-memory doubles exactly.
void write_csv(const Trajectory& traj, std::ostream& os);
void write_csv(const Trajectory& traj, const std::string& path);
/// Parse a trajectory CSV produced by write_csv (header included).
Trajectory read_csv(std::istream& is);

}  // namespace nonholo
