#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "nonholo/synthesis.hpp"

namespace nonholo {

/// Uniform sampling grid t_j = j * eps. Interval starts are computed by
/// multiplication, never by accumulation, so there is no drift.
struct SamplingSchedule {
    double eps = 1.0;
    double start(long j) const { return eps * static_cast<double>(j); }
    long interval_of(double t) const { return static_cast<long>(t / eps); }
};

/// Maps a sampled state to the control parameters held over the next interval.
using StateFeedback = std::function<ControlParams(const Vec&)>;

/// Parameter synthesis failed at some sampling instant.
struct SynthesisFailure : std::runtime_error {
    SynthesisFailure(long interval_, double residual_, const std::string& what_)
        : std::runtime_error(what_), interval(interval_), residual(residual_) {}
    long interval;
    double residual;
};

/// Control value at phase time t. Sampled trajectories pass interval-local
/// time; closed-loop (classical) evaluation passes absolute time. Since the
/// interval starts are integer multiples of eps and every k is an integer,
/// the two phase conventions give identical values.
Vec u_eval(const ControlParams& params, double t);

/// Freeze parameters for interval j from the state observed at its start.
/// Synthesis errors are rethrown as SynthesisFailure carrying the interval.
ControlParams sampled_feedback(const StateFeedback& law, const SamplingSchedule& schedule, long interval,
                               const Vec& x_at_tj);

/// Feedback that re-solves the parameter equations at each sampled state.
StateFeedback make_synthesis_feedback(const DriftlessSystem& sys, const LyapunovSpec& lyap, double eps,
                                      const SolveOptions& opts = {});

}  // namespace nonholo
