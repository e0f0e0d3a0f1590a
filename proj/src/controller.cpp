#include "nonholo/controller.hpp"

#include <cmath>
#include <limits>

namespace nonholo {

Vec u_eval(const ControlParams& params, double t) {
    Vec u = params.v;
    for (size_t p = 0; p < params.pairs.size(); ++p) {
        const double phase = kTwoPi * params.k[p] * t / params.eps;
        u[params.pairs[p].first] += params.a[p] * std::cos(phase);
        u[params.pairs[p].second] += params.a[p] * std::sin(phase);
    }
    return u;
}

ControlParams sampled_feedback(const StateFeedback& law, const SamplingSchedule& schedule, long interval,
                               const Vec& x_at_tj) {
    try {
        return law(x_at_tj);
    } catch (const SynthesisFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw SynthesisFailure(interval, std::numeric_limits<double>::quiet_NaN(),
                               "synthesis failed at t = " + std::to_string(schedule.start(interval)) + ": " +
                                   e.what());
    }
}

StateFeedback make_synthesis_feedback(const DriftlessSystem& sys, const LyapunovSpec& lyap, double eps,
                                      const SolveOptions& opts) {
    return [sys, lyap, eps, opts](const Vec& x) {
        SynthesisReport rep = solve_params(sys, lyap, x, eps, opts);
        if (!rep.converged) {
            throw SynthesisFailure(-1, rep.residual_norm,
                                   "parameter solve did not converge (residual " +
                                       std::to_string(rep.residual_norm) + ")");
        }
        return rep.params;
    };
}

}  // namespace nonholo
