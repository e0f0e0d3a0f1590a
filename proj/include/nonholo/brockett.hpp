#pragma once

#include "nonholo/controller.hpp"
#include "nonholo/systems.hpp"

namespace nonholo {

/// One-interval control parameters for the Brockett integrator
/// (single bracket pair, so a single amplitude and frequency).
struct BrockettParams {
    double v1 = 0.0;
    double v2 = 0.0;
    double a12 = 0.0;
    int k12 = 1;  ///< nonzero integer
    double eps = 1.0;
};

/// The Brockett integrator: x1' = u1, x2' = u2, x3' = u1 x2 - u2 x1, with
/// f1 = (1, 0, x2)', f2 = (0, 1, -x1)' and [f1, f2] = (0, 0, -2)'.
DriftlessSystem brockett_system();

ControlParams to_control_params(const BrockettParams& p);

/// Endpoint of one interval under the trigonometric control, in closed form:
///   x1 + eps v1, x2 + eps v2,
///   x3 + eps (v1 x2 - v2 x1) - eps^2 / (2 pi k12) a12 (a12 - 2 v1).
/// The system is nilpotent, so this is the exact flow map.
Vec exact_step(const Vec& x0, const BrockettParams& p);

/// Discriminant of the steering quadratic for the requested k12; the step
/// from x0 to x1 is realizable with this k12 iff it is nonnegative.
double steer_discriminant(const Vec& x0, const Vec& x1, int k12);

/// Exact one-interval steering from x0 to x1:
///   v = (x1 - x0) / eps componentwise on the first two states,
///   a12 = v1 +/- sqrt(discriminant) / eps.
/// Throws std::domain_error when the requested k12 makes the discriminant
/// negative (the opposite sign of k12 always works).
BrockettParams steer(const Vec& x0, const Vec& x1, double eps, int k12, Branch branch = Branch::Plus);

/// Stabilizing feedback parameters: v = (-x1, -x2), k12 = sign(x3) (+1 at
/// x3 = 0), a = -x1 +/- sqrt(x1^2 + 2 pi |x3| / eps) for x3 != 0, else 0.
/// Satisfies exact_step(x, .) = (1 - eps) x identically.
BrockettParams brockett_feedback_params(const Vec& x, double eps, Branch branch = Branch::Plus);

/// StateFeedback wrapper around brockett_feedback_params.
StateFeedback make_brockett_feedback(double eps, Branch branch = Branch::Plus);

}  // namespace nonholo
