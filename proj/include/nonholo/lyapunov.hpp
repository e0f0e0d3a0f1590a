#pragma once

#include <functional>
#include <optional>

#include "nonholo/types.hpp"

namespace nonholo {

/// Bound constants of a Lyapunov function on a ball around the origin:
///   beta1 ||x||^2 <= V(x) <= beta2 ||x||^2
///   alpha1 V(x) <= ||grad V(x)||^2 <= alpha2 V(x)
///   ||Hess V(x)|| <= mu
struct LyapunovConstants {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double mu = 0.0;
    double radius = 0.0;  ///< ball radius over which the bounds are asserted
};

struct LyapunovSpec {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
    std::optional<LyapunovConstants> consts;
};

/// V(x) = 1/2 sum_i w_i x_i^2 with exact constants for the diagonal case
/// (alpha1 = 2 (min w)^2 / max w, alpha2 = 2 max w, beta1 = min w / 2,
/// beta2 = max w / 2, mu = max w; the bounds hold on all of R^n).
LyapunovSpec quadratic_lyapunov(const Vec& weights);

/// Estimate the bound constants of an arbitrary positive definite V on the
/// ball of the given radius from a deterministic low-discrepancy grid of
/// `points` samples (plus axis points), widening every bound by 10%.
/// Throws when V fails to be positive at a nonzero grid point.
LyapunovConstants estimate_constants(const LyapunovSpec& spec, int dim, double radius, int points);
/// Plain-loop reference implementation of estimate_constants.
LyapunovConstants estimate_constants_serial(const LyapunovSpec& spec, int dim, double radius, int points);

/// Multiplier of the one-step decay estimate: with x(eps) = x(0) - eps grad V(x(0)) + r,
///   V(x(eps)) <= multiplier * V(x(0)),
///   multiplier = 1 - alpha1 eps + alpha2 eps^2 mu / 2
///              + mu r^2 / (2 beta1 ||x0||^2)
///              + sqrt(alpha2) (1 + eps mu) r / (sqrt(beta1) ||x0||),
/// clamped below at 0 for reporting.
double decay_rhs(const LyapunovConstants& consts, double eps, double r_norm, double x0_norm);

}  // namespace nonholo
