#pragma once

#include <functional>
#include <vector>

#include "nonholo/simulator.hpp"
#include "nonholo/synthesis.hpp"
#include "nonholo/systems.hpp"

namespace nonholo {

/// Regularity data entering the expansion-remainder and a-priori growth
/// bounds: L bounds all field Jacobian norms and H all component Hessian
/// norms over the region the trajectory can reach, M is the largest field
/// norm at the initial state, U the peak of sum_i |u_i(t)| over the interval.
struct RegularityBounds {
    double L = 0.0;
    double H = 0.0;
    double M = 0.0;
    double U = 0.0;
    int n = 0;
    double u_analytic_bound = 0.0;  ///< sum |v_i| + 2 sum |a_jl|, always >= U
    double ball_radius = 0.0;       ///< radius over which L and H were taken
};

/// Decay diagnostics of a trajectory's sampled states.
struct DecayReport {
    double sigma = 0.0;   ///< 1 - max per-interval Lyapunov ratio
    double lambda = 0.0;  ///< fitted exponential rate; +inf for deadbeat runs
    std::vector<double> per_interval_ratios;
    bool decaying = false;  ///< sigma > 0
};

using ControlSignal = std::function<Vec(double)>;  // t in [0, tau] -> u(t)

/// Second-order expansion of the endpoint of a control-affine flow:
///   x0 + sum_i f_i(x0) I_i + 1/2 sum_{i,j} (df_j/dx) f_i(x0) I_i I_j
///      + 1/2 sum_{i<j} [f_i, f_j](x0) D_ij,
/// with I_i = int_0^tau u_i, D_ij = int_0^tau int_0^t (u_j(t) u_i(s)
/// - u_i(t) u_j(s)) ds dt. Iterated integrals by composite Simpson with a
/// running cumulative table (`panels` Simpson panels, O(panels) work).
Vec volterra_second_order(const DriftlessSystem& sys, const Vec& x0, const ControlSignal& u, double tau,
                          int panels);

/// Same expansion evaluated in closed form for the trigonometric control
/// family over one period [0, eps]; requires nonresonant frequencies.
Vec volterra_eps_closed(const DriftlessSystem& sys, const Vec& x0, const ControlParams& params);

/// Upper bound for the second-order expansion remainder:
///   M/L { e^z - ((z+1)^2 + 1)/2 } + H M^2 sqrt(n) / (4 L^3) { (e^z - 2)^2 + 2z - 1 },
/// z = L U tau. Falls back to the cubic leading term
/// M (L^2 + H M sqrt(n)) U^3 tau^3 / 6 when z < 1e-8 (removable singularity).
double remainder_bound(const RegularityBounds& b, double tau);

/// A-priori growth bound ||x(t) - x(0)|| <= M/L (e^{LUt} - 1).
double apriori_bound(double M, double L, double U, double t);

/// Per-interval Lyapunov ratios, contraction factor sigma and least-squares
/// exponential rate of ||x(t_j)|| (samples below 1e-12 are skipped; a run
/// that is identically at the origin reports sigma = 1 and lambda = +inf).
DecayReport decay_check(const Trajectory& traj, const LyapunovSpec& lyap);

/// Measure M, U, L, H for one interval: M from the field norms at x0, U from
/// dense sampling of the control signal, L and H as grid suprema over the
/// ball the a-priori bound predicts reachable (the radius is grown until
/// consistent with the L measured on it).
RegularityBounds measure_regularity(const DriftlessSystem& sys, const Vec& x0, const ControlParams& params,
                                    double tau);

}  // namespace nonholo
