#pragma once

#include <vector>

#include "nonholo/lyapunov.hpp"
#include "nonholo/systems.hpp"
#include "nonholo/types.hpp"

namespace nonholo {

/// Parameters of the trigonometric control held over one sampling interval:
///   u_i(t) = v_i + sum_{(j,l)} a_{jl} { [i==j] cos(2 pi k_{jl} t / eps)
///                                     + [i==l] sin(2 pi k_{jl} t / eps) }.
/// `a` and `k` are indexed by `pairs`; every k entry is a nonzero integer and
/// the |k| values are pairwise distinct (no resonances).
struct ControlParams {
    Vec v;               ///< constant part, one entry per input
    Vec a;               ///< oscillation amplitudes, one per bracket pair
    std::vector<int> k;  ///< signed integer frequencies, one per bracket pair
    PairList pairs;      ///< bracket pairs the amplitudes refer to
    double eps = 0.0;    ///< sampling period

    int max_abs_k() const;
};

/// True iff all k entries are nonzero with pairwise distinct magnitudes.
bool nonresonant(const std::vector<int>& k);

struct SynthesisReport {
    ControlParams params;
    double residual_norm = 0.0;
    int iterations = 0;
    double xi_norm = 0.0;
    bool converged = false;
};

struct SolveOptions {
    double tol = 1e-9;      ///< absolute residual norm target
    int max_iter = 200;
    double gamma0 = 1.0;    ///< initial damping of the fixed-point step
    double gamma_min = 1e-4;  // floor at which one undamped map step is forced
};

/// Phi(x) = -A(x)^{-1} grad V(x), where A is the field/bracket frame matrix.
/// Throws std::runtime_error when A(x) is numerically singular.
Vec phi(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x);

/// Base frequencies 1, 2, ..., |pairs| in pair order; throws when the pair
/// list is empty (a fully actuated system needs no oscillations).
std::vector<int> assign_frequencies(const PairList& pairs);

/// Residual of the parameter equations at x: the control parameters solve the
/// synthesis problem exactly when this vanishes.
///
/// residual = sum_i v_i f_i(x)
///          + eps/(4 pi) sum_{(i,j)} a_{ij}^2 / k_{ij} [f_i, f_j](x)
///          + eps/2 sum_{i,j} v_i v_j (df_j/dx) f_i(x)
///          + eps/(2 pi) sum_{i<j} ( v_j sum_{(q,i)} a_{qi}/k_{qi}
///                                 - v_i sum_{(q,j)} a_{qj}/k_{qj} ) [f_i, f_j](x)
///          + grad V(x).
Vec residual(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x, const ControlParams& params);

/// Recover (v, a, k) from the internal unknown xi = (v, eps * atilde) with
/// atilde_{ij} = a_{ij}^2 / (4 pi k_{ij}):
///   a_{ij} = 2 sqrt(pi kbar_{ij} |atilde_{ij}|) sign(atilde_{ij}),
///   k_{ij} = +kbar_{ij} when atilde_{ij} >= 0, -kbar_{ij} otherwise.
ControlParams params_from_xi(const Vec& xi, double eps, const PairList& pairs, const std::vector<int>& kbar);
/// Inverse of params_from_xi (exact up to square-root rounding).
Vec xi_from_params(const ControlParams& params);

/// Solve the parameter equations at x by the damped fixed-point iteration
/// xi <- (1-gamma) xi + gamma (Phi(x) - G_x(xi)), started at xi = Phi(x),
/// with gamma halved whenever the residual increases. The square-root terms
/// in G_x are not differentiable at zero amplitude, which rules out Newton
/// steps here.
SynthesisReport solve_params(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x, double eps,
                             const SolveOptions& opts = {});

}  // namespace nonholo
