#pragma once

#include <string>
#include <vector>

#include "nonholo/types.hpp"

namespace nonholo {

/// A driftless control-affine system dx/dt = sum_i u_i f_i(x) with m < n,
/// together with the ordered set of bracket pairs whose first-order Lie
/// brackets complete the fields to a frame of R^n.
///
/// Fields, Jacobians and Hessians are plain evaluators; a system is immutable
/// after construction and all member calls are pure, so instances can be
/// shared freely across threads.
struct DriftlessSystem {
    int n = 0;  ///< state dimension
    int m = 0;  ///< input dimension, m < n

    std::vector<VectorFieldFn> fields;  ///< m field evaluators
    /// Analytic Jacobians (may be empty: falls back to central differences
    /// when allow_finite_difference is set).
    std::vector<MatrixFieldFn> jacobians;
    /// hessians[i][c] = Hessian of component c of field i. May be empty:
    /// falls back to differencing the Jacobian.
    std::vector<std::vector<MatrixFieldFn>> hessians;

    /// Ordered bracket pairs (j, l), j < l, zero-based; exactly n - m of them.
    PairList pairs;

    double domain_radius = 1.0;  ///< radius of the ball where the frame is certified
    std::string name;
    bool allow_finite_difference = true;

    Vec field(int i, const Vec& x) const;
    Mat jacobian(int i, const Vec& x) const;
    /// Hessian of component `comp` of field `i`.
    Mat component_hessian(int i, int comp, const Vec& x) const;

    /// Throws std::invalid_argument when dimensions or the pair set are
    /// inconsistent (m >= n, |pairs| != n - m, unordered or out-of-range pair).
    void validate() const;
};

/// [f_j, f_l](x) = (df_l/dx)(x) f_j(x) - (df_j/dx)(x) f_l(x).
Vec lie_bracket(const DriftlessSystem& sys, int j, int l, const Vec& x);

/// n x n matrix whose columns are f_1(x)..f_m(x) followed by the Lie brackets
/// over the system's pair list, in order.
Mat bracket_matrix(const DriftlessSystem& sys, const Vec& x);

struct RankReport {
    bool ok = false;
    double cond = 0.0;  ///< sigma_max / sigma_min of the frame matrix
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

/// Frame (rank) test: true iff the smallest singular value of
/// bracket_matrix(x) exceeds tol times the largest.
RankReport check_rank(const DriftlessSystem& sys, const Vec& x, double tol = 1e-10);

/// Central-difference Jacobian of an arbitrary field evaluator; entry error O(h^2).
Mat finite_diff_jacobian(const VectorFieldFn& f, const Vec& x, double h);

/// Names of the built-in systems.
const std::vector<std::string>& registered_systems();
/// Construct a built-in system by name; throws std::invalid_argument for
/// unknown names.
DriftlessSystem make_system(const std::string& name);

DriftlessSystem unicycle_system();
DriftlessSystem perturbed_brockett_system();
DriftlessSystem brockett5_system();

}  // namespace nonholo
