#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace nonholo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Evaluator of a vector field R^n -> R^n.
using VectorFieldFn = std::function<Vec(const Vec&)>;
/// Evaluator of a matrix-valued map R^n -> R^{n x n} (Jacobians, Hessians).
using MatrixFieldFn = std::function<Mat(const Vec&)>;

/// Ordered field-index pair (j, l) with j < l, zero-based.
using IndexPair = std::pair<int, int>;
using PairList = std::vector<IndexPair>;

/// Sign choice where a formula carries a +/- square root.
enum class Branch { Plus, Minus };

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace nonholo
