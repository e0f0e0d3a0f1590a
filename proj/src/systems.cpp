#include "nonholo/systems.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nonholo/brockett.hpp"

namespace nonholo {

Vec DriftlessSystem::field(int i, const Vec& x) const {
    if (i < 0 || i >= m) throw std::out_of_range("field index out of range");
    return fields[static_cast<size_t>(i)](x);
}

Mat DriftlessSystem::jacobian(int i, const Vec& x) const {
    if (i < 0 || i >= m) throw std::out_of_range("field index out of range");
    if (!jacobians.empty() && jacobians[static_cast<size_t>(i)]) {
        return jacobians[static_cast<size_t>(i)](x);
    }
    if (!allow_finite_difference) {
        throw std::runtime_error("no Jacobian evaluator for field " + std::to_string(i) +
                                 " and finite differences are disabled");
    }
    const double h = 1e-6 * (1.0 + x.norm());
    return finite_diff_jacobian(fields[static_cast<size_t>(i)], x, h);
}

Mat DriftlessSystem::component_hessian(int i, int comp, const Vec& x) const {
    if (i < 0 || i >= m) throw std::out_of_range("field index out of range");
    if (comp < 0 || comp >= n) throw std::out_of_range("component index out of range");
    if (!hessians.empty() && !hessians[static_cast<size_t>(i)].empty() &&
        hessians[static_cast<size_t>(i)][static_cast<size_t>(comp)]) {
        return hessians[static_cast<size_t>(i)][static_cast<size_t>(comp)](x);
    }
    // Row `comp` of the Jacobian is the gradient of the component; difference it.
    const double h = 1e-5 * (1.0 + x.norm());
    Mat hess(n, n);
    for (int c = 0; c < n; ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        hess.col(c) = (jacobian(i, xp).row(comp) - jacobian(i, xm).row(comp)).transpose() / (2.0 * h);
    }
    // Symmetrize away the differencing noise.
    return 0.5 * (hess + hess.transpose());
}

void DriftlessSystem::validate() const {
    if (n <= 1) throw std::invalid_argument("state dimension must exceed 1");
    if (m <= 0 || m >= n) throw std::invalid_argument("input dimension must satisfy 0 < m < n");
    if (static_cast<int>(fields.size()) != m) throw std::invalid_argument("need exactly m field evaluators");
    if (static_cast<int>(pairs.size()) != n - m) {
        throw std::invalid_argument("bracket pair list must have exactly n - m entries");
    }
    for (const auto& [j, l] : pairs) {
        if (j < 0 || l < 0 || j >= m || l >= m) throw std::invalid_argument("bracket pair index out of range");
        if (j >= l) throw std::invalid_argument("bracket pairs must be strictly ordered (j < l)");
    }
    if (domain_radius <= 0.0) throw std::invalid_argument("domain radius must be positive");
}

Vec lie_bracket(const DriftlessSystem& sys, int j, int l, const Vec& x) {
    if (j < 0 || j >= sys.m || l < 0 || l >= sys.m) {
        throw std::out_of_range("lie_bracket: field index out of range");
    }
    return sys.jacobian(l, x) * sys.field(j, x) - sys.jacobian(j, x) * sys.field(l, x);
}

Mat bracket_matrix(const DriftlessSystem& sys, const Vec& x) {
    sys.validate();
    Mat A(sys.n, sys.n);
    for (int i = 0; i < sys.m; ++i) A.col(i) = sys.field(i, x);
    for (size_t p = 0; p < sys.pairs.size(); ++p) {
        A.col(sys.m + static_cast<int>(p)) = lie_bracket(sys, sys.pairs[p].first, sys.pairs[p].second, x);
    }
    return A;
}

RankReport check_rank(const DriftlessSystem& sys, const Vec& x, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("check_rank: tolerance must be positive");
    Eigen::JacobiSVD<Mat> svd(bracket_matrix(sys, x));
    RankReport rep;
    rep.sigma_max = svd.singularValues()(0);
    rep.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    rep.ok = rep.sigma_min > tol * rep.sigma_max;
    rep.cond = rep.ok ? rep.sigma_max / rep.sigma_min : std::numeric_limits<double>::infinity();
    return rep;
}

Mat finite_diff_jacobian(const VectorFieldFn& f, const Vec& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff_jacobian: step must be positive");
    const Vec f0 = f(x);
    Mat jac(f0.size(), x.size());
    for (int c = 0; c < x.size(); ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const Vec fp = f(xp);
        const Vec fm = f(xm);
        if (!fp.allFinite() || !fm.allFinite()) {
            throw std::runtime_error("finite_diff_jacobian: field evaluation failed at perturbed point");
        }
        jac.col(c) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

namespace {

Mat zero_matrix_fn(int n) { return Mat::Zero(n, n); }

std::vector<std::vector<MatrixFieldFn>> zero_hessians(int m, int n) {
    std::vector<std::vector<MatrixFieldFn>> h(static_cast<size_t>(m));
    for (auto& per_field : h) {
        per_field.assign(static_cast<size_t>(n), [n](const Vec&) { return zero_matrix_fn(n); });
    }
    return h;
}

}  // namespace

DriftlessSystem unicycle_system() {
    DriftlessSystem sys;
    sys.n = 3;
    sys.m = 2;
    sys.name = "unicycle";
    sys.domain_radius = 1.0;
    sys.pairs = {{0, 1}};
    sys.fields = {
        [](const Vec& x) { return Vec{{std::cos(x[2]), std::sin(x[2]), 0.0}}; },
        [](const Vec&) { return Vec{{0.0, 0.0, 1.0}}; },
    };
    sys.jacobians = {
        [](const Vec& x) {
            Mat j = Mat::Zero(3, 3);
            j(0, 2) = -std::sin(x[2]);
            j(1, 2) = std::cos(x[2]);
            return j;
        },
        [](const Vec&) { return Mat::Zero(3, 3); },
    };
    sys.hessians = zero_hessians(2, 3);
    sys.hessians[0][0] = [](const Vec& x) {
        Mat h = Mat::Zero(3, 3);
        h(2, 2) = -std::cos(x[2]);
        return h;
    };
    sys.hessians[0][1] = [](const Vec& x) {
        Mat h = Mat::Zero(3, 3);
        h(2, 2) = -std::sin(x[2]);
        return h;
    };
    sys.validate();
    return sys;
}

DriftlessSystem perturbed_brockett_system() {
    // Brockett fields with a small smooth cubic term in the third components,
    // which makes the second-order expansion remainder genuinely nonzero.
    constexpr double delta = 0.1;
    DriftlessSystem sys;
    sys.n = 3;
    sys.m = 2;
    sys.name = "perturbed-brockett";
    sys.domain_radius = 1.0;
    sys.pairs = {{0, 1}};
    sys.fields = {
        [](const Vec& x) { return Vec{{1.0, 0.0, x[1] + delta * x[0] * x[0] * x[0]}}; },
        [](const Vec& x) { return Vec{{0.0, 1.0, -x[0] + delta * x[1] * x[1] * x[1]}}; },
    };
    sys.jacobians = {
        [](const Vec& x) {
            Mat j = Mat::Zero(3, 3);
            j(2, 0) = 3.0 * delta * x[0] * x[0];
            j(2, 1) = 1.0;
            return j;
        },
        [](const Vec& x) {
            Mat j = Mat::Zero(3, 3);
            j(2, 0) = -1.0;
            j(2, 1) = 3.0 * delta * x[1] * x[1];
            return j;
        },
    };
    sys.hessians = zero_hessians(2, 3);
    sys.hessians[0][2] = [](const Vec& x) {
        Mat h = Mat::Zero(3, 3);
        h(0, 0) = 6.0 * delta * x[0];
        return h;
    };
    sys.hessians[1][2] = [](const Vec& x) {
        Mat h = Mat::Zero(3, 3);
        h(1, 1) = 6.0 * delta * x[1];
        return h;
    };
    sys.validate();
    return sys;
}

DriftlessSystem brockett5_system() {
    // Five-state, three-input analogue of the Brockett integrator; exercises
    // frequency assignment with more than one bracket pair.
    DriftlessSystem sys;
    sys.n = 5;
    sys.m = 3;
    sys.name = "brockett5";
    sys.domain_radius = 1.5;
    sys.pairs = {{0, 1}, {0, 2}};
    sys.fields = {
        [](const Vec& x) { return Vec{{1.0, 0.0, 0.0, x[1], x[2]}}; },
        [](const Vec& x) { return Vec{{0.0, 1.0, 0.0, -x[0], 0.0}}; },
        [](const Vec& x) { return Vec{{0.0, 0.0, 1.0, 0.0, -x[0]}}; },
    };
    sys.jacobians = {
        [](const Vec&) {
            Mat j = Mat::Zero(5, 5);
            j(3, 1) = 1.0;
            j(4, 2) = 1.0;
            return j;
        },
        [](const Vec&) {
            Mat j = Mat::Zero(5, 5);
            j(3, 0) = -1.0;
            return j;
        },
        [](const Vec&) {
            Mat j = Mat::Zero(5, 5);
            j(4, 0) = -1.0;
            return j;
        },
    };
    sys.hessians = zero_hessians(3, 5);
    sys.validate();
    return sys;
}

const std::vector<std::string>& registered_systems() {
    static const std::vector<std::string> names = {"brockett", "unicycle", "perturbed-brockett", "brockett5"};
    return names;
}

DriftlessSystem make_system(const std::string& name) {
    if (name == "brockett") return brockett_system();
    if (name == "unicycle") return unicycle_system();
    if (name == "perturbed-brockett") return perturbed_brockett_system();
    if (name == "brockett5") return brockett5_system();
    throw std::invalid_argument("unknown system '" + name + "'");
}

}  // namespace nonholo
