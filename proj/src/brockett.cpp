#include "nonholo/brockett.hpp"

#include <cmath>
#include <stdexcept>

namespace nonholo {

DriftlessSystem brockett_system() {
    DriftlessSystem sys;
    sys.n = 3;
    sys.m = 2;
    sys.name = "brockett";
    sys.domain_radius = 2.5;
    sys.pairs = {{0, 1}};
    sys.fields = {
        [](const Vec& x) { return Vec{{1.0, 0.0, x[1]}}; },
        [](const Vec& x) { return Vec{{0.0, 1.0, -x[0]}}; },
    };
    sys.jacobians = {
        [](const Vec&) {
            Mat j = Mat::Zero(3, 3);
            j(2, 1) = 1.0;
            return j;
        },
        [](const Vec&) {
            Mat j = Mat::Zero(3, 3);
            j(2, 0) = -1.0;
            return j;
        },
    };
    // Affine fields: every component Hessian vanishes.
    sys.hessians.assign(2, std::vector<MatrixFieldFn>(3, [](const Vec&) { return Mat::Zero(3, 3); }));
    sys.validate();
    return sys;
}

ControlParams to_control_params(const BrockettParams& p) {
    ControlParams params;
    params.v = Vec{{p.v1, p.v2}};
    params.a = Vec{{p.a12}};
    params.k = {p.k12};
    params.pairs = {{0, 1}};
    params.eps = p.eps;
    return params;
}

Vec exact_step(const Vec& x0, const BrockettParams& p) {
    Vec x1(3);
    x1[0] = x0[0] + p.eps * p.v1;
    x1[1] = x0[1] + p.eps * p.v2;
    x1[2] = x0[2] + p.eps * (p.v1 * x0[1] - p.v2 * x0[0]) -
            p.eps * p.eps / (kTwoPi * p.k12) * p.a12 * (p.a12 - 2.0 * p.v1);
    return x1;
}

double steer_discriminant(const Vec& x0, const Vec& x1, int k12) {
    const double d1 = x1[0] - x0[0];
    return d1 * d1 + kTwoPi * k12 * (x0[2] - x1[2] + x1[0] * x0[1] - x0[0] * x1[1]);
}

BrockettParams steer(const Vec& x0, const Vec& x1, double eps, int k12, Branch branch) {
    if (eps <= 0.0) throw std::invalid_argument("steer: eps must be positive");
    if (k12 == 0) throw std::invalid_argument("steer: k12 must be a nonzero integer");
    const double disc = steer_discriminant(x0, x1, k12);
    if (disc < 0.0) {
        throw std::domain_error("steer: requested k12 sign is infeasible for this pair (flip the sign of k12)");
    }
    BrockettParams p;
    p.eps = eps;
    p.k12 = k12;
    p.v1 = (x1[0] - x0[0]) / eps;
    p.v2 = (x1[1] - x0[1]) / eps;
    const double root = std::sqrt(disc) / eps;
    p.a12 = p.v1 + (branch == Branch::Plus ? root : -root);
    return p;
}

BrockettParams brockett_feedback_params(const Vec& x, double eps, Branch branch) {
    if (eps <= 0.0) throw std::invalid_argument("brockett_feedback_params: eps must be positive");
    BrockettParams p;
    p.eps = eps;
    p.v1 = -x[0];
    p.v2 = -x[1];
    if (x[2] == 0.0) {
        p.k12 = 1;  // amplitude is zero, any nonzero frequency works
        p.a12 = 0.0;
        return p;
    }
    p.k12 = x[2] > 0.0 ? 1 : -1;
    const double root = std::sqrt(x[0] * x[0] + kTwoPi * std::abs(x[2]) / eps);
    p.a12 = -x[0] + (branch == Branch::Plus ? root : -root);
    return p;
}

StateFeedback make_brockett_feedback(double eps, Branch branch) {
    return [eps, branch](const Vec& x) { return to_control_params(brockett_feedback_params(x, eps, branch)); };
}

}  // namespace nonholo
