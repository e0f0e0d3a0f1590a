#include "nonholo/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nonholo/sampling.hpp"

namespace nonholo {

LyapunovSpec quadratic_lyapunov(const Vec& weights) {
    if (weights.size() == 0) throw std::invalid_argument("quadratic_lyapunov: empty weight vector");
    if ((weights.array() <= 0.0).any()) {
        throw std::invalid_argument("quadratic_lyapunov: weights must be positive");
    }
    const Vec w = weights;
    const double wmin = w.minCoeff();
    const double wmax = w.maxCoeff();

    LyapunovSpec spec;
    spec.value = [w](const Vec& x) { return 0.5 * (w.array() * x.array().square()).sum(); };
    spec.gradient = [w](const Vec& x) { return (w.array() * x.array()).matrix().eval(); };
    spec.hessian = [w](const Vec&) { return Mat(w.asDiagonal()); };

    LyapunovConstants c;
    c.beta1 = 0.5 * wmin;
    c.beta2 = 0.5 * wmax;
    c.mu = wmax;
    c.alpha1 = 2.0 * wmin * wmin / wmax;
    c.alpha2 = 2.0 * wmax;
    c.radius = std::numeric_limits<double>::infinity();
    spec.consts = c;
    return spec;
}

namespace {

struct RatioSample {
    double v_over_x2;
    double g2_over_v;
    double hess_norm;
};

RatioSample sample_ratios(const LyapunovSpec& spec, const Vec& x) {
    const double v = spec.value(x);
    const double x2 = x.squaredNorm();
    if (v <= 0.0) {
        throw std::runtime_error("estimate_constants: V is not positive at a nonzero grid point");
    }
    RatioSample s;
    s.v_over_x2 = v / x2;
    s.g2_over_v = spec.gradient(x).squaredNorm() / v;
    Eigen::JacobiSVD<Mat> svd(spec.hessian(x));
    s.hess_norm = svd.singularValues()(0);
    return s;
}

LyapunovConstants reduce_samples(const std::vector<RatioSample>& samples, double radius) {
    LyapunovConstants c;
    c.beta1 = std::numeric_limits<double>::infinity();
    c.beta2 = 0.0;
    c.alpha1 = std::numeric_limits<double>::infinity();
    c.alpha2 = 0.0;
    c.mu = 0.0;
    for (const auto& s : samples) {
        c.beta1 = std::min(c.beta1, s.v_over_x2);
        c.beta2 = std::max(c.beta2, s.v_over_x2);
        c.alpha1 = std::min(c.alpha1, s.g2_over_v);
        c.alpha2 = std::max(c.alpha2, s.g2_over_v);
        c.mu = std::max(c.mu, s.hess_norm);
    }
    // 10% safety margin on each bound.
    c.beta1 *= 0.9;
    c.alpha1 *= 0.9;
    c.beta2 *= 1.1;
    c.alpha2 *= 1.1;
    c.mu *= 1.1;
    c.radius = radius;
    return c;
}

std::vector<Vec> constant_grid(int dim, double radius, int points) {
    if (points <= 0) throw std::invalid_argument("estimate_constants: empty grid");
    if (radius <= 0.0) throw std::invalid_argument("estimate_constants: radius must be positive");
    std::vector<Vec> grid = halton_ball(dim, radius, points);
    for (auto& p : axis_points(dim, radius)) grid.push_back(std::move(p));
    return grid;
}

}  // namespace

LyapunovConstants estimate_constants(const LyapunovSpec& spec, int dim, double radius, int points) {
    const std::vector<Vec> grid = constant_grid(dim, radius, points);
    std::vector<RatioSample> samples(grid.size());
    bool failed = false;  // exceptions must not unwind out of the parallel region
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(grid.size()); ++i) {
        try {
            samples[static_cast<size_t>(i)] = sample_ratios(spec, grid[static_cast<size_t>(i)]);
        } catch (...) {
#pragma omp atomic write
            failed = true;
        }
    }
    if (failed) throw std::runtime_error("estimate_constants: V is not positive at a nonzero grid point");
    return reduce_samples(samples, radius);
}

LyapunovConstants estimate_constants_serial(const LyapunovSpec& spec, int dim, double radius, int points) {
    const std::vector<Vec> grid = constant_grid(dim, radius, points);
    std::vector<RatioSample> samples(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) samples[i] = sample_ratios(spec, grid[i]);
    return reduce_samples(samples, radius);
}

double decay_rhs(const LyapunovConstants& consts, double eps, double r_norm, double x0_norm) {
    if (x0_norm <= 0.0) throw std::invalid_argument("decay_rhs: ||x(0)|| must be positive");
    if (eps <= 0.0) throw std::invalid_argument("decay_rhs: eps must be positive");
    const double multiplier = 1.0 - consts.alpha1 * eps + 0.5 * consts.alpha2 * eps * eps * consts.mu +
                              0.5 * consts.mu * r_norm * r_norm / (consts.beta1 * x0_norm * x0_norm) +
                              std::sqrt(consts.alpha2) * (1.0 + eps * consts.mu) * r_norm /
                                  (std::sqrt(consts.beta1) * x0_norm);
    return std::max(multiplier, 0.0);
}

}  // namespace nonholo
