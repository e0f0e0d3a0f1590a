#include "nonholo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nonholo/controller.hpp"
#include "nonholo/sampling.hpp"

namespace nonholo {

namespace {

// Cumulative integrals on a Simpson grid: nodes[0..2N], spacing h. C[j] holds
// int_0^{t_j}. Panel ends use the composite Simpson rule; panel midpoints the
// one-sided three-point rule, which keeps the table O(h^4)-accurate overall.
std::vector<double> cumulative_table(const std::vector<double>& f, double h) {
    const size_t nodes = f.size();
    std::vector<double> c(nodes, 0.0);
    for (size_t j = 0; j + 2 < nodes; j += 2) {
        c[j + 1] = c[j] + h / 12.0 * (5.0 * f[j] + 8.0 * f[j + 1] - f[j + 2]);
        c[j + 2] = c[j] + h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
    }
    return c;
}

double simpson(const std::vector<double>& f, double h) {
    double sum = 0.0;
    for (size_t j = 0; j + 2 < f.size(); j += 2) {
        sum += h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
    }
    return sum;
}

}  // namespace

Vec volterra_second_order(const DriftlessSystem& sys, const Vec& x0, const ControlSignal& u, double tau,
                          int panels) {
    if (tau <= 0.0) throw std::invalid_argument("volterra_second_order: tau must be positive");
    if (panels < 2) throw std::invalid_argument("volterra_second_order: need at least two quadrature panels");
    const int m = sys.m;
    const size_t nodes = 2 * static_cast<size_t>(panels) + 1;
    const double h = tau / static_cast<double>(nodes - 1);

    std::vector<std::vector<double>> samples(static_cast<size_t>(m), std::vector<double>(nodes));
    for (size_t j = 0; j < nodes; ++j) {
        const Vec uj = u(static_cast<double>(j) * h);
        for (int i = 0; i < m; ++i) samples[static_cast<size_t>(i)][j] = uj[i];
    }
    std::vector<std::vector<double>> cumul(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) cumul[static_cast<size_t>(i)] = cumulative_table(samples[static_cast<size_t>(i)], h);

    Vec result = x0;
    std::vector<Vec> fvals(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        fvals[static_cast<size_t>(i)] = sys.field(i, x0);
        result += fvals[static_cast<size_t>(i)] * cumul[static_cast<size_t>(i)].back();
    }
    for (int j = 0; j < m; ++j) {
        const Mat Jj = sys.jacobian(j, x0);
        for (int i = 0; i < m; ++i) {
            result += 0.5 * cumul[static_cast<size_t>(i)].back() * cumul[static_cast<size_t>(j)].back() *
                      (Jj * fvals[static_cast<size_t>(i)]);
        }
    }
    std::vector<double> integrand(nodes);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            for (size_t s = 0; s < nodes; ++s) {
                integrand[s] = samples[static_cast<size_t>(j)][s] * cumul[static_cast<size_t>(i)][s] -
                               samples[static_cast<size_t>(i)][s] * cumul[static_cast<size_t>(j)][s];
            }
            const double dij = simpson(integrand, h);
            result += 0.5 * dij * lie_bracket(sys, i, j, x0);
        }
    }
    return result;
}

Vec volterra_eps_closed(const DriftlessSystem& sys, const Vec& x0, const ControlParams& params) {
    if (!nonresonant(params.k)) {
        throw std::invalid_argument("volterra_eps_closed: resonant frequencies (the closed form needs distinct |k|)");
    }
    const int m = sys.m;
    const double eps = params.eps;
    Vec result = x0;
    std::vector<Vec> fvals(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        fvals[static_cast<size_t>(i)] = sys.field(i, x0);
        result += eps * params.v[i] * fvals[static_cast<size_t>(i)];
    }
    for (int j = 0; j < m; ++j) {
        const Mat Jj = sys.jacobian(j, x0);
        for (int i = 0; i < m; ++i) {
            result += 0.5 * eps * eps * params.v[i] * params.v[j] * (Jj * fvals[static_cast<size_t>(i)]);
        }
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            double inner = 0.0;
            for (size_t p = 0; p < params.pairs.size(); ++p) {
                const int qf = params.pairs[p].first;
                const int ql = params.pairs[p].second;
                const double c = params.a[p] / params.k[p];
                if (ql == j) inner += c * ((qf == i ? params.a[p] : 0.0) - 2.0 * params.v[i]);
                if (ql == i) inner -= c * ((qf == j ? params.a[p] : 0.0) - 2.0 * params.v[j]);
            }
            if (inner != 0.0) {
                result += eps * eps / (4.0 * kPi) * inner * lie_bracket(sys, i, j, x0);
            }
        }
    }
    return result;
}

namespace {

// e^z - ((z+1)^2 + 1)/2 = sum_{j>=3} z^j / j!
double brace_first(double z) {
    if (z < 0.5) {
        double term = z * z * z / 6.0;
        double sum = term;
        for (int j = 4; j < 40 && term > 1e-18 * sum; ++j) {
            term *= z / j;
            sum += term;
        }
        return sum;
    }
    return std::exp(z) - 0.5 * ((z + 1.0) * (z + 1.0) + 1.0);
}

// (e^z - 2)^2 + 2z - 1 = sum_{j>=3} (2^j - 4) z^j / j!
double brace_second(double z) {
    if (z < 0.5) {
        double pow2 = 8.0;  // 2^j
        double fact = 6.0;  // j!
        double zj = z * z * z;
        double sum = (pow2 - 4.0) / fact * zj;
        for (int j = 4; j < 60; ++j) {
            pow2 *= 2.0;
            fact *= j;
            zj *= z;
            const double term = (pow2 - 4.0) / fact * zj;
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    }
    const double e = std::exp(z);
    return (e - 2.0) * (e - 2.0) + 2.0 * z - 1.0;
}

}  // namespace

double remainder_bound(const RegularityBounds& b, double tau) {
    if (tau < 0.0) throw std::invalid_argument("remainder_bound: tau must be nonnegative");
    const double z = b.L * b.U * tau;
    if (z < 1e-8) {
        // Removable singularity at L -> 0: cubic leading term.
        const double u3t3 = b.U * b.U * b.U * tau * tau * tau;
        return b.M * (b.L * b.L + b.H * b.M * std::sqrt(static_cast<double>(b.n))) / 6.0 * u3t3;
    }
    return b.M / b.L * brace_first(z) +
           b.H * b.M * b.M * std::sqrt(static_cast<double>(b.n)) / (4.0 * b.L * b.L * b.L) * brace_second(z);
}

double apriori_bound(double M, double L, double U, double t) {
    if (t < 0.0) throw std::invalid_argument("apriori_bound: t must be nonnegative");
    const double z = L * U * t;
    if (z < 1e-8 || L == 0.0) return M * U * t;  // first-order limit as L -> 0
    return M / L * std::expm1(z);
}

DecayReport decay_check(const Trajectory& traj, const LyapunovSpec& lyap) {
    if (traj.sample_states.size() < 2) {
        throw std::invalid_argument("decay_check: need at least two sampled states");
    }
    DecayReport rep;
    constexpr double state_floor = 1e-12;
    constexpr double value_floor = 1e-24;

    double max_ratio = -std::numeric_limits<double>::infinity();
    for (size_t j = 0; j + 1 < traj.sample_states.size(); ++j) {
        const double v0 = lyap.value(traj.sample_states[j]);
        const double v1 = lyap.value(traj.sample_states[j + 1]);
        if (v0 <= value_floor) continue;  // the run has effectively landed
        rep.per_interval_ratios.push_back(v1 / v0);
        max_ratio = std::max(max_ratio, v1 / v0);
    }
    rep.sigma = rep.per_interval_ratios.empty() ? 1.0 : 1.0 - max_ratio;

    // Least-squares slope of log ||x(t_j)|| against t_j.
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    long count = 0;
    for (size_t j = 0; j < traj.sample_states.size(); ++j) {
        const double norm = traj.sample_states[j].norm();
        if (norm < state_floor) continue;
        const double t = traj.eps * static_cast<double>(j);
        const double y = std::log(norm);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++count;
    }
    const double denom = count * stt - st * st;
    if (count < 2 || denom <= 0.0) {
        rep.lambda = std::numeric_limits<double>::infinity();  // deadbeat
    } else {
        rep.lambda = -(count * sty - st * sy) / denom;
    }
    rep.decaying = rep.sigma > 0.0;
    return rep;
}

RegularityBounds measure_regularity(const DriftlessSystem& sys, const Vec& x0, const ControlParams& params,
                                    double tau) {
    RegularityBounds b;
    b.n = sys.n;
    for (int i = 0; i < sys.m; ++i) {
        const Vec f = sys.field(i, x0);
        if (!f.allFinite()) throw std::runtime_error("measure_regularity: non-finite field value");
        b.M = std::max(b.M, f.norm());
    }

    b.u_analytic_bound = params.v.cwiseAbs().sum() + 2.0 * params.a.cwiseAbs().sum();
    const int samples = 4096 * std::max(1, params.max_abs_k());
    for (int s = 0; s <= samples; ++s) {
        const double t = tau * static_cast<double>(s) / samples;
        b.U = std::max(b.U, u_eval(params, t).cwiseAbs().sum());
    }
    // Between dense samples the signal can only peak O((w dt)^2) higher.
    b.U = std::min(b.U * (1.0 + 1e-6), b.u_analytic_bound);

    const auto sup_jacobian = [&](double radius) {
        double sup = 0.0;
        auto grid = halton_ball(sys.n, std::max(radius, 1e-12), 128);
        for (auto& p : axis_points(sys.n, std::max(radius, 1e-12))) grid.push_back(std::move(p));
        grid.push_back(Vec::Zero(sys.n));
        for (const auto& p : grid) {
            for (int i = 0; i < sys.m; ++i) {
                Eigen::JacobiSVD<Mat> svd(sys.jacobian(i, x0 + p));
                sup = std::max(sup, svd.singularValues()(0));
            }
        }
        return sup;
    };

    // Grow the ball until it contains everything the growth bound allows.
    double radius = 1e-3;
    for (int iter = 0; iter < 60; ++iter) {
        b.L = sup_jacobian(radius);
        const double reach = apriori_bound(b.M, b.L, b.U, tau);
        if (!std::isfinite(reach)) throw std::runtime_error("measure_regularity: reachable ball is unbounded");
        if (reach <= radius) break;
        radius = std::max(1.05 * reach, 2.0 * radius);
    }
    b.ball_radius = radius;

    auto grid = halton_ball(sys.n, radius, 128);
    for (auto& p : axis_points(sys.n, radius)) grid.push_back(std::move(p));
    grid.push_back(Vec::Zero(sys.n));
    for (const auto& p : grid) {
        for (int i = 0; i < sys.m; ++i) {
            for (int c = 0; c < sys.n; ++c) {
                Eigen::JacobiSVD<Mat> svd(sys.component_hessian(i, c, x0 + p));
                b.H = std::max(b.H, svd.singularValues()(0));
            }
        }
    }
    return b;
}

}  // namespace nonholo
