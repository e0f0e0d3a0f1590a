#include "nonholo/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace nonholo {

int ControlParams::max_abs_k() const {
    int mk = 0;
    for (int ki : k) mk = std::max(mk, std::abs(ki));
    return mk;
}

bool nonresonant(const std::vector<int>& k) {
    for (size_t i = 0; i < k.size(); ++i) {
        if (k[i] == 0) return false;
        for (size_t j = i + 1; j < k.size(); ++j) {
            if (std::abs(k[i]) == std::abs(k[j])) return false;
        }
    }
    return true;
}

namespace {

Eigen::PartialPivLU<Mat> frame_lu(const DriftlessSystem& sys, const Vec& x) {
    Mat A = bracket_matrix(sys, x);
    Eigen::PartialPivLU<Mat> lu(A);
    // PartialPivLU has no rank query; reject via the reciprocal condition estimate.
    if (lu.rcond() < 1e-14) {
        throw std::runtime_error("rank condition failed: frame matrix is numerically singular at this state");
    }
    return lu;
}

}  // namespace

Vec phi(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x) {
    return -frame_lu(sys, x).solve(lyap.gradient(x));
}

std::vector<int> assign_frequencies(const PairList& pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("assign_frequencies: empty pair set (fully actuated system)");
    }
    std::vector<int> kbar(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p) kbar[p] = static_cast<int>(p) + 1;
    return kbar;
}

Vec residual(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x, const ControlParams& params) {
    const int m = sys.m;
    Vec r = Vec::Zero(sys.n);
    for (int i = 0; i < m; ++i) r += params.v[i] * sys.field(i, x);
    for (size_t p = 0; p < params.pairs.size(); ++p) {
        const double coeff = params.eps / (4.0 * kPi) * params.a[p] * params.a[p] / params.k[p];
        r += coeff * lie_bracket(sys, params.pairs[p].first, params.pairs[p].second, x);
    }
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            r += 0.5 * params.eps * params.v[i] * params.v[j] * (sys.jacobian(j, x) * sys.field(i, x));
        }
    }
    // s[i] = sum over pairs (q, i) of a/k; each ratio is nonnegative by the
    // sign convention tying sign(k) to sign(a).
    Vec s = Vec::Zero(m);
    for (size_t p = 0; p < params.pairs.size(); ++p) {
        s[params.pairs[p].second] += params.a[p] / params.k[p];
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double coeff = params.eps / (2.0 * kPi) * (params.v[j] * s[i] - params.v[i] * s[j]);
            if (coeff != 0.0) r += coeff * lie_bracket(sys, i, j, x);
        }
    }
    r += lyap.gradient(x);
    return r;
}

ControlParams params_from_xi(const Vec& xi, double eps, const PairList& pairs, const std::vector<int>& kbar) {
    const int nb = static_cast<int>(pairs.size());
    const int m = static_cast<int>(xi.size()) - nb;
    ControlParams params;
    params.v = xi.head(m);
    params.a = Vec::Zero(nb);
    params.k.resize(static_cast<size_t>(nb));
    params.pairs = pairs;
    params.eps = eps;
    for (int p = 0; p < nb; ++p) {
        const double atilde = xi[m + p] / eps;
        params.a[p] = 2.0 * std::sqrt(kPi * kbar[static_cast<size_t>(p)] * std::abs(atilde)) *
                      (atilde >= 0.0 ? 1.0 : -1.0);
        if (atilde == 0.0) params.a[p] = 0.0;
        // Zero amplitude keeps the positive base frequency.
        params.k[static_cast<size_t>(p)] = atilde >= 0.0 ? kbar[static_cast<size_t>(p)] : -kbar[static_cast<size_t>(p)];
    }
    return params;
}

Vec xi_from_params(const ControlParams& params) {
    const int m = static_cast<int>(params.v.size());
    const int nb = static_cast<int>(params.pairs.size());
    Vec xi(m + nb);
    xi.head(m) = params.v;
    for (int p = 0; p < nb; ++p) {
        const double atilde = params.a[p] * params.a[p] / (4.0 * kPi * params.k[static_cast<size_t>(p)]);
        xi[m + p] = params.eps * atilde;
    }
    return xi;
}

SynthesisReport solve_params(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x, double eps,
                             const SolveOptions& opts) {
    if (eps <= 0.0) throw std::invalid_argument("solve_params: eps must be positive");
    sys.validate();
    const int m = sys.m;
    const int nb = static_cast<int>(sys.pairs.size());
    const std::vector<int> kbar = assign_frequencies(sys.pairs);

    const auto lu = frame_lu(sys, x);
    const Vec phi_x = -lu.solve(lyap.gradient(x));

    SynthesisReport rep;
    if (phi_x.norm() < 1e-14) {
        // At (numerical) equilibrium: zero control, exact solution. Avoids
        // amplifying rounding through the square-root recovery.
        rep.params = params_from_xi(Vec::Zero(m + nb), eps, sys.pairs, kbar);
        rep.residual_norm = residual(sys, lyap, x, rep.params).norm();
        rep.converged = true;
        return rep;
    }

    // Frame-coordinate versions of the quadratic coupling terms, evaluated
    // once per state: B[i][j] = A^{-1} (df_j/dx) f_i, C[i][j] = A^{-1} [f_i, f_j].
    std::vector<Vec> fvals(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) fvals[static_cast<size_t>(i)] = sys.field(i, x);
    std::vector<std::vector<Vec>> B(static_cast<size_t>(m), std::vector<Vec>(static_cast<size_t>(m)));
    std::vector<std::vector<Vec>> C(static_cast<size_t>(m), std::vector<Vec>(static_cast<size_t>(m)));
    for (int j = 0; j < m; ++j) {
        const Mat Jj = sys.jacobian(j, x);
        for (int i = 0; i < m; ++i) B[static_cast<size_t>(i)][static_cast<size_t>(j)] = lu.solve(Jj * fvals[static_cast<size_t>(i)]);
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            C[static_cast<size_t>(i)][static_cast<size_t>(j)] = lu.solve(lie_bracket(sys, i, j, x));
        }
    }

    const auto G = [&](const Vec& xi) -> Vec {
        Vec g = Vec::Zero(m + nb);
        const auto v = xi.head(m);
        // w[i] = sum over pairs (q, i) of sqrt(|atilde| / kbar)
        Vec w = Vec::Zero(m);
        for (int p = 0; p < nb; ++p) {
            const double atilde = xi[m + p] / eps;
            w[sys.pairs[static_cast<size_t>(p)].second] +=
                std::sqrt(std::abs(atilde) / kbar[static_cast<size_t>(p)]);
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double c = 0.5 * eps * v[i] * v[j];
                if (c != 0.0) g += c * B[static_cast<size_t>(i)][static_cast<size_t>(j)];
            }
        }
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const double c = eps / std::sqrt(kPi) * (v[j] * w[i] - v[i] * w[j]);
                if (c != 0.0) g += c * C[static_cast<size_t>(i)][static_cast<size_t>(j)];
            }
        }
        return g;
    };

    const auto residual_norm_at = [&](const Vec& xi) {
        return residual(sys, lyap, x, params_from_xi(xi, eps, sys.pairs, kbar)).norm();
    };

    Vec xi = phi_x;
    double res = residual_norm_at(xi);
    double gamma = opts.gamma0;
    int it = 0;
    while (it < opts.max_iter && res > opts.tol) {
        ++it;
        const Vec candidate = (1.0 - gamma) * xi + gamma * (phi_x - G(xi));
        const double cand_res = candidate.allFinite() ? residual_norm_at(candidate)
                                                      : std::numeric_limits<double>::infinity();
        if (cand_res < res) {
            xi = candidate;
            res = cand_res;
            gamma = std::min(2.0 * gamma, 1.0);
        } else if (gamma > opts.gamma_min) {
            gamma *= 0.5;
        } else {
            // The square-root kink can put a residual barrier between the
            // iterate and a solution whose amplitude coordinate is tiny with
            // the opposite sign; no damped step descends then. One full map
            // step hops across, after which descent resumes.
            const Vec hop = phi_x - G(xi);
            if (!hop.allFinite()) break;
            xi = hop;
            res = residual_norm_at(xi);
            gamma = opts.gamma0;
        }
    }

    rep.params = params_from_xi(xi, eps, sys.pairs, kbar);
    rep.residual_norm = res;
    rep.iterations = it;
    rep.xi_norm = xi.norm();
    rep.converged = res <= opts.tol;
    return rep;
}

}  // namespace nonholo
