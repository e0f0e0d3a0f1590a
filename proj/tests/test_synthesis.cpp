#include <doctest.h>

#include <cmath>
#include <random>

#include "nonholo/brockett.hpp"
#include "nonholo/synthesis.hpp"

using namespace nonholo;

namespace {

double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Independent evaluation of the parameter-equation residual: same terms as
// residual(), accumulated in the opposite order with reversed loops.
Vec residual_reversed(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x,
                      const ControlParams& p) {
    Vec r = lyap.gradient(x);
    for (int i = sys.m - 1; i >= 0; --i) {
        for (int j = sys.m - 1; j > i; --j) {
            double si = 0.0, sj = 0.0;
            for (size_t q = 0; q < p.pairs.size(); ++q) {
                if (p.pairs[q].second == i) si += p.a[static_cast<int>(q)] / p.k[q];
                if (p.pairs[q].second == j) sj += p.a[static_cast<int>(q)] / p.k[q];
            }
            r += p.eps / (2.0 * kPi) * (p.v[j] * si - p.v[i] * sj) * lie_bracket(sys, i, j, x);
        }
    }
    for (int j = sys.m - 1; j >= 0; --j) {
        for (int i = sys.m - 1; i >= 0; --i) {
            r += 0.5 * p.eps * p.v[i] * p.v[j] * (sys.jacobian(j, x) * sys.field(i, x));
        }
    }
    for (int q = static_cast<int>(p.pairs.size()) - 1; q >= 0; --q) {
        r += p.eps / (4.0 * kPi) * p.a[q] * p.a[q] / p.k[static_cast<size_t>(q)] *
             lie_bracket(sys, p.pairs[static_cast<size_t>(q)].first, p.pairs[static_cast<size_t>(q)].second, x);
    }
    for (int i = sys.m - 1; i >= 0; --i) r += p.v[i] * sys.field(i, x);
    return r;
}

ControlParams random_params(std::mt19937_64& gen, const DriftlessSystem& sys, double eps) {
    ControlParams p;
    p.eps = eps;
    p.pairs = sys.pairs;
    p.v = Vec(sys.m);
    for (int i = 0; i < sys.m; ++i) p.v[i] = uniform(gen, -1.0, 1.0);
    p.a = Vec(static_cast<int>(sys.pairs.size()));
    for (int q = 0; q < p.a.size(); ++q) p.a[q] = uniform(gen, -1.0, 1.0);
    const auto kbar = assign_frequencies(sys.pairs);
    p.k.resize(sys.pairs.size());
    for (size_t q = 0; q < sys.pairs.size(); ++q) p.k[q] = (gen() & 1) ? kbar[q] : -kbar[q];
    return p;
}

}  // namespace

TEST_CASE("phi solves the frame system against the gradient") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));

    CHECK(phi(sys, lyap, Vec::Zero(3)).norm() == doctest::Approx(0.0).scale(1));

    const Vec p1 = phi(sys, lyap, Vec{{0.0, 0.0, 1.0}});
    CHECK(p1.isApprox(Vec{{0.0, 0.0, 0.5}}, 1e-14));

    const Vec p2 = phi(sys, lyap, Vec{{1.0, 0.0, 0.0}});
    CHECK(p2.isApprox(Vec{{-1.0, 0.0, 0.0}}, 1e-14));
}

TEST_CASE("frequency assignment") {
    CHECK(assign_frequencies({{0, 1}}) == std::vector<int>{1});
    CHECK(assign_frequencies({{0, 1}, {0, 2}, {1, 2}}) == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(assign_frequencies({}), std::invalid_argument);
}

TEST_CASE("nonresonance predicate") {
    CHECK(nonresonant({1}));
    CHECK(nonresonant({1, -2, 3}));
    CHECK_FALSE(nonresonant({1, -1}));
    CHECK_FALSE(nonresonant({0, 2}));
}

TEST_CASE("residual at the origin with zero parameters") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    ControlParams p;
    p.eps = 1.0;
    p.pairs = sys.pairs;
    p.v = Vec::Zero(2);
    p.a = Vec::Zero(1);
    p.k = {1};
    CHECK(residual(sys, lyap, Vec::Zero(3), p).norm() == doctest::Approx(0.0).scale(1));
}

TEST_CASE("residual agrees with a reverse-order evaluation") {
    std::mt19937_64 gen(23);
    for (const char* name : {"brockett", "unicycle", "brockett5"}) {
        const DriftlessSystem sys = make_system(name);
        const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(sys.n));
        for (int t = 0; t < 20; ++t) {
            Vec x(sys.n);
            for (int i = 0; i < sys.n; ++i) x[i] = uniform(gen, -0.8, 0.8);
            const ControlParams p = random_params(gen, sys, uniform(gen, 0.1, 1.0));
            const Vec a = residual(sys, lyap, x, p);
            const Vec b = residual_reversed(sys, lyap, x, p);
            CHECK((a - b).norm() < 1e-12 * (1.0 + a.norm()));
        }
    }
}

TEST_CASE("recovery round-trip reproduces the internal unknowns exactly") {
    std::mt19937_64 gen(29);
    for (const char* name : {"brockett", "brockett5"}) {
        const DriftlessSystem sys = make_system(name);
        const auto kbar = assign_frequencies(sys.pairs);
        const int dim = sys.m + static_cast<int>(sys.pairs.size());
        for (int t = 0; t < 50; ++t) {
            Vec xi(dim);
            for (int i = 0; i < dim; ++i) xi[i] = uniform(gen, -2.0, 2.0);
            const double eps = uniform(gen, 0.05, 1.0);
            const ControlParams p = params_from_xi(xi, eps, sys.pairs, kbar);
            const Vec back = xi_from_params(p);
            CHECK((back - xi).norm() < 1e-13 * (1.0 + xi.norm()));
            CHECK(nonresonant(p.k));
        }
    }
}

TEST_CASE("solve_params at the origin returns exact zeros") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    const SynthesisReport rep = solve_params(sys, lyap, Vec::Zero(3), 0.5);
    CHECK(rep.converged);
    CHECK(rep.params.v.norm() == 0.0);
    CHECK(rep.params.a.norm() == 0.0);
    CHECK(rep.residual_norm == doctest::Approx(0.0).scale(1));
}

TEST_CASE("solve_params on the bracket axis recovers the closed-form amplitude") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    for (double x3 : {0.2, 1.0, 1.9}) {
        for (double eps : {0.1, 0.5, 1.0}) {
            const SynthesisReport rep = solve_params(sys, lyap, Vec{{0.0, 0.0, x3}}, eps);
            REQUIRE(rep.converged);
            CHECK(rep.residual_norm < 1e-9);
            CHECK(rep.params.v.norm() < 1e-12);
            // v = 0 decouples the amplitude equation; a = sqrt(2 pi x3 / eps).
            CHECK(rep.params.a[0] == doctest::Approx(std::sqrt(kTwoPi * x3 / eps)).epsilon(1e-9));
            CHECK(rep.params.k[0] == 1);
        }
    }
}

TEST_CASE("solved parameters satisfy the residual postcondition on random states") {
    std::mt19937_64 gen(31);
    for (const char* name : {"brockett", "unicycle", "brockett5"}) {
        const DriftlessSystem sys = make_system(name);
        const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(sys.n));
        for (int t = 0; t < 15; ++t) {
            Vec x(sys.n);
            for (int i = 0; i < sys.n; ++i) x[i] = uniform(gen, -0.4, 0.4) * sys.domain_radius;
            const SynthesisReport rep = solve_params(sys, lyap, x, 0.1);
            REQUIRE(rep.converged);
            CHECK(residual(sys, lyap, x, rep.params).norm() < 1e-9);
            CHECK(nonresonant(rep.params.k));
            // |k| values must be exactly the base frequencies
            for (size_t q = 0; q < rep.params.k.size(); ++q) {
                CHECK(std::abs(rep.params.k[q]) == static_cast<int>(q) + 1);
            }
        }
    }
}

TEST_CASE("amplitudes scale like sqrt(||x||) and sqrt(1/eps) along a ray") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    Vec dir{{0.5, -0.3, 0.7}};
    dir.normalize();

    std::vector<double> scale, vnorm, anorm;
    for (int s = 0; s < 7; ++s) {
        const double sc = 1e-3 * std::pow(100.0, s / 6.0);
        const auto rep = solve_params(sys, lyap, sc * dir, 0.1);
        REQUIRE(rep.converged);
        scale.push_back(sc);
        vnorm.push_back(rep.params.v.norm());
        anorm.push_back(rep.params.a.norm());
    }
    const auto slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            sx += std::log(xs[i]);
            sy += std::log(ys[i]);
            sxx += std::log(xs[i]) * std::log(xs[i]);
            sxy += std::log(xs[i]) * std::log(ys[i]);
        }
        const double n = static_cast<double>(xs.size());
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    CHECK(slope(scale, vnorm) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(slope(scale, anorm) == doctest::Approx(0.5).epsilon(0.2));

    std::vector<double> epss, aeps;
    const Vec x_fixed = 0.05 * dir;
    for (double e : {1e-1, 1e-2, 1e-3}) {
        const auto rep = solve_params(sys, lyap, x_fixed, e);
        REQUIRE(rep.converged);
        epss.push_back(e);
        aeps.push_back(rep.params.a.norm());
    }
    CHECK(slope(epss, aeps) == doctest::Approx(-0.5).epsilon(0.2));

    // (||v|| + ||a||) eps^{2/3} decreases along the same eps sequence.
    double prev = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < epss.size(); ++i) {
        const auto rep = solve_params(sys, lyap, x_fixed, epss[i]);
        const double value = (rep.params.v.norm() + rep.params.a.norm()) * std::pow(epss[i], 2.0 / 3.0);
        CHECK(value < prev);
        prev = value;
    }
}

TEST_CASE("solve_params rejects nonpositive eps") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    CHECK_THROWS_AS(solve_params(sys, lyap, Vec::Zero(3), 0.0), std::invalid_argument);
}
