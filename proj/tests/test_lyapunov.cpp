#include <doctest.h>

#include <random>
#include <stdexcept>

#include "nonholo/lyapunov.hpp"
#include "nonholo/sampling.hpp"

using namespace nonholo;

TEST_CASE("quadratic Lyapunov with unit weights") {
    const LyapunovSpec spec = quadratic_lyapunov(Vec::Ones(3));
    const Vec x{{1.0, 2.0, -1.0}};
    CHECK(spec.value(x) == doctest::Approx(3.0));
    CHECK(spec.value(Vec::Zero(3)) == 0.0);
    CHECK(spec.gradient(x).isApprox(x));
    CHECK(spec.hessian(x).isApprox(Mat::Identity(3, 3)));

    REQUIRE(spec.consts.has_value());
    CHECK(spec.consts->alpha1 == doctest::Approx(2.0));
    CHECK(spec.consts->alpha2 == doctest::Approx(2.0));
    CHECK(spec.consts->beta1 == doctest::Approx(0.5));
    CHECK(spec.consts->beta2 == doctest::Approx(0.5));
    CHECK(spec.consts->mu == doctest::Approx(1.0));
}

TEST_CASE("quadratic Lyapunov with scaled weights: ||grad V||^2 = 4 V") {
    const LyapunovSpec spec = quadratic_lyapunov(2.0 * Vec::Ones(3));
    const Vec x{{0.5, -0.25, 1.0}};
    CHECK(spec.gradient(x).squaredNorm() == doctest::Approx(4.0 * spec.value(x)));
    CHECK(spec.consts->alpha1 == doctest::Approx(4.0));
    CHECK(spec.consts->alpha2 == doctest::Approx(4.0));
}

TEST_CASE("nonpositive weights are rejected") {
    CHECK_THROWS_AS(quadratic_lyapunov(Vec{{1.0, 0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(quadratic_lyapunov(Vec{{1.0, -2.0}}), std::invalid_argument);
}

TEST_CASE("gradient matches finite differences of the value") {
    const LyapunovSpec spec = quadratic_lyapunov(Vec{{1.0, 3.0, 0.5}});
    std::mt19937_64 gen(3);
    for (int t = 0; t < 10; ++t) {
        Vec x(3);
        for (int i = 0; i < 3; ++i) x[i] = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
        const double h = 1e-6;
        Vec fd(3);
        for (int i = 0; i < 3; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            fd[i] = (spec.value(xp) - spec.value(xm)) / (2.0 * h);
        }
        CHECK((spec.gradient(x) - fd).norm() < 1e-8);
    }
}

TEST_CASE("estimated constants for the unit quadratic stay within the 10% margin") {
    LyapunovSpec spec = quadratic_lyapunov(Vec::Ones(3));
    spec.consts.reset();
    const LyapunovConstants c = estimate_constants(spec, 3, 1.0, 512);
    // The ratio families are constant for V = ||x||^2 / 2, so the estimates
    // sit exactly at the widened values.
    CHECK(std::abs(c.alpha1 - 2.0) <= 0.2 + 1e-12);
    CHECK(std::abs(c.alpha2 - 2.0) <= 0.2 + 1e-12);
    CHECK(std::abs(c.beta1 - 0.5) <= 0.05 + 1e-12);
    CHECK(std::abs(c.beta2 - 0.5) <= 0.05 + 1e-12);
    CHECK(std::abs(c.mu - 1.0) <= 0.1 + 1e-12);
}

TEST_CASE("estimated constants bracket the analytic ones for anisotropic weights") {
    LyapunovSpec spec = quadratic_lyapunov(Vec{{1.0, 4.0}});
    spec.consts.reset();
    const LyapunovConstants c = estimate_constants(spec, 2, 2.0, 1024);
    // analytic: beta1 = 1/2, beta2 = 2, mu = 4, alpha range [2, 8] over directions
    CHECK(c.beta1 <= 0.5);
    CHECK(c.beta1 >= 0.5 * 0.9 * 0.98);
    CHECK(c.beta2 >= 2.0);
    CHECK(c.beta2 <= 2.0 * 1.1 * 1.02);
    CHECK(c.mu >= 4.0);
    CHECK(c.mu <= 4.0 * 1.1 * 1.02);
    CHECK(c.alpha1 <= 2.0);
    CHECK(c.alpha2 >= 8.0);

    // the widened bounds must hold on a finer grid
    for (const Vec& x : halton_ball(2, 2.0, 2048, 777)) {
        const double v = spec.value(x);
        const double x2 = x.squaredNorm();
        CHECK(v >= c.beta1 * x2 * (1.0 - 1e-12));
        CHECK(v <= c.beta2 * x2 * (1.0 + 1e-12));
        const double g2 = spec.gradient(x).squaredNorm();
        CHECK(g2 >= c.alpha1 * v * (1.0 - 1e-12));
        CHECK(g2 <= c.alpha2 * v * (1.0 + 1e-12));
    }
}

TEST_CASE("estimate_constants rejects an empty grid and indefinite functions") {
    LyapunovSpec spec = quadratic_lyapunov(Vec::Ones(2));
    CHECK_THROWS(estimate_constants(spec, 2, 1.0, 0));

    LyapunovSpec bad = spec;
    bad.value = [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; };
    CHECK_THROWS(estimate_constants(bad, 2, 1.0, 64));
    CHECK_THROWS(estimate_constants_serial(bad, 2, 1.0, 64));
}

TEST_CASE("decay multiplier") {
    LyapunovConstants c;
    c.alpha1 = 2.0;
    c.alpha2 = 2.0;
    c.beta1 = 0.5;
    c.beta2 = 0.5;
    c.mu = 1.0;

    SUBCASE("frozen value for a clean gradient step") {
        CHECK(decay_rhs(c, 0.1, 0.0, 1.0) == doctest::Approx(0.81).epsilon(1e-12));
    }
    SUBCASE("no step, no decay") {
        CHECK(decay_rhs(c, 1e-12, 0.0, 1.0) == doctest::Approx(1.0));
    }
    SUBCASE("a huge defect makes the bound vacuous") {
        CHECK(decay_rhs(c, 0.1, 100.0, 1.0) > 1.0);
    }
    SUBCASE("monotone in the defect norm and in mu") {
        std::mt19937_64 gen(5);
        const auto uniform = [&gen](double lo, double hi) {
            return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
        };
        for (int t = 0; t < 200; ++t) {
            const double eps = uniform(0.01, 1.0);
            const double x0 = uniform(0.1, 2.0);
            const double r1 = uniform(0.0, 1.0);
            const double r2 = r1 + uniform(0.0, 1.0);
            CHECK(decay_rhs(c, eps, r2, x0) >= decay_rhs(c, eps, r1, x0));
            LyapunovConstants louder = c;
            louder.mu = c.mu + uniform(0.0, 2.0);
            CHECK(decay_rhs(louder, eps, r1, x0) >= decay_rhs(c, eps, r1, x0));
        }
    }
    SUBCASE("zero initial state is rejected") {
        CHECK_THROWS_AS(decay_rhs(c, 0.1, 0.0, 0.0), std::invalid_argument);
    }
}
