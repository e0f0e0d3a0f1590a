#include "nonholo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nonholo/batch.hpp"
#include "nonholo/brockett.hpp"
#include "nonholo/controller.hpp"
#include "nonholo/lyapunov.hpp"
#include "nonholo/sampling.hpp"

namespace nonholo {

BoundCheck make_check(const std::string& quantity, double value, double bound) {
    BoundCheck c;
    c.quantity = quantity;
    c.value = value;
    c.bound = bound;
    c.slack = bound - value;
    c.pass = std::isfinite(value) && c.slack >= 0.0;
    return c;
}

Suite suite_from_string(const std::string& name) {
    if (name == "lemma2") return Suite::Lemma2;
    if (name == "lemma3") return Suite::Lemma3;
    if (name == "lemma4") return Suite::Lemma4;
    if (name == "synthesis") return Suite::Synthesis;
    if (name == "all") return Suite::All;
    throw std::invalid_argument("unknown suite '" + name + "' (want lemma2|lemma3|lemma4|synthesis|all)");
}

std::string suite_name(Suite s) {
    switch (s) {
        case Suite::Lemma2: return "lemma2";
        case Suite::Lemma3: return "lemma3";
        case Suite::Lemma4: return "lemma4";
        case Suite::Synthesis: return "synthesis";
        case Suite::All: return "all";
    }
    return "?";
}

namespace {

// Deterministic uniforms straight from the generator bits, so reports do not
// depend on the standard library's distribution implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    Vec uniform_vec(int dim, double lo, double hi) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
        return v;
    }
    Vec ball(int dim, double radius) {
        for (;;) {
            const Vec v = uniform_vec(dim, -1.0, 1.0);
            if (v.norm() <= 1.0) return radius * v;
        }
    }
    bool coin() { return (gen_() & 1ull) != 0; }

  private:
    std::mt19937_64 gen_;
};

ControlParams random_params(Rng& rng, const DriftlessSystem& sys, double eps, double v_range, double a_range) {
    ControlParams p;
    p.eps = eps;
    p.pairs = sys.pairs;
    p.v = rng.uniform_vec(sys.m, -v_range, v_range);
    p.a = rng.uniform_vec(static_cast<int>(sys.pairs.size()), -a_range, a_range);
    const auto kbar = assign_frequencies(sys.pairs);
    p.k.resize(sys.pairs.size());
    for (size_t q = 0; q < sys.pairs.size(); ++q) p.k[q] = rng.coin() ? kbar[q] : -kbar[q];
    return p;
}

constexpr double kQuadTol = 1e-10;

}  // namespace

BoundCheck check_remainder_case(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x0,
                                const ControlParams& params, int quad_panels, int rk_steps) {
    return check_remainder_on_trajectory(sys, run_open_loop(sys, params, lyap, x0, rk_steps), quad_panels);
}

BoundCheck check_remainder_on_trajectory(const DriftlessSystem& sys, const Trajectory& traj, int quad_panels) {
    if (traj.interval_params.size() != 1) {
        throw std::invalid_argument("check_remainder_on_trajectory: need a single-interval trajectory");
    }
    const ControlParams& params = traj.interval_params.front();
    const Vec& x0 = traj.sample_states.front();
    const Vec endpoint = traj.states.back();
    const ControlSignal u = [&params](double t) { return u_eval(params, t); };
    const Vec predicted = volterra_second_order(sys, x0, u, params.eps, quad_panels);
    const RegularityBounds b = measure_regularity(sys, x0, params, params.eps);
    const double bound = remainder_bound(b, params.eps) + 10.0 * kQuadTol;
    return make_check(sys.name + " remainder (LU tau = " + std::to_string(b.L * b.U * params.eps) + ")",
                      (endpoint - predicted).norm(), bound);
}

std::vector<BoundCheck> check_growth_on_trajectory(const DriftlessSystem& sys, const Trajectory& traj) {
    std::vector<BoundCheck> checks;
    if (traj.interval_params.empty()) return checks;
    const size_t intervals = traj.interval_params.size();
    const size_t steps = (traj.times.size() - 1) / intervals;
    for (size_t j = 0; j < intervals; ++j) {
        const Vec& x_start = traj.states[j * steps];
        const ControlParams& params = traj.interval_params[j];
        const RegularityBounds b = measure_regularity(sys, x_start, params, params.eps);
        // Report the tightest point of the interval.
        double worst_margin = std::numeric_limits<double>::infinity();
        double worst_value = 0.0, worst_bound = 0.0;
        const size_t last = std::min(traj.times.size() - 1, (j + 1) * steps);
        for (size_t s = j * steps; s <= last; ++s) {
            const double dt = traj.times[s] - traj.times[j * steps];
            const double value = (traj.states[s] - x_start).norm();
            const double bound = apriori_bound(b.M, b.L, b.U, dt);
            if (bound - value < worst_margin) {
                worst_margin = bound - value;
                worst_value = value;
                worst_bound = bound;
            }
        }
        checks.push_back(make_check(sys.name + " growth, interval " + std::to_string(j), worst_value, worst_bound));
    }
    return checks;
}

std::vector<BoundCheck> check_decay_on_trajectory(const LyapunovSpec& lyap, const Trajectory& traj) {
    if (!lyap.consts) throw std::invalid_argument("check_decay_on_trajectory: Lyapunov constants are required");
    std::vector<BoundCheck> checks;
    for (size_t j = 0; j + 1 < traj.sample_states.size(); ++j) {
        const Vec& x0 = traj.sample_states[j];
        const Vec& x1 = traj.sample_states[j + 1];
        if (x0.norm() < 1e-12) continue;
        const Vec r = x1 - x0 + traj.eps * lyap.gradient(x0);
        const double multiplier = decay_rhs(*lyap.consts, traj.eps, r.norm(), x0.norm());
        checks.push_back(make_check("decay, interval " + std::to_string(j), lyap.value(x1),
                                    multiplier * lyap.value(x0)));
    }
    return checks;
}

namespace {

SuiteReport remainder_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "lemma2";
    rep.seed = seed;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);

    for (const char* name : {"unicycle", "perturbed-brockett"}) {
        const DriftlessSystem sys = make_system(name);
        const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(sys.n));
        int accepted = 0;
        int attempts = 0;
        while (accepted < 25 && attempts < 2000) {
            ++attempts;
            const Vec x0 = rng.ball(sys.n, 0.5 * sys.domain_radius);
            const double eps = rng.uniform(0.2, 0.5);
            const ControlParams params = random_params(rng, sys, eps, 0.3, 0.4);
            const RegularityBounds b = measure_regularity(sys, x0, params, eps);
            if (b.L * b.U * eps >= 0.5) continue;  // keep within the bound's intended regime
            rep.checks.push_back(check_remainder_case(sys, lyap, x0, params));
            ++accepted;
        }
    }

    // Nilpotent case: the second-order representation is exact, so the
    // discrepancy must vanish to integrator/quadrature accuracy.
    const DriftlessSystem brockett = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    for (int c = 0; c < 10; ++c) {
        const Vec x0 = rng.ball(3, 1.5);
        const double eps = rng.uniform(0.25, 1.0);
        const ControlParams params = random_params(rng, brockett, eps, 0.5, 1.0);
        const Trajectory traj = run_open_loop(brockett, params, lyap, x0, 4096);
        const Vec endpoint = traj.states.back();
        const Vec closed = volterra_eps_closed(brockett, x0, params);
        rep.checks.push_back(make_check("brockett nilpotent exactness (closed form), case " + std::to_string(c),
                                        (endpoint - closed).norm(), 1e-9));
        const ControlSignal u = [&params](double t) { return u_eval(params, t); };
        const Vec quad = volterra_second_order(brockett, x0, u, eps, 4096);
        rep.checks.push_back(make_check("brockett nilpotent exactness (quadrature), case " + std::to_string(c),
                                        (endpoint - quad).norm(), 1e-9));
    }

    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const BoundCheck& c) { return c.pass; });
    return rep;
}

std::vector<Trajectory> decay_trajectories(std::uint64_t seed, std::vector<const char*>* names = nullptr) {
    Rng rng(seed ^ 0x853c49e6748fea9bull);
    std::vector<Trajectory> trajectories;
    const auto add = [&](const char* system, double eps, double ball, int runs, int intervals,
                         bool closed_form) {
        const DriftlessSystem sys = make_system(system);
        const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(sys.n));
        const StateFeedback law =
            closed_form ? make_brockett_feedback(eps) : make_synthesis_feedback(sys, lyap, eps);
        for (int r = 0; r < runs; ++r) {
            const Vec x0 = rng.ball(sys.n, ball);
            trajectories.push_back(run_sampled(sys, law, lyap, x0, eps, intervals, 256));
            if (names) names->push_back(system);
        }
    };
    add("brockett", 0.5, 1.6, 4, 5, false);
    add("brockett", 0.5, 1.6, 2, 5, true);
    add("unicycle", 0.25, 0.6, 3, 5, false);
    add("perturbed-brockett", 0.25, 0.7, 3, 5, false);
    return trajectories;
}

SuiteReport decay_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "lemma3";
    rep.seed = seed;
    const LyapunovSpec lyap3 = quadratic_lyapunov(Vec::Ones(3));
    for (const Trajectory& traj : decay_trajectories(seed)) {
        for (auto& c : check_decay_on_trajectory(lyap3, traj)) rep.checks.push_back(std::move(c));
    }
    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const BoundCheck& c) { return c.pass; });
    return rep;
}

SuiteReport growth_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "lemma4";
    rep.seed = seed;
    std::vector<const char*> names;
    auto trajectories = decay_trajectories(seed, &names);
    for (size_t i = 0; i < trajectories.size(); ++i) {
        const DriftlessSystem sys = make_system(names[i]);
        for (auto& c : check_growth_on_trajectory(sys, trajectories[i])) rep.checks.push_back(std::move(c));
    }

    // Steering intervals swing wide; the growth bound has to hold there too.
    Rng rng(seed ^ 0xda3e39cb94b95bdbull);
    const DriftlessSystem brockett = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    for (int c = 0; c < 10; ++c) {
        const Vec x0 = rng.uniform_vec(3, -2.0, 2.0);
        const Vec x1 = rng.uniform_vec(3, -2.0, 2.0);
        const double eps = rng.coin() ? 0.5 : 1.0;
        const int k = steer_discriminant(x0, x1, 1) >= 0.0 ? 1 : -1;
        const BrockettParams p = steer(x0, x1, eps, k, rng.coin() ? Branch::Plus : Branch::Minus);
        const Trajectory traj = run_open_loop(brockett, to_control_params(p), lyap, x0, 2048);
        for (auto& chk : check_growth_on_trajectory(brockett, traj)) rep.checks.push_back(std::move(chk));
    }
    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const BoundCheck& c) { return c.pass; });
    return rep;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SuiteReport synthesis_suite(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "synthesis";
    rep.seed = seed;

    for (const char* name : {"brockett", "unicycle"}) {
        const DriftlessSystem sys = make_system(name);
        const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(sys.n));
        const double eps = 0.1;
        const auto grid = halton_ball(sys.n, sys.domain_radius, 200);
        const auto reports = solve_grid(sys, lyap, grid, eps);

        double worst_residual = 0.0;
        double worst_recomputed = 0.0;
        int failures = 0;
        int resonance_failures = 0;
        for (size_t i = 0; i < reports.size(); ++i) {
            if (!reports[i].converged) {
                ++failures;
                continue;
            }
            worst_residual = std::max(worst_residual, reports[i].residual_norm);
            // Postcondition re-check through the standalone residual path.
            worst_recomputed =
                std::max(worst_recomputed, residual(sys, lyap, grid[i], reports[i].params).norm());
            if (!nonresonant(reports[i].params.k)) ++resonance_failures;
        }
        rep.checks.push_back(make_check(std::string(name) + " solves converged (failures)", failures, 0.0));
        rep.checks.push_back(make_check(std::string(name) + " worst residual over grid", worst_residual, 1e-9));
        rep.checks.push_back(
            make_check(std::string(name) + " worst recomputed residual", worst_recomputed, 1e-9));
        rep.checks.push_back(
            make_check(std::string(name) + " resonance violations", resonance_failures, 0.0));

        // Scaling along a ray: ||v|| ~ ||x||, ||a|| ~ sqrt(||x||). The ray is
        // chosen so the bracket coordinate of Phi keeps its sign over the
        // whole range (zero crossings would put a log(0) into the fit).
        Vec dir{{0.3, 0.8, 0.4}};
        dir.normalize();
        std::vector<double> norms, vnorms, anorms;
        for (int s = 0; s < 9; ++s) {
            const double scale = 1e-3 * std::pow(100.0, s / 8.0) * sys.domain_radius;
            const auto r = solve_params(sys, lyap, scale * dir, eps);
            norms.push_back(scale);
            vnorms.push_back(r.params.v.norm());
            anorms.push_back(r.params.a.norm());
        }
        rep.checks.push_back(make_check(std::string(name) + " |fit(||v|| vs ||x||) - 1|",
                                        std::abs(loglog_slope(norms, vnorms) - 1.0), 0.1));
        rep.checks.push_back(make_check(std::string(name) + " |fit(||a|| vs ||x||) - 0.5|",
                                        std::abs(loglog_slope(norms, anorms) - 0.5), 0.1));

        // ||a|| ~ 1/sqrt(eps) at a fixed state.
        const Vec x_fixed = 0.05 * sys.domain_radius * dir;
        std::vector<double> eps_list, a_eps;
        for (double e : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
            const auto r = solve_params(sys, lyap, x_fixed, e);
            eps_list.push_back(e);
            a_eps.push_back(r.params.a.norm());
        }
        rep.checks.push_back(make_check(std::string(name) + " |fit(||a|| vs eps) + 0.5|",
                                        std::abs(loglog_slope(eps_list, a_eps) + 0.5), 0.1));

        // (||v|| + ||a||) eps^{2/3} must decrease as eps -> 0.
        double prev = std::numeric_limits<double>::infinity();
        double worst_increase = -std::numeric_limits<double>::infinity();
        for (double e : {1e-1, 1e-2, 1e-3}) {
            const auto r = solve_params(sys, lyap, x_fixed, e);
            const double value = (r.params.v.norm() + r.params.a.norm()) * std::pow(e, 2.0 / 3.0);
            worst_increase = std::max(worst_increase, value - prev);
            prev = value;
        }
        rep.checks.push_back(
            make_check(std::string(name) + " asymptotic quantity increase", worst_increase, 0.0));
    }

    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const BoundCheck& c) { return c.pass; });
    return rep;
}

}  // namespace

SuiteReport run_suite(Suite suite, std::uint64_t seed) {
    switch (suite) {
        case Suite::Lemma2: return remainder_suite(seed);
        case Suite::Lemma3: return decay_suite(seed);
        case Suite::Lemma4: return growth_suite(seed);
        case Suite::Synthesis: return synthesis_suite(seed);
        case Suite::All: break;
    }
    throw std::invalid_argument("run_suite: pass a concrete suite (use run_suites for 'all')");
}

std::vector<SuiteReport> run_suites(Suite suite, std::uint64_t seed) {
    if (suite != Suite::All) return {run_suite(suite, seed)};
    std::vector<SuiteReport> reports;
    for (Suite s : {Suite::Lemma2, Suite::Lemma3, Suite::Lemma4, Suite::Synthesis}) {
        reports.push_back(run_suite(s, seed));
    }
    return reports;
}

nlohmann::json to_json(const BoundCheck& check) {
    return nlohmann::json{{"quantity", check.quantity},
                          {"value", check.value},
                          {"bound", check.bound},
                          {"slack", check.slack},
                          {"pass", check.pass}};
}

nlohmann::json to_json(const SuiteReport& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks) checks.push_back(to_json(c));
    return nlohmann::json{
        {"suite", report.suite}, {"seed", report.seed}, {"checks", checks}, {"pass", report.pass}};
}

}  // namespace nonholo
