#include <doctest.h>

#include <sstream>

#include "nonholo/batch.hpp"
#include "nonholo/brockett.hpp"
#include "nonholo/simulator.hpp"
#include "nonholo/verify.hpp"

#include <nlohmann/json.hpp>

using namespace nonholo;

TEST_CASE("trajectory CSV round-trips the in-memory doubles exactly") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    const Trajectory traj =
        run_sampled(sys, make_brockett_feedback(0.5), lyap, Vec{{0.3, -0.7, 1.1}}, 0.5, 3, 64);

    std::stringstream ss;
    write_csv(traj, ss);

    std::string header;
    std::getline(ss, header);
    CHECK(header == "t,x1,x2,x3,u1,u2,V");
    ss.seekg(0);

    const Trajectory parsed = read_csv(ss);
    REQUIRE(parsed.times.size() == traj.times.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(parsed.times[i] == traj.times[i]);
        CHECK(parsed.states[i] == traj.states[i]);
        CHECK(parsed.controls[i] == traj.controls[i]);
        CHECK(parsed.lyapunov[i] == traj.lyapunov[i]);
    }
}

TEST_CASE("identical runs serialize byte-identically") {
    const DriftlessSystem sys = brockett_system();
    const LyapunovSpec lyap = quadratic_lyapunov(Vec::Ones(3));
    const auto render = [&]() {
        const Trajectory traj =
            run_sampled(sys, make_brockett_feedback(0.25), lyap, Vec{{1.0, -1.0, 0.5}}, 0.25, 4, 128);
        std::stringstream ss;
        write_csv(traj, ss);
        return ss.str();
    };
    CHECK(render() == render());
}

TEST_CASE("sweep CSV layout") {
    SweepSpec spec;
    spec.system = "brockett";
    spec.eps_values = {0.5};
    spec.x0_values = {Vec{{0.0, 0.0, 1.0}}};
    spec.num_intervals = 4;
    spec.steps_per_interval = 64;
    const auto rows = run_sweep(spec);
    std::stringstream ss;
    write_sweep_csv(rows, ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "eps,x0_1,x0_2,x0_3,lambda,sigma,final_norm,status");
    std::string row;
    std::getline(ss, row);
    CHECK(row.substr(0, 4) == "0.5,");
}

TEST_CASE("bound checks serialize with the expected keys") {
    const BoundCheck check = make_check("demo", 0.5, 1.0);
    const nlohmann::json j = to_json(check);
    CHECK(j["quantity"] == "demo");
    CHECK(j["value"] == 0.5);
    CHECK(j["bound"] == 1.0);
    CHECK(j["slack"] == 0.5);
    CHECK(j["pass"] == true);

    const BoundCheck failing = make_check("demo2", 2.0, 1.0);
    CHECK_FALSE(failing.pass);
    CHECK(to_json(failing)["pass"] == false);
}

TEST_CASE("suite reports carry their seed and per-check entries") {
    const SuiteReport rep = run_suite(Suite::Synthesis, 123);
    const nlohmann::json j = to_json(rep);
    CHECK(j["suite"] == "synthesis");
    CHECK(j["seed"] == 123);
    CHECK(j["checks"].is_array());
    CHECK(j["checks"].size() == rep.checks.size());
    CHECK(j["pass"] == rep.pass);
}

TEST_CASE("suite names parse both ways") {
    for (const char* name : {"lemma2", "lemma3", "lemma4", "synthesis", "all"}) {
        CHECK(suite_name(suite_from_string(name)) == name);
    }
    CHECK_THROWS_AS(suite_from_string("bogus"), std::invalid_argument);
}
