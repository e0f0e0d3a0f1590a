#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nonholo/analysis.hpp"
#include "nonholo/simulator.hpp"

namespace nonholo {

/// One measured quantity against its bound. slack = bound - value; the check
/// passes iff the slack is nonnegative.
struct BoundCheck {
    std::string quantity;
    double value = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool pass = false;
};

BoundCheck make_check(const std::string& quantity, double value, double bound);

enum class Suite { Lemma2, Lemma3, Lemma4, Synthesis, All };

Suite suite_from_string(const std::string& name);
std::string suite_name(Suite s);

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<BoundCheck> checks;
    bool pass = false;
};

/// Expansion-remainder checks for one open-loop interval: integrate the flow,
/// compare with the second-order prediction, and test the discrepancy against
/// the remainder bound built from measured regularity data.
BoundCheck check_remainder_case(const DriftlessSystem& sys, const LyapunovSpec& lyap, const Vec& x0,
                                const ControlParams& params, int quad_panels = 4096, int rk_steps = 2048);

/// Same check on an already-integrated single-interval trajectory (as
/// produced by run_open_loop).
BoundCheck check_remainder_on_trajectory(const DriftlessSystem& sys, const Trajectory& traj,
                                         int quad_panels = 4096);

/// Growth-bound checks over every interval of a recorded trajectory:
/// sup_t ||x(t) - x(t_j)|| against the measured a-priori bound.
std::vector<BoundCheck> check_growth_on_trajectory(const DriftlessSystem& sys, const Trajectory& traj);

/// One-step decay checks over every interval of a sampled trajectory: with
/// the gradient-step defect r measured from the simulation, V at the interval
/// end must stay below the decay multiplier times V at the start.
std::vector<BoundCheck> check_decay_on_trajectory(const LyapunovSpec& lyap, const Trajectory& traj);

/// Named verification suites (seeded, deterministic).
SuiteReport run_suite(Suite suite, std::uint64_t seed);
std::vector<SuiteReport> run_suites(Suite suite, std::uint64_t seed);

nlohmann::json to_json(const BoundCheck& check);
nlohmann::json to_json(const SuiteReport& report);

}  // namespace nonholo
