#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nonholo/analysis.hpp"
#include "nonholo/batch.hpp"
#include "nonholo/brockett.hpp"
#include "nonholo/simulator.hpp"
#include "nonholo/verify.hpp"

namespace {

using nonholo::Vec;
using json = nlohmann::json;

// Exit codes: 1 config error, 2 synthesis failure, 3 domain escape,
// 4 verification failure.
constexpr int kConfigError = 1;
constexpr int kSynthesisError = 2;
constexpr int kEscapeError = 3;
constexpr int kVerifyError = 4;

Vec parse_vector(const std::vector<double>& values) {
    Vec v(static_cast<int>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) v[static_cast<int>(i)] = values[i];
    return v;
}

Vec parse_vector_string(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    return parse_vector(values);
}

nonholo::Branch parse_branch(const std::string& s) {
    if (s == "+" || s == "plus") return nonholo::Branch::Plus;
    if (s == "-" || s == "minus") return nonholo::Branch::Minus;
    throw std::invalid_argument("branch must be '+' or '-'");
}

// JSON has no infinity; deadbeat rates are reported as the string "inf".
json json_number(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

void emit(const json& j, const std::string& report_path) {
    std::cout << j.dump(2) << "\n";
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        if (!os) throw std::invalid_argument("cannot open report file '" + report_path + "'");
        os << j.dump(2) << "\n";
    }
}

struct SimulateArgs {
    std::string system = "brockett";
    std::vector<double> x0;
    double eps = 1.0;
    std::string mode = "sampled";
    double t_final = 20.0;
    int num_intervals = 10;
    int steps_per_interval = 256;
    std::string branch = "+";
    std::string feedback = "auto";
    std::vector<double> weights;
    std::string out = "trajectory.csv";
    std::string report;
};

int cmd_simulate(const SimulateArgs& args) {
    const nonholo::DriftlessSystem sys = nonholo::make_system(args.system);
    if (static_cast<int>(args.x0.size()) != sys.n) {
        throw std::invalid_argument("--x0 needs " + std::to_string(sys.n) + " components for this system");
    }
    Vec weights = Vec::Ones(sys.n);
    if (!args.weights.empty()) {
        if (static_cast<int>(args.weights.size()) != sys.n) {
            throw std::invalid_argument("--weights needs " + std::to_string(sys.n) + " components");
        }
        weights = parse_vector(args.weights);
    }
    const nonholo::LyapunovSpec lyap = nonholo::quadratic_lyapunov(weights);

    std::string feedback = args.feedback;
    if (feedback == "auto") feedback = args.system == "brockett" ? "closed" : "synthesis";
    if (feedback == "closed" && args.system != "brockett") {
        throw std::invalid_argument("--feedback closed is only available for the brockett system");
    }
    nonholo::StateFeedback law;
    if (feedback == "closed") {
        law = nonholo::make_brockett_feedback(args.eps, parse_branch(args.branch));
    } else if (feedback == "synthesis") {
        law = nonholo::make_synthesis_feedback(sys, lyap, args.eps);
    } else {
        throw std::invalid_argument("--feedback must be auto|closed|synthesis");
    }

    nonholo::Trajectory traj;
    if (args.mode == "sampled") {
        traj = nonholo::run_sampled(sys, law, lyap, parse_vector(args.x0), args.eps, args.num_intervals,
                                    args.steps_per_interval);
    } else if (args.mode == "classical") {
        traj = nonholo::run_classical(sys, law, lyap, parse_vector(args.x0), args.eps, args.t_final,
                                      args.eps / args.steps_per_interval);
    } else {
        throw std::invalid_argument("--mode must be sampled or classical");
    }

    nonholo::write_csv(traj, args.out);
    const nonholo::DecayReport decay = nonholo::decay_check(traj, lyap);
    json summary{{"final_norm", traj.states.back().norm()},
                 {"lambda_fit", json_number(decay.lambda)},
                 {"sigma", decay.sigma},
                 {"intervals", traj.sample_states.size() - 1},
                 {"system", args.system},
                 {"mode", args.mode},
                 {"eps", args.eps},
                 {"csv", args.out}};
    emit(summary, args.report);
    return 0;
}

int cmd_steer(const std::string& x0s, const std::string& x1s, double eps, int k12, bool k12_explicit,
              const std::string& branch, const std::string& report) {
    const Vec x0 = parse_vector_string(x0s);
    const Vec x1 = parse_vector_string(x1s);
    if (x0.size() != 3 || x1.size() != 3) throw std::invalid_argument("steer needs 3-component states");

    int k = k12;
    bool flipped = false;
    if (nonholo::steer_discriminant(x0, x1, k) < 0.0) {
        if (k12_explicit) {
            std::cerr << "requested k12 = " << k << " is infeasible for this pair (try " << -k << ")\n";
            return kSynthesisError;
        }
        k = -k;  // the opposite sign always works
        flipped = true;
    }
    const nonholo::BrockettParams p = nonholo::steer(x0, x1, eps, k, parse_branch(branch));

    const nonholo::DriftlessSystem sys = nonholo::brockett_system();
    const nonholo::LyapunovSpec lyap = nonholo::quadratic_lyapunov(Vec::Ones(3));
    const nonholo::Trajectory traj =
        nonholo::run_open_loop(sys, nonholo::to_control_params(p), lyap, x0, 4096);
    const double error = (traj.states.back() - x1).norm();

    json out{{"v1", p.v1},        {"v2", p.v2},           {"a12", p.a12},
             {"k12", p.k12},      {"eps", p.eps},         {"endpoint_error", error},
             {"k12_flipped", flipped}};
    emit(out, report);
    return 0;
}

int cmd_verify(const std::string& suite_name, std::uint64_t seed, const std::string& report) {
    const auto reports = nonholo::run_suites(nonholo::suite_from_string(suite_name), seed);
    json out = json::array();
    bool pass = true;
    for (const auto& r : reports) {
        out.push_back(nonholo::to_json(r));
        pass = pass && r.pass;
    }
    emit(out, report);
    return pass ? 0 : kVerifyError;
}

struct SweepArgs {
    std::string system = "brockett";
    std::vector<double> eps_values;
    std::vector<std::string> x0_strings;
    std::string mode = "sampled";
    int num_intervals = 12;
    double t_final = 12.0;
    int steps_per_interval = 256;
    std::string branch = "+";
    std::string out = "sweep.csv";
};

int cmd_sweep(const SweepArgs& args) {
    nonholo::SweepSpec spec;
    spec.system = args.system;
    spec.eps_values = args.eps_values;
    for (const auto& s : args.x0_strings) spec.x0_values.push_back(parse_vector_string(s));
    if (args.mode == "sampled") {
        spec.mode = nonholo::SimMode::Sampled;
    } else if (args.mode == "classical") {
        spec.mode = nonholo::SimMode::Classical;
    } else {
        throw std::invalid_argument("--mode must be sampled or classical");
    }
    spec.num_intervals = args.num_intervals;
    spec.t_final = args.t_final;
    spec.steps_per_interval = args.steps_per_interval;
    spec.branch = parse_branch(args.branch);

    const auto rows = nonholo::run_sweep(spec);
    std::ofstream os(args.out);
    if (!os) throw std::invalid_argument("cannot open output file '" + args.out + "'");
    nonholo::write_sweep_csv(rows, os);

    long failures = 0;
    for (const auto& row : rows) failures += row.status != 0;
    std::cout << json{{"rows", rows.size()}, {"failures", failures}, {"csv", args.out}}.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    nonholo::apply_thread_cap_from_env();

    CLI::App app{"nonholo: time-varying trigonometric feedback for driftless nonholonomic systems"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Integrate one closed-loop trajectory and export CSV");
    simulate->add_option("--system", sim.system, "registered system name")->capture_default_str();
    simulate->add_option("--x0", sim.x0, "initial state, comma separated")->required()->delimiter(',');
    simulate->add_option("--eps", sim.eps, "sampling period")->capture_default_str();
    simulate->add_option("--mode", sim.mode, "sampled | classical")->capture_default_str();
    simulate->add_option("--t-final", sim.t_final, "horizon for classical mode")->capture_default_str();
    simulate->add_option("--num-intervals", sim.num_intervals, "intervals for sampled mode")->capture_default_str();
    simulate->add_option("--steps-per-interval", sim.steps_per_interval, "integrator steps per eps")
        ->capture_default_str();
    simulate->add_option("--branch", sim.branch, "+ | - square-root branch of the closed-form feedback")
        ->capture_default_str();
    simulate->add_option("--feedback", sim.feedback, "auto | closed | synthesis")->capture_default_str();
    simulate->add_option("--weights", sim.weights, "Lyapunov weights, comma separated")->delimiter(',');
    simulate->add_option("--out", sim.out, "trajectory CSV path")->capture_default_str();
    simulate->add_option("--report", sim.report, "also write the JSON summary here");

    std::string steer_x0, steer_x1, steer_branch = "+", steer_report;
    double steer_eps = 1.0;
    int steer_k12 = 1;
    auto* steer = app.add_subcommand("steer", "Exact one-interval steering of the Brockett integrator");
    steer->add_option("--x0", steer_x0, "start state a,b,c")->required();
    steer->add_option("--x1", steer_x1, "target state a,b,c")->required();
    steer->add_option("--eps", steer_eps, "interval length")->capture_default_str();
    auto* k_opt = steer->add_option("--k12", steer_k12, "oscillation frequency (sign is retried unless given)");
    steer->add_option("--branch", steer_branch, "+ | -")->capture_default_str();
    steer->add_option("--report", steer_report, "also write the JSON result here");

    std::string verify_suite = "all", verify_report;
    std::uint64_t verify_seed = 0;
    auto* verify = app.add_subcommand("verify", "Run the bound-verification suites");
    verify->add_option("--suite", verify_suite, "lemma2 | lemma3 | lemma4 | synthesis | all")
        ->capture_default_str();
    verify->add_option("--seed", verify_seed, "seed for the randomized cases")->capture_default_str();
    verify->add_option("--report", verify_report, "also write the JSON report here");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of (eps, x0) simulations");
    sweep_cmd->add_option("--system", sweep.system, "registered system name")->capture_default_str();
    sweep_cmd->add_option("--eps", sweep.eps_values, "eps values, comma separated")->required()->delimiter(',');
    sweep_cmd->add_option("--x0", sweep.x0_strings, "initial state a,b,c (repeatable)")
        ->required()
        ->take_all();
    sweep_cmd->add_option("--mode", sweep.mode, "sampled | classical")->capture_default_str();
    sweep_cmd->add_option("--num-intervals", sweep.num_intervals)->capture_default_str();
    sweep_cmd->add_option("--t-final", sweep.t_final)->capture_default_str();
    sweep_cmd->add_option("--steps-per-interval", sweep.steps_per_interval)->capture_default_str();
    sweep_cmd->add_option("--branch", sweep.branch, "+ | -")->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out, "sweep CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (steer->parsed()) {
            return cmd_steer(steer_x0, steer_x1, steer_eps, steer_k12, k_opt->count() > 0, steer_branch,
                             steer_report);
        }
        if (verify->parsed()) return cmd_verify(verify_suite, verify_seed, verify_report);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    } catch (const nonholo::SynthesisFailure& e) {
        std::cerr << "synthesis failure: " << e.what() << "\n";
        return kSynthesisError;
    } catch (const nonholo::DomainEscape& e) {
        std::cerr << "domain escape: " << e.what() << "\n";
        return kEscapeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
