// Command-line front end for the regret-control solver library. Talks to the
// core exclusively through the public C interface in regret.h.
//
// Exit codes: 0 success, 1 argument/parse/validation failure, 2 solver
// non-convergence (artifact still written), 3 I/O failure, 4 verification
// suite failure. Diagnostics go to stderr; stdout carries machine-readable
// results only.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regret.h"

namespace {

using nlohmann::ordered_json;

int exit_code(rc_status status) {
    switch (status) {
    case RC_OK: return 0;
    case RC_ERROR_IO: return 3;
    case RC_ERROR_NOT_CONVERGED: return 2;
    case RC_ERROR_VERIFY_FAILED: return 4;
    default: return 1;
    }
}

int fail(rc_status status) {
    std::cerr << "error (" << rc_status_name(status) << "): " << rc_last_error() << "\n";
    return exit_code(status);
}

struct SystemHandle {
    rc_system* ptr = nullptr;
    ~SystemHandle() { rc_system_free(ptr); }
};

struct SolutionHandle {
    rc_solution* ptr = nullptr;
    ~SolutionHandle() { rc_solution_free(ptr); }
};

struct ControllerHandle {
    rc_controller* ptr = nullptr;
    ~ControllerHandle() { rc_controller_free(ptr); }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int cmd_validate(const std::string& system_path) {
    SystemHandle system;
    if (rc_status s = rc_system_load_file(system_path.c_str(), &system.ptr)) return fail(s);
    ordered_json out;
    out["valid"] = true;
    out["num_states"] = rc_system_num_states(system.ptr);
    out["num_actions"] = rc_system_num_actions(system.ptr);
    out["num_disturbances"] = rc_system_num_disturbances(system.ptr);
    out["gamma"] = rc_system_gamma(system.ptr);
    out["r_max"] = rc_system_r_max(system.ptr);
    out["hash"] = rc_system_hash(system.ptr);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_inventory_gen(int s_max, int a_max, int w_max, double holding, double penalty,
                      double gamma, const std::string& out_path) {
    SystemHandle system;
    if (rc_status s = rc_system_build_inventory(s_max, a_max, w_max, holding, penalty, gamma,
                                                &system.ptr)) {
        return fail(s);
    }
    if (rc_status s = rc_system_save_file(system.ptr, out_path.c_str())) return fail(s);
    ordered_json out;
    out["written"] = out_path;
    out["hash"] = rc_system_hash(system.ptr);
    std::cout << out.dump(2) << "\n";
    return 0;
}

std::vector<double> load_distribution_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.is_object() && j.contains("p")) j = j["p"];
    if (!j.is_array()) throw std::runtime_error("distribution file must hold a JSON array");
    return j.get<std::vector<double>>();
}

int cmd_solve(const std::string& system_path, const std::string& mode, int k, double epsilon,
              int max_sweeps, double gamma_override, bool has_gamma, bool in_place, int threads,
              const std::string& dist_path, const std::vector<int>& s0_list,
              const std::string& out_path) {
    SystemHandle loaded;
    if (rc_status s = rc_system_load_file(system_path.c_str(), &loaded.ptr)) return fail(s);
    SystemHandle overridden;
    rc_system* system = loaded.ptr;
    if (has_gamma) {
        if (rc_status s = rc_system_override_gamma(loaded.ptr, gamma_override, &overridden.ptr)) {
            return fail(s);
        }
        system = overridden.ptr;
    }

    SolutionHandle solution;
    rc_status solve_status = RC_OK;
    if (mode == "regret") {
        rc_solve_options options;
        rc_solve_options_init(&options);
        options.k = k;
        options.epsilon = epsilon;
        options.max_sweeps = max_sweeps;
        options.in_place = in_place ? 1 : 0;
        options.threads = threads;
        solve_status = rc_solve_regret(system, &options, &solution.ptr);
    } else if (mode == "mdp") {
        std::vector<double> dist;
        try {
            dist = load_distribution_file(dist_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        solve_status = rc_solve_mdp(system, dist.data(), static_cast<int>(dist.size()), epsilon,
                                    &solution.ptr);
    } else if (mode == "robust") {
        solve_status = rc_solve_robust(system, epsilon, &solution.ptr);
    } else {
        std::cerr << "error: unknown mode " << mode << "\n";
        return 1;
    }
    if (solve_status != RC_OK && solve_status != RC_ERROR_NOT_CONVERGED) return fail(solve_status);
    if (solve_status == RC_ERROR_NOT_CONVERGED) {
        std::cerr << "warning: " << rc_last_error() << "\n";
    }

    if (!out_path.empty()) {
        if (rc_status s = rc_solution_save_file(solution.ptr, out_path.c_str())) return fail(s);
    }

    ordered_json out;
    out["mode"] = mode;
    out["kind"] = rc_solution_kind(solution.ptr);
    out["converged"] = rc_solution_converged(solution.ptr) != 0;
    out["sweeps_used"] = rc_solution_sweeps(solution.ptr);
    out["error_bound"] = rc_solution_error_bound(solution.ptr);
    if (mode == "regret") {
        ordered_json regrets;
        for (int s0 : s0_list) {
            double value = 0.0;
            if (rc_status s = rc_solution_regret(solution.ptr, s0, &value)) return fail(s);
            regrets[std::to_string(s0)] = value;
        }
        out["k"] = k;
        out["regret"] = std::move(regrets);
    }
    if (!out_path.empty()) out["artifact"] = out_path;
    std::cout << out.dump(2) << "\n";
    return solve_status == RC_ERROR_NOT_CONVERGED ? 2 : 0;
}

int cmd_solve_finite(const std::string& system_path, int k, int horizon, int threads,
                     const std::vector<int>& s0_list, const std::string& out_path) {
    SystemHandle system;
    if (rc_status s = rc_system_load_file(system_path.c_str(), &system.ptr)) return fail(s);
    SolutionHandle solution;
    if (rc_status s = rc_solve_regret_finite(system.ptr, k, horizon, threads, &solution.ptr)) {
        return fail(s);
    }
    if (!out_path.empty()) {
        if (rc_status s = rc_solution_save_file(solution.ptr, out_path.c_str())) return fail(s);
    }
    ordered_json out;
    out["mode"] = "regret-finite";
    out["k"] = k;
    out["horizon"] = horizon;
    ordered_json regrets;
    for (int s0 : s0_list) {
        double value = 0.0;
        if (rc_status s = rc_solution_regret(solution.ptr, s0, &value)) return fail(s);
        regrets[std::to_string(s0)] = value;
    }
    out["regret"] = std::move(regrets);
    if (!out_path.empty()) out["artifact"] = out_path;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& system_path, const std::string& artifact_path,
                 const std::string& model, double lambda, double lambda_low, double lambda_high,
                 double persistence, const std::string& initial_regime, int horizon,
                 std::uint64_t seed, int s0, const std::string& out_path) {
    SystemHandle system;
    if (rc_status s = rc_system_load_file(system_path.c_str(), &system.ptr)) return fail(s);
    SolutionHandle solution;
    if (rc_status s = rc_solution_load_file(system.ptr, artifact_path.c_str(), &solution.ptr)) {
        return fail(s);
    }
    ControllerHandle controller;
    if (rc_status s = rc_controller_create(solution.ptr, s0, &controller.ptr)) return fail(s);

    const int w_max = rc_system_num_disturbances(system.ptr) - 1;
    std::vector<int> w(static_cast<std::size_t>(horizon));
    rc_status sample_status;
    if (model == "poisson") {
        sample_status = rc_sample_poisson(lambda, w_max, horizon, seed, w.data());
    } else if (model == "hmm") {
        sample_status = rc_sample_hmm(lambda_low, lambda_high, persistence,
                                      initial_regime == "high" ? 1 : 0, w_max, horizon, seed,
                                      w.data(), nullptr);
    } else {
        std::cerr << "error: unknown model " << model << "\n";
        return 1;
    }
    if (sample_status != RC_OK) return fail(sample_status);

    std::vector<int> states(w.size()), actions(w.size());
    std::vector<double> rewards(w.size());
    double discounted = 0.0, undiscounted = 0.0;
    if (rc_status s = rc_rollout(system.ptr, controller.ptr, s0, w.data(), horizon,
                                 states.data(), actions.data(), rewards.data(), &discounted,
                                 &undiscounted)) {
        return fail(s);
    }

    std::ofstream csv(out_path, std::ios::binary);
    if (!csv) {
        std::cerr << "error: cannot open " << out_path << " for writing\n";
        return 3;
    }
    csv << "t,s,a,w,reward,cum_reward,avg_reward\n";
    double cum = 0.0;
    for (int t = 0; t < horizon; ++t) {
        cum += rewards[t];
        csv << t << ',' << states[t] << ',' << actions[t] << ',' << w[t] << ','
            << format_double(rewards[t]) << ',' << format_double(cum) << ','
            << format_double(cum / (t + 1)) << '\n';
    }
    csv.close();
    if (!csv) {
        std::cerr << "error: write failed: " << out_path << "\n";
        return 3;
    }

    ordered_json out;
    out["controller"] = rc_solution_kind(solution.ptr);
    out["horizon"] = horizon;
    out["seed"] = seed;
    out["discounted_return"] = discounted;
    out["undiscounted_return"] = undiscounted;
    out["avg_reward"] = undiscounted / horizon;
    out["trajectory"] = out_path;

    // Sidecar manifest: everything needed to replay this run exactly.
    ordered_json manifest;
    manifest["system_hash"] = rc_system_hash(system.ptr);
    manifest["artifact"] = artifact_path;
    manifest["model"] = model;
    if (model == "poisson") {
        manifest["lambda"] = lambda;
    } else {
        manifest["lambda_low"] = lambda_low;
        manifest["lambda_high"] = lambda_high;
        manifest["persistence"] = persistence;
        manifest["initial_regime"] = initial_regime;
    }
    manifest["horizon"] = horizon;
    manifest["seed"] = seed;
    manifest["s0"] = s0;
    std::ofstream mf(out_path + ".manifest.json", std::ios::binary);
    if (mf) mf << manifest.dump(2) << "\n";

    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << config_path << "\n";
        return 3;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string base_dir =
        std::filesystem::path(config_path).parent_path().string();

    // Flag beats the config's own output directory.
    std::string resolved_out = out_dir;
    if (resolved_out.empty()) {
        try {
            const auto parsed = nlohmann::json::parse(buf.str());
            resolved_out = parsed.value("output", std::string{});
        } catch (const nlohmann::json::exception&) {
            // fall through; the library reports the parse error with context
        }
    }
    if (resolved_out.empty()) {
        std::cerr << "error: no output directory (--out flag or \"output\" config field)\n";
        return 1;
    }

    char* summary = nullptr;
    const rc_status status =
        rc_run_experiment(buf.str().c_str(), base_dir.c_str(), resolved_out.c_str(), &summary);
    if (status != RC_OK && status != RC_ERROR_NOT_CONVERGED) return fail(status);
    if (summary) {
        std::cout << summary;
        rc_string_free(summary);
    }
    if (status == RC_ERROR_NOT_CONVERGED) {
        std::cerr << "warning: " << rc_last_error() << "\n";
        return 2;
    }
    return 0;
}

int cmd_verify(int max_states, int max_actions, int max_disturbances, int k_max, int horizon_max,
               int systems_per_cell, double tolerance, std::uint64_t seed, int threads) {
    ordered_json options;
    options["max_states"] = max_states;
    options["max_actions"] = max_actions;
    options["max_disturbances"] = max_disturbances;
    options["k_max"] = k_max;
    options["horizon_max"] = horizon_max;
    options["systems_per_cell"] = systems_per_cell;
    options["tolerance"] = tolerance;
    options["seed"] = seed;
    options["threads"] = threads;
    char* report = nullptr;
    const rc_status status = rc_run_verification(options.dump().c_str(), &report);
    if (report) {
        std::cout << report;
        rc_string_free(report);
    }
    if (status == RC_ERROR_VERIFY_FAILED) {
        std::cerr << "error: " << rc_last_error() << "\n";
        return 4;
    }
    if (status != RC_OK) return fail(status);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regret-optimal control for finite-state disturbance-driven systems"};
    app.require_subcommand(1);

    // validate
    std::string system_path;
    auto* validate = app.add_subcommand("validate", "Check a system file against its invariants");
    validate->add_option("--system", system_path, "system JSON file")->required();

    // inventory-gen
    int s_max = 20, a_max = 20, w_max = 25;
    double holding = 1.0, penalty = 9.0, gamma = 0.995;
    std::string gen_out;
    auto* gen = app.add_subcommand("inventory-gen", "Generate a lost-sales inventory system");
    gen->add_option("--s-max", s_max, "inventory cap");
    gen->add_option("--a-max", a_max, "order cap");
    gen->add_option("--w-max", w_max, "demand cap");
    gen->add_option("--holding", holding, "holding cost h");
    gen->add_option("--penalty", penalty, "lost-sales penalty p");
    gen->add_option("--gamma", gamma, "discount factor");
    gen->add_option("--out", gen_out, "output path")->required();

    // solve
    std::string solve_system, solve_mode = "regret", dist_path, solve_out;
    int k = 1, max_sweeps = 200000, threads = 0;
    double epsilon = 1e-6, gamma_override = 0.0;
    bool in_place = false;
    std::vector<int> s0_list{0};
    auto* solve = app.add_subcommand("solve", "Solve a system (regret, mdp or robust)");
    solve->add_option("--system", solve_system, "system JSON file")->required();
    solve->add_option("--mode", solve_mode, "regret | mdp | robust")
        ->check(CLI::IsMember({"regret", "mdp", "robust"}));
    solve->add_option("--k", k, "lookahead depth (regret mode)");
    solve->add_option("--epsilon", epsilon, "certification target");
    solve->add_option("--max-sweeps", max_sweeps, "sweep cap");
    auto* gamma_opt = solve->add_option("--gamma", gamma_override, "override the discount factor");
    solve->add_flag("--in-place", in_place, "single-threaded in-place sweeps");
    solve->add_option("--threads", threads, "solver threads (0 = all cores)");
    solve->add_option("--dist", dist_path,
                      "disturbance distribution JSON (required for mdp mode)");
    solve->add_option("--s0", s0_list, "initial states to report regret for");
    solve->add_option("--out", solve_out, "artifact output path");

    // solve-finite
    std::string finite_system, finite_out;
    int finite_k = 1, finite_horizon = 10, finite_threads = 0;
    std::vector<int> finite_s0{0};
    auto* finite = app.add_subcommand("solve-finite", "Finite-horizon regret solver");
    finite->add_option("--system", finite_system, "system JSON file")->required();
    finite->add_option("--k", finite_k, "lookahead depth");
    finite->add_option("--horizon", finite_horizon, "horizon T (> k)")->required();
    finite->add_option("--threads", finite_threads, "solver threads");
    finite->add_option("--s0", finite_s0, "initial states to report regret for");
    finite->add_option("--out", finite_out, "artifact output path");

    // simulate
    std::string sim_system, sim_artifact, sim_model = "poisson", sim_regime = "low", sim_out;
    double sim_lambda = 5.0, sim_lambda_low = 4.0, sim_lambda_high = 7.0, sim_persistence = 0.9;
    int sim_horizon = 1000, sim_s0 = 0;
    std::uint64_t sim_seed = 1;
    auto* simulate = app.add_subcommand("simulate",
                                        "Roll a solved controller on sampled disturbances");
    simulate->add_option("--system", sim_system, "system JSON file")->required();
    simulate->add_option("--artifact", sim_artifact, "solve artifact")->required();
    simulate->add_option("--model", sim_model, "poisson | hmm")
        ->check(CLI::IsMember({"poisson", "hmm"}));
    simulate->add_option("--lambda", sim_lambda, "poisson rate");
    simulate->add_option("--lambda-low", sim_lambda_low, "hmm low-regime rate");
    simulate->add_option("--lambda-high", sim_lambda_high, "hmm high-regime rate");
    simulate->add_option("--persistence", sim_persistence, "hmm stay probability");
    simulate->add_option("--initial-regime", sim_regime, "low | high")
        ->check(CLI::IsMember({"low", "high"}));
    simulate->add_option("--horizon", sim_horizon, "steps to simulate");
    simulate->add_option("--seed", sim_seed, "sampling seed");
    simulate->add_option("--s0", sim_s0, "initial state");
    simulate->add_option("--out", sim_out, "trajectory CSV path")->required();

    // experiment
    std::string config_path, experiment_out;
    auto* experiment = app.add_subcommand("experiment", "Run an experiment configuration");
    experiment->add_option("--config", config_path, "experiment JSON config")->required();
    experiment->add_option("--out", experiment_out,
                           "output directory (overrides the config's \"output\")");

    // verify
    int v_states = 3, v_actions = 3, v_disturbances = 3, v_k = 2, v_horizon = 5, v_cell = 5;
    int v_threads = 0;
    double v_tolerance = 1e-9;
    std::uint64_t v_seed = 20260810;
    auto* verify = app.add_subcommand("verify", "Run the verification suites");
    verify->add_option("--max-states", v_states, "grid bound on |S|");
    verify->add_option("--max-actions", v_actions, "grid bound on |A|");
    verify->add_option("--max-disturbances", v_disturbances, "grid bound on |W|");
    verify->add_option("--k-max", v_k, "largest lookahead");
    verify->add_option("--horizon-max", v_horizon, "largest horizon");
    verify->add_option("--systems-per-cell", v_cell, "random systems per grid cell");
    verify->add_option("--tolerance", v_tolerance, "suite tolerance");
    verify->add_option("--seed", v_seed, "suite seed");
    verify->add_option("--threads", v_threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(system_path);
        if (gen->parsed()) {
            return cmd_inventory_gen(s_max, a_max, w_max, holding, penalty, gamma, gen_out);
        }
        if (solve->parsed()) {
            if (solve_mode == "mdp" && dist_path.empty()) {
                std::cerr << "error: mdp mode requires --dist <distribution file>\n";
                return 1;
            }
            return cmd_solve(solve_system, solve_mode, k, epsilon, max_sweeps, gamma_override,
                             gamma_opt->count() > 0, in_place, threads, dist_path, s0_list,
                             solve_out);
        }
        if (finite->parsed()) {
            return cmd_solve_finite(finite_system, finite_k, finite_horizon, finite_threads,
                                    finite_s0, finite_out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_system, sim_artifact, sim_model, sim_lambda, sim_lambda_low,
                                sim_lambda_high, sim_persistence, sim_regime, sim_horizon,
                                sim_seed, sim_s0, sim_out);
        }
        if (experiment->parsed()) return cmd_experiment(config_path, experiment_out);
        if (verify->parsed()) {
            return cmd_verify(v_states, v_actions, v_disturbances, v_k, v_horizon, v_cell,
                              v_tolerance, v_seed, v_threads);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
