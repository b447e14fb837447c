#include "regret.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "artifact.hpp"
#include "disturbance.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "simulate.hpp"
#include "system.hpp"
#include "verify.hpp"

struct rc_system {
    std::shared_ptr<const regret::ValidatedSystem> sys;
};

struct rc_solution {
    regret::AnySolution solution;
    bool converged = true;
    int sweeps = 0;
    double error_bound = 0.0;
};

struct rc_controller {
    std::unique_ptr<regret::Controller> controller;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
rc_status guarded(Fn&& fn) noexcept {
    try {
        return fn();
    } catch (const regret::ParseError& e) {
        set_error(e.what());
        return RC_ERROR_PARSE;
    } catch (const regret::GuardError& e) {
        set_error(e.what());
        return RC_ERROR_GUARD_EXCEEDED;
    } catch (const regret::HorizonError& e) {
        set_error(e.what());
        return RC_ERROR_HORIZON_EXHAUSTED;
    } catch (const regret::IoError& e) {
        set_error(e.what());
        return RC_ERROR_IO;
    } catch (const regret::ValidationError& e) {
        set_error(e.what());
        return RC_ERROR_VALIDATION;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return RC_ERROR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return RC_ERROR_INTERNAL;
    }
}

rc_status require(bool ok, const char* message) {
    if (!ok) {
        set_error(message);
        return RC_ERROR_INVALID_ARGUMENT;
    }
    return RC_OK;
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

rc_solution* wrap_baseline(std::shared_ptr<const regret::ValidatedSystem> sys,
                           const std::string& kind, const std::string& id,
                           regret::StatePolicy policy, double epsilon,
                           regret::DisturbanceDistribution dist) {
    auto baseline = std::make_shared<regret::BaselineSolution>();
    baseline->system = std::move(sys);
    baseline->kind = kind;
    baseline->id = id;
    baseline->epsilon = epsilon;
    baseline->distribution = std::move(dist);
    baseline->policy = std::move(policy);
    auto* handle = new rc_solution;
    handle->converged = baseline->policy.converged;
    handle->sweeps = baseline->policy.sweeps_used;
    handle->error_bound = baseline->policy.error_bound;
    handle->solution =
        regret::AnySolution(std::shared_ptr<const regret::BaselineSolution>(baseline));
    return handle;
}

} // namespace

extern "C" {

const char* rc_version(void) { return "0.1.0"; }

const char* rc_status_name(rc_status status) {
    switch (status) {
    case RC_OK: return "ok";
    case RC_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case RC_ERROR_PARSE: return "parse error";
    case RC_ERROR_VALIDATION: return "validation error";
    case RC_ERROR_IO: return "io error";
    case RC_ERROR_NOT_CONVERGED: return "not converged";
    case RC_ERROR_GUARD_EXCEEDED: return "enumeration guard exceeded";
    case RC_ERROR_HORIZON_EXHAUSTED: return "horizon exhausted";
    case RC_ERROR_VERIFY_FAILED: return "verification failed";
    case RC_ERROR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* rc_last_error(void) { return g_last_error.c_str(); }

void rc_string_free(char* text) { delete[] text; }

rc_status rc_system_load_json(const char* text, rc_system** out) {
    if (rc_status s = require(text && out, "text and out must be non-null")) return s;
    return guarded([&] {
        auto sys = std::make_shared<const regret::ValidatedSystem>(
            regret::validate_system(regret::load_system(text)));
        *out = new rc_system{std::move(sys)};
        return RC_OK;
    });
}

rc_status rc_system_load_file(const char* path, rc_system** out) {
    if (rc_status s = require(path && out, "path and out must be non-null")) return s;
    return guarded([&] {
        auto sys = std::make_shared<const regret::ValidatedSystem>(
            regret::validate_system(regret::load_system_file(path)));
        *out = new rc_system{std::move(sys)};
        return RC_OK;
    });
}

rc_status rc_system_save_json(const rc_system* system, char** out) {
    if (rc_status s = require(system && out, "system and out must be non-null")) return s;
    return guarded([&] {
        *out = copy_string(regret::save_system(system->sys->spec()));
        return RC_OK;
    });
}

rc_status rc_system_save_file(const rc_system* system, const char* path) {
    if (rc_status s = require(system && path, "system and path must be non-null")) return s;
    return guarded([&] {
        regret::save_system_file(system->sys->spec(), path);
        return RC_OK;
    });
}

rc_status rc_system_build_inventory(int s_max, int a_max, int w_max, double holding_cost,
                                    double penalty, double gamma, rc_system** out) {
    if (rc_status s = require(out != nullptr, "out must be non-null")) return s;
    return guarded([&] {
        regret::InventoryParams params{s_max, a_max, w_max, holding_cost, penalty, gamma};
        auto sys = std::make_shared<const regret::ValidatedSystem>(
            regret::validate_system(regret::build_inventory_system(params)));
        *out = new rc_system{std::move(sys)};
        return RC_OK;
    });
}

rc_status rc_system_override_gamma(const rc_system* system, double gamma, rc_system** out) {
    if (rc_status s = require(system && out, "system and out must be non-null")) return s;
    return guarded([&] {
        regret::SystemSpec spec = system->sys->spec();
        spec.gamma = gamma;
        auto sys = std::make_shared<const regret::ValidatedSystem>(
            regret::validate_system(std::move(spec)));
        *out = new rc_system{std::move(sys)};
        return RC_OK;
    });
}

void rc_system_free(rc_system* system) { delete system; }

int rc_system_num_states(const rc_system* system) {
    return system ? (*system->sys)->num_states : 0;
}
int rc_system_num_actions(const rc_system* system) {
    return system ? (*system->sys)->num_actions : 0;
}
int rc_system_num_disturbances(const rc_system* system) {
    return system ? (*system->sys)->num_disturbances : 0;
}
double rc_system_gamma(const rc_system* system) {
    return system ? (*system->sys)->gamma : 0.0;
}
double rc_system_r_max(const rc_system* system) {
    return system ? (*system->sys)->r_max : 0.0;
}
uint64_t rc_system_hash(const rc_system* system) {
    return system ? regret::system_hash(system->sys->spec()) : 0;
}

rc_status rc_system_next_state(const rc_system* system, int s, int a, int w, int* out) {
    if (rc_status st = require(system && out, "system and out must be non-null")) return st;
    const regret::SystemSpec& spec = system->sys->spec();
    if (rc_status st = require(s >= 0 && s < spec.num_states && a >= 0 &&
                                   a < spec.num_actions && w >= 0 && w < spec.num_disturbances,
                               "index out of range")) {
        return st;
    }
    *out = spec.next_state(s, a, w);
    return RC_OK;
}

rc_status rc_system_reward(const rc_system* system, int s, int a, int w, double* out) {
    if (rc_status st = require(system && out, "system and out must be non-null")) return st;
    const regret::SystemSpec& spec = system->sys->spec();
    if (rc_status st = require(s >= 0 && s < spec.num_states && a >= 0 &&
                                   a < spec.num_actions && w >= 0 && w < spec.num_disturbances,
                               "index out of range")) {
        return st;
    }
    *out = spec.reward_at(s, a, w);
    return RC_OK;
}

void rc_solve_options_init(rc_solve_options* options) {
    if (!options) return;
    options->k = 1;
    options->epsilon = 1e-6;
    options->max_sweeps = 200000;
    options->in_place = 0;
    options->accelerate = 1;
    options->threads = 0;
}

rc_status rc_solve_regret(const rc_system* system, const rc_solve_options* options,
                          rc_solution** out) {
    if (rc_status s = require(system && options && out, "arguments must be non-null")) return s;
    return guarded([&]() -> rc_status {
        regret::SolverConfig config;
        config.k = options->k;
        config.epsilon = options->epsilon;
        config.max_sweeps = options->max_sweeps;
        config.sweep_mode =
            options->in_place ? regret::SweepMode::in_place : regret::SweepMode::synchronous;
        config.accelerate = options->accelerate != 0;
        config.threads = options->threads;
        auto solution = std::make_shared<const regret::DiscountedSolution>(
            regret::solve_regret_discounted(system->sys, config));
        auto* handle = new rc_solution;
        handle->converged = solution->solve.converged;
        handle->sweeps = solution->solve.sweeps_used;
        handle->error_bound = solution->solve.error_bound;
        handle->solution = regret::AnySolution(solution);
        *out = handle;
        if (!handle->converged) {
            set_error("fixed-point certification not reached within max_sweeps");
            return RC_ERROR_NOT_CONVERGED;
        }
        return RC_OK;
    });
}

rc_status rc_solve_regret_finite(const rc_system* system, int k, int horizon, int threads,
                                 rc_solution** out) {
    if (rc_status s = require(system && out, "system and out must be non-null")) return s;
    return guarded([&] {
        regret::FiniteSolverConfig config{k, horizon, threads};
        auto solution = std::make_shared<const regret::FiniteSolution>(
            regret::solve_regret_finite(system->sys, config));
        auto* handle = new rc_solution;
        handle->solution = regret::AnySolution(solution);
        *out = handle;
        return RC_OK;
    });
}

rc_status rc_solve_mdp(const rc_system* system, const double* distribution, int length,
                       double epsilon, rc_solution** out) {
    if (rc_status s = require(system && distribution && out, "arguments must be non-null")) {
        return s;
    }
    return guarded([&]() -> rc_status {
        regret::DisturbanceDistribution dist;
        dist.p.assign(distribution, distribution + length);
        regret::StatePolicy policy = regret::mdp_value_iteration(*system->sys, dist, epsilon);
        auto* handle =
            wrap_baseline(system->sys, "mdp", "mdp", std::move(policy), epsilon, dist);
        *out = handle;
        if (!handle->converged) {
            set_error("value iteration did not certify within max_sweeps");
            return RC_ERROR_NOT_CONVERGED;
        }
        return RC_OK;
    });
}

rc_status rc_solve_robust(const rc_system* system, double epsilon, rc_solution** out) {
    if (rc_status s = require(system && out, "system and out must be non-null")) return s;
    return guarded([&]() -> rc_status {
        regret::StatePolicy policy = regret::robust_value_iteration(*system->sys, epsilon);
        auto* handle = wrap_baseline(system->sys, "robust", "robust", std::move(policy), epsilon,
                                     {});
        *out = handle;
        if (!handle->converged) {
            set_error("value iteration did not certify within max_sweeps");
            return RC_ERROR_NOT_CONVERGED;
        }
        return RC_OK;
    });
}

void rc_solution_free(rc_solution* solution) { delete solution; }

rc_status rc_solution_regret(const rc_solution* solution, int s0, double* out) {
    if (rc_status s = require(solution && out, "solution and out must be non-null")) return s;
    return guarded([&] {
        *out = regret::solution_regret(solution->solution, s0);
        return RC_OK;
    });
}

const char* rc_solution_kind(const rc_solution* solution) {
    if (!solution) return "null";
    if (std::holds_alternative<std::shared_ptr<const regret::DiscountedSolution>>(
            solution->solution)) {
        return "regret_discounted";
    }
    if (std::holds_alternative<std::shared_ptr<const regret::FiniteSolution>>(
            solution->solution)) {
        return "regret_finite";
    }
    const auto& baseline =
        *std::get<std::shared_ptr<const regret::BaselineSolution>>(solution->solution);
    return baseline.kind == "mdp" ? "mdp" : "robust";
}

int rc_solution_converged(const rc_solution* solution) {
    return solution && solution->converged ? 1 : 0;
}
int rc_solution_sweeps(const rc_solution* solution) { return solution ? solution->sweeps : 0; }
double rc_solution_error_bound(const rc_solution* solution) {
    return solution ? solution->error_bound : 0.0;
}

rc_status rc_solution_save_file(const rc_solution* solution, const char* path) {
    if (rc_status s = require(solution && path, "solution and path must be non-null")) return s;
    return guarded([&] {
        regret::save_solution_file(solution->solution, path);
        return RC_OK;
    });
}

rc_status rc_solution_load_file(const rc_system* system, const char* path, rc_solution** out) {
    if (rc_status s = require(system && path && out, "arguments must be non-null")) return s;
    return guarded([&] {
        auto* handle = new rc_solution;
        handle->solution = regret::load_solution_file(system->sys, path);
        if (const auto* d = std::get_if<std::shared_ptr<const regret::DiscountedSolution>>(
                &handle->solution)) {
            handle->converged = (*d)->solve.converged;
            handle->sweeps = (*d)->solve.sweeps_used;
            handle->error_bound = (*d)->solve.error_bound;
        } else if (const auto* b = std::get_if<std::shared_ptr<const regret::BaselineSolution>>(
                       &handle->solution)) {
            handle->converged = (*b)->policy.converged;
            handle->sweeps = (*b)->policy.sweeps_used;
            handle->error_bound = (*b)->policy.error_bound;
        }
        *out = handle;
        return RC_OK;
    });
}

rc_status rc_controller_create(const rc_solution* solution, int s0, rc_controller** out) {
    if (rc_status s = require(solution && out, "solution and out must be non-null")) return s;
    return guarded([&] {
        *out = new rc_controller{regret::make_controller(solution->solution, s0)};
        return RC_OK;
    });
}

rc_status rc_controller_reset(rc_controller* controller, int s0) {
    if (rc_status s = require(controller != nullptr, "controller must be non-null")) return s;
    return guarded([&] {
        controller->controller->reset(s0);
        return RC_OK;
    });
}

rc_status rc_controller_act(rc_controller* controller, int* action) {
    if (rc_status s = require(controller && action, "arguments must be non-null")) return s;
    return guarded([&] {
        *action = controller->controller->act();
        return RC_OK;
    });
}

rc_status rc_controller_observe(rc_controller* controller, int w) {
    if (rc_status s = require(controller != nullptr, "controller must be non-null")) return s;
    return guarded([&] {
        controller->controller->observe(w);
        return RC_OK;
    });
}

void rc_controller_free(rc_controller* controller) { delete controller; }

rc_status rc_sample_poisson(double lambda, int w_max, int n, uint64_t seed, int* out) {
    if (rc_status s = require(out != nullptr || n == 0, "out must be non-null")) return s;
    return guarded([&] {
        const std::vector<int> w = regret::sample_iid({lambda, w_max}, n, seed);
        std::copy(w.begin(), w.end(), out);
        return RC_OK;
    });
}

rc_status rc_sample_hmm(double lambda_low, double lambda_high, double persistence,
                        int initial_high, int w_max, int n, uint64_t seed, int* w_out,
                        int* regimes_out) {
    if (rc_status s = require(w_out != nullptr || n == 0, "w_out must be non-null")) return s;
    return guarded([&] {
        regret::HmmModel model{lambda_low, lambda_high, persistence,
                               initial_high ? regret::Regime::high : regret::Regime::low, w_max};
        const regret::HmmSample sample = regret::sample_hmm(model, n, seed);
        std::copy(sample.w.begin(), sample.w.end(), w_out);
        if (regimes_out) std::copy(sample.regime.begin(), sample.regime.end(), regimes_out);
        return RC_OK;
    });
}

rc_status rc_rollout(const rc_system* system, rc_controller* controller, int s0, const int* w,
                     int n, int* states, int* actions, double* rewards, double* discounted,
                     double* undiscounted) {
    if (rc_status s = require(system && controller && (w || n == 0), "arguments must be non-null")) {
        return s;
    }
    return guarded([&] {
        const std::vector<int> sequence(w, w + n);
        const regret::Trajectory traj =
            regret::rollout(*system->sys, *controller->controller, s0, sequence);
        for (int t = 0; t < n; ++t) {
            if (states) states[t] = traj.steps[t].s;
            if (actions) actions[t] = traj.steps[t].a;
            if (rewards) rewards[t] = traj.steps[t].reward;
        }
        if (discounted) *discounted = traj.discounted_return;
        if (undiscounted) *undiscounted = traj.undiscounted_return;
        return RC_OK;
    });
}

rc_status rc_run_experiment(const char* config_json, const char* base_dir, const char* out_dir,
                            char** summary_json_out) {
    if (rc_status s = require(config_json && out_dir, "config and out_dir must be non-null")) {
        return s;
    }
    return guarded([&]() -> rc_status {
        const regret::ExperimentConfig config =
            regret::load_experiment_config(config_json, base_dir ? base_dir : "");
        const regret::ExperimentResult result = regret::run_experiment(config, out_dir);
        if (summary_json_out) {
            nlohmann::ordered_json summary;
            summary["all_converged"] = result.all_converged;
            summary["controllers"] = nlohmann::ordered_json::array();
            for (const regret::ControllerRun& run : result.controllers) {
                nlohmann::ordered_json c;
                c["id"] = run.id;
                c["converged"] = run.converged;
                c["sweeps_used"] = run.sweeps_used;
                summary["controllers"].push_back(std::move(c));
            }
            *summary_json_out = copy_string(summary.dump(2) + "\n");
        }
        if (!result.all_converged) {
            set_error("at least one controller failed to converge");
            return RC_ERROR_NOT_CONVERGED;
        }
        return RC_OK;
    });
}

rc_status rc_run_verification(const char* options_json, char** report_json_out) {
    if (rc_status s = require(report_json_out != nullptr, "report output must be non-null")) {
        return s;
    }
    return guarded([&]() -> rc_status {
        regret::VerifyOptions options;
        if (options_json && *options_json) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(options_json);
            } catch (const nlohmann::json::parse_error& e) {
                throw regret::ParseError(std::string("invalid options JSON: ") + e.what());
            }
            options.max_states = j.value("max_states", options.max_states);
            options.max_actions = j.value("max_actions", options.max_actions);
            options.max_disturbances = j.value("max_disturbances", options.max_disturbances);
            options.k_max = j.value("k_max", options.k_max);
            options.horizon_max = j.value("horizon_max", options.horizon_max);
            options.systems_per_cell = j.value("systems_per_cell", options.systems_per_cell);
            options.tolerance = j.value("tolerance", options.tolerance);
            options.contraction_systems =
                j.value("contraction_systems", options.contraction_systems);
            options.contraction_pairs = j.value("contraction_pairs", options.contraction_pairs);
            options.decomposition_systems =
                j.value("decomposition_systems", options.decomposition_systems);
            options.decomposition_trials =
                j.value("decomposition_trials", options.decomposition_trials);
            options.seed = j.value("seed", options.seed);
            options.threads = j.value("threads", options.threads);
        }
        const regret::VerifyReport report = regret::run_verification(options);
        *report_json_out = copy_string(report.to_json());
        if (!report.all_passed) {
            set_error("one or more verification suites failed");
            return RC_ERROR_VERIFY_FAILED;
        }
        return RC_OK;
    });
}

} // extern "C"
