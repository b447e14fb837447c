#include "simulate.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace regret {

Trajectory rollout(const ValidatedSystem& sys, Controller& controller, int s0,
                   const std::vector<int>& w_sequence) {
    const SystemSpec& spec = sys.spec();
    if (s0 < 0 || s0 >= spec.num_states) throw ValidationError("s0 out of range");
    for (int w : w_sequence) {
        if (w < 0 || w >= spec.num_disturbances) {
            throw ValidationError("disturbance out of range");
        }
    }
    controller.reset(s0);
    Trajectory traj;
    traj.steps.reserve(w_sequence.size());
    int s = s0;
    double gamma_t = 1.0;
    for (int w : w_sequence) {
        const int a = controller.act();
        const double r = spec.reward_at(s, a, w);
        traj.steps.push_back({s, a, w, r});
        traj.discounted_return += gamma_t * r;
        traj.undiscounted_return += r;
        gamma_t *= spec.gamma;
        s = spec.next_state(s, a, w);
        controller.observe(w);
    }
    return traj;
}

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string ControllerSpec::id() const {
    switch (type) {
    case Type::mdp: return "mdp-" + format_csv_double(lambda);
    case Type::robust: return "robust";
    case Type::regret: return "regret-k" + std::to_string(k);
    case Type::clairvoyant: return "clairvoyant";
    }
    return "unknown";
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ControllerSpec parse_controller(const json& j) {
    ControllerSpec spec;
    const std::string type = j.at("type").get<std::string>();
    if (type == "mdp") {
        spec.type = ControllerSpec::Type::mdp;
        spec.lambda = j.at("lambda").get<double>();
    } else if (type == "robust") {
        spec.type = ControllerSpec::Type::robust;
    } else if (type == "regret") {
        spec.type = ControllerSpec::Type::regret;
        spec.k = j.at("k").get<int>();
    } else if (type == "clairvoyant") {
        spec.type = ControllerSpec::Type::clairvoyant;
    } else {
        throw ParseError("unknown controller type: " + type);
    }
    return spec;
}

ModelSpec parse_model(const json& j, int w_max) {
    ModelSpec spec;
    const std::string type = j.at("type").get<std::string>();
    if (type == "poisson") {
        spec.type = ModelSpec::Type::poisson;
        spec.poisson.lambda = j.at("lambda").get<double>();
        spec.poisson.w_max = w_max;
    } else if (type == "hmm") {
        spec.type = ModelSpec::Type::hmm;
        spec.hmm.lambda_low = j.at("lambda_low").get<double>();
        spec.hmm.lambda_high = j.at("lambda_high").get<double>();
        spec.hmm.persistence = j.at("persistence").get<double>();
        spec.hmm.w_max = w_max;
        if (auto it = j.find("initial_regime"); it != j.end()) {
            const std::string regime = it->get<std::string>();
            if (regime == "low") {
                spec.hmm.initial_regime = Regime::low;
            } else if (regime == "high") {
                spec.hmm.initial_regime = Regime::high;
            } else {
                throw ParseError("initial_regime must be \"low\" or \"high\"");
            }
        }
    } else {
        throw ParseError("unknown model type: " + type);
    }
    return spec;
}

std::string csv_param(bool present, double v) { return present ? format_csv_double(v) : ""; }

struct ModelColumns {
    std::string lambda, lambda_low, lambda_high, persistence;
};

ModelColumns model_columns(const ModelSpec& m) {
    if (m.type == ModelSpec::Type::poisson) {
        return {csv_param(true, m.poisson.lambda), "", "", ""};
    }
    return {"", csv_param(true, m.hmm.lambda_low), csv_param(true, m.hmm.lambda_high),
            csv_param(true, m.hmm.persistence)};
}

} // namespace

ExperimentConfig load_experiment_config(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        ExperimentConfig config;
        if (auto it = j.find("inventory"); it != j.end()) {
            InventoryParams params;
            params.s_max = it->at("s_max").get<int>();
            params.a_max = it->at("a_max").get<int>();
            params.w_max = it->at("w_max").get<int>();
            params.holding_cost = it->at("holding_cost").get<double>();
            params.penalty = it->at("penalty").get<double>();
            params.gamma = it->at("gamma").get<double>();
            config.system = build_inventory_system(params);
        } else if (auto f = j.find("system_file"); f != j.end()) {
            std::filesystem::path path = f->get<std::string>();
            if (path.is_relative() && !base_dir.empty()) {
                path = std::filesystem::path(base_dir) / path;
            }
            config.system = load_system_file(path.string());
        } else {
            throw ParseError("config needs either \"inventory\" or \"system_file\"");
        }
        for (const auto& c : j.at("controllers")) config.controllers.push_back(parse_controller(c));
        const int w_max = config.system.num_disturbances - 1;
        for (const auto& m : j.at("models")) config.models.push_back(parse_model(m, w_max));
        if (config.controllers.empty()) throw ParseError("controller list is empty");
        if (config.models.empty()) throw ParseError("model list is empty");
        config.horizon = j.at("horizon").get<int>();
        if (config.horizon < 1) throw ParseError("horizon must be >= 1");
        config.num_seeds = j.value("seeds", 1);
        if (config.num_seeds < 1) throw ParseError("seeds must be >= 1");
        config.base_seed = j.value("base_seed", std::uint64_t{1});
        config.s0 = j.value("s0", 0);
        config.epsilon = j.value("epsilon", 1e-4);
        config.max_sweeps = j.value("max_sweeps", 200000);
        config.threads = j.value("threads", 0);
        config.output = j.value("output", std::string{});
        return config;
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema error: ") + e.what());
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    auto system = std::make_shared<const ValidatedSystem>(validate_system(config.system));
    const SystemSpec& spec = system->spec();
    if (config.s0 < 0 || config.s0 >= spec.num_states) throw ValidationError("s0 out of range");

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    ExperimentResult result;
    result.all_converged = true;

    // Solve each controller once; regret and robust controllers are
    // model-independent, the MDP baseline is tied to its design rate.
    std::vector<std::unique_ptr<Controller>> controllers(config.controllers.size());
    for (std::size_t i = 0; i < config.controllers.size(); ++i) {
        const ControllerSpec& cs = config.controllers[i];
        ControllerRun run;
        run.id = cs.id();
        switch (cs.type) {
        case ControllerSpec::Type::mdp: {
            DisturbanceDistribution dist{
                truncated_poisson_pmf(cs.lambda, spec.num_disturbances - 1)};
            StatePolicy policy = mdp_value_iteration(*system, dist, config.epsilon,
                                                     config.max_sweeps);
            run.converged = policy.converged;
            run.sweeps_used = policy.sweeps_used;
            if (policy.converged) {
                controllers[i] = std::make_unique<StatePolicyController>(system,
                                                                         std::move(policy),
                                                                         run.id);
            }
            break;
        }
        case ControllerSpec::Type::robust: {
            StatePolicy policy = robust_value_iteration(*system, config.epsilon,
                                                        config.max_sweeps);
            run.converged = policy.converged;
            run.sweeps_used = policy.sweeps_used;
            if (policy.converged) {
                controllers[i] = std::make_unique<StatePolicyController>(system,
                                                                         std::move(policy),
                                                                         run.id);
            }
            break;
        }
        case ControllerSpec::Type::regret: {
            SolverConfig solver;
            solver.k = cs.k;
            solver.epsilon = config.epsilon;
            solver.max_sweeps = config.max_sweeps;
            solver.threads = config.threads;
            auto solution = std::make_shared<const DiscountedSolution>(
                solve_regret_discounted(system, solver));
            run.converged = solution->solve.converged;
            run.sweeps_used = solution->solve.sweeps_used;
            if (solution->solve.converged) {
                controllers[i] = std::make_unique<RegretController>(solution, config.s0);
            }
            break;
        }
        case ControllerSpec::Type::clairvoyant:
            run.converged = true;
            break;
        }
        run.enabled = run.converged;
        if (!run.converged) result.all_converged = false;
        result.controllers.push_back(std::move(run));
    }

    std::ofstream records(dir / "records.csv", std::ios::binary);
    if (!records) throw IoError("cannot open records.csv for writing");
    records << "controller,model,param_lambda,param_lambda_low,param_lambda_high,persistence,"
               "seed,t,reward,cum_reward,avg_reward\n";

    for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
        const ModelSpec& model = config.models[mi];
        const ModelColumns cols = model_columns(model);

        // Sequences depend on (model, seed) only, so every controller in a
        // cell faces the same demand path.
        std::vector<std::vector<int>> sequences(config.num_seeds);
        std::vector<std::uint64_t> seeds(config.num_seeds);
        for (int si = 0; si < config.num_seeds; ++si) {
            seeds[si] = config.base_seed + static_cast<std::uint64_t>(si);
            if (model.type == ModelSpec::Type::poisson) {
                sequences[si] = sample_iid(model.poisson, config.horizon, seeds[si]);
            } else {
                sequences[si] = sample_hmm(model.hmm, config.horizon, seeds[si]).w;
            }
        }

        for (std::size_t ci = 0; ci < config.controllers.size(); ++ci) {
            if (!result.controllers[ci].enabled) continue;
            const ControllerSpec& cs = config.controllers[ci];
            CellResult cell;
            cell.controller_index = static_cast<int>(ci);
            cell.model_index = static_cast<int>(mi);
            for (int si = 0; si < config.num_seeds; ++si) {
                std::vector<double> rewards(static_cast<std::size_t>(config.horizon));
                if (cs.type == ControllerSpec::Type::clairvoyant) {
                    PathPlan plan =
                        clairvoyant_path_value(*system, config.s0, sequences[si], false);
                    int s = config.s0;
                    for (int t = 0; t < config.horizon; ++t) {
                        rewards[t] = spec.reward_at(s, plan.actions[t], sequences[si][t]);
                        s = spec.next_state(s, plan.actions[t], sequences[si][t]);
                    }
                } else {
                    Trajectory traj = rollout(*system, *controllers[ci], config.s0,
                                              sequences[si]);
                    for (int t = 0; t < config.horizon; ++t) rewards[t] = traj.steps[t].reward;
                }
                double cum = 0.0;
                for (int t = 0; t < config.horizon; ++t) {
                    cum += rewards[t];
                    records << result.controllers[ci].id << ',' << model.name() << ','
                            << cols.lambda << ',' << cols.lambda_low << ',' << cols.lambda_high
                            << ',' << cols.persistence << ',' << seeds[si] << ',' << t << ','
                            << format_csv_double(rewards[t]) << ',' << format_csv_double(cum)
                            << ',' << format_csv_double(cum / (t + 1)) << '\n';
                }
                cell.final_avg_rewards.push_back(cum / config.horizon);
            }
            double mean = 0.0;
            for (double v : cell.final_avg_rewards) mean += v;
            mean /= cell.final_avg_rewards.size();
            double var = 0.0;
            for (double v : cell.final_avg_rewards) var += (v - mean) * (v - mean);
            const std::size_t n = cell.final_avg_rewards.size();
            cell.mean = mean;
            cell.stderr_mean = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
            result.cells.push_back(std::move(cell));
        }
    }
    records.close();
    if (!records) throw IoError("write failed: records.csv");

    std::ofstream aggregate(dir / "aggregate.csv", std::ios::binary);
    if (!aggregate) throw IoError("cannot open aggregate.csv for writing");
    aggregate << "controller,model,param_lambda,param_lambda_low,param_lambda_high,persistence,"
                 "mean_avg_reward,stderr_avg_reward,n_seeds\n";
    for (const CellResult& cell : result.cells) {
        const ModelColumns cols = model_columns(config.models[cell.model_index]);
        aggregate << result.controllers[cell.controller_index].id << ','
                  << config.models[cell.model_index].name() << ',' << cols.lambda << ','
                  << cols.lambda_low << ',' << cols.lambda_high << ',' << cols.persistence << ','
                  << format_csv_double(cell.mean) << ',' << format_csv_double(cell.stderr_mean)
                  << ',' << cell.final_avg_rewards.size() << '\n';
    }
    aggregate.close();
    if (!aggregate) throw IoError("write failed: aggregate.csv");

    ordered_json manifest;
    manifest["tool"] = "regretctl";
    manifest["system_hash"] = system_hash(spec);
    manifest["horizon"] = config.horizon;
    manifest["seeds"] = ordered_json::array();
    for (int si = 0; si < config.num_seeds; ++si) {
        manifest["seeds"].push_back(config.base_seed + static_cast<std::uint64_t>(si));
    }
    manifest["s0"] = config.s0;
    manifest["epsilon"] = config.epsilon;
    manifest["max_sweeps"] = config.max_sweeps;
    manifest["controllers"] = ordered_json::array();
    for (const ControllerRun& run : result.controllers) {
        ordered_json c;
        c["id"] = run.id;
        c["converged"] = run.converged;
        c["sweeps_used"] = run.sweeps_used;
        manifest["controllers"].push_back(std::move(c));
    }
    manifest["models"] = ordered_json::array();
    for (const ModelSpec& model : config.models) {
        ordered_json m;
        m["type"] = model.name();
        if (model.type == ModelSpec::Type::poisson) {
            m["lambda"] = model.poisson.lambda;
        } else {
            m["lambda_low"] = model.hmm.lambda_low;
            m["lambda_high"] = model.hmm.lambda_high;
            m["persistence"] = model.hmm.persistence;
            m["initial_regime"] = model.hmm.initial_regime == Regime::low ? "low" : "high";
        }
        manifest["models"].push_back(std::move(m));
    }
    manifest["outputs"] = {"records.csv", "aggregate.csv"};
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    if (!mf) throw IoError("cannot open manifest.json for writing");
    mf << manifest.dump(2) << "\n";

    return result;
}

} // namespace regret
