#include "artifact.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace regret {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kArtifactVersion = 1;

void check_hash(const ValidatedSystem& system, const json& j) {
    const std::uint64_t expected = j.at("system_hash").get<std::uint64_t>();
    const std::uint64_t actual = system_hash(system.spec());
    if (expected != actual) {
        throw ValidationError("artifact was solved for a different system (hash mismatch)");
    }
}

ordered_json header(const std::string& type, const ValidatedSystem& system) {
    ordered_json j;
    j["artifact_version"] = kArtifactVersion;
    j["type"] = type;
    j["system_hash"] = system_hash(system.spec());
    j["gamma"] = system->gamma;
    return j;
}

} // namespace

std::string save_solution(const AnySolution& solution) {
    ordered_json j;
    if (const auto* d = std::get_if<std::shared_ptr<const DiscountedSolution>>(&solution)) {
        const DiscountedSolution& sol = **d;
        j = header("regret_discounted", *sol.system);
        j["k"] = sol.config.k;
        j["epsilon"] = sol.config.epsilon;
        j["sweep_mode"] =
            sol.config.sweep_mode == SweepMode::in_place ? "in_place" : "synchronous";
        j["converged"] = sol.solve.converged;
        j["sweeps_used"] = sol.solve.sweeps_used;
        j["error_bound"] = sol.solve.error_bound;
        j["values"] = sol.solve.table.values;
        j["policy"] = sol.policy.actions;
    } else if (const auto* f = std::get_if<std::shared_ptr<const FiniteSolution>>(&solution)) {
        const FiniteSolution& sol = **f;
        j = header("regret_finite", *sol.system);
        j["k"] = sol.config.k;
        j["horizon"] = sol.config.horizon;
        j["tail"] = sol.stack.tail.values;
        j["stage_values"] = sol.stack.stage_values;
        j["stage_selectors"] = sol.stack.stage_selectors;
    } else {
        const BaselineSolution& sol = **std::get_if<std::shared_ptr<const BaselineSolution>>(
            &solution);
        j = header(sol.kind, *sol.system);
        j["id"] = sol.id;
        j["epsilon"] = sol.epsilon;
        j["converged"] = sol.policy.converged;
        j["sweeps_used"] = sol.policy.sweeps_used;
        j["error_bound"] = sol.policy.error_bound;
        j["values"] = sol.policy.values;
        j["actions"] = sol.policy.actions;
        if (!sol.distribution.p.empty()) j["distribution"] = sol.distribution.p;
    }
    return j.dump() + "\n";
}

AnySolution load_solution(std::shared_ptr<const ValidatedSystem> system,
                          const std::string& text) {
    if (!system) throw ValidationError("null system");
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        if (j.at("artifact_version").get<int>() != kArtifactVersion) {
            throw ParseError("unsupported artifact version");
        }
        check_hash(*system, j);
        const std::string type = j.at("type").get<std::string>();
        if (type == "regret_discounted") {
            auto sol = std::make_shared<DiscountedSolution>();
            sol->system = system;
            sol->config.k = j.at("k").get<int>();
            sol->config.epsilon = j.at("epsilon").get<double>();
            sol->config.sweep_mode = j.at("sweep_mode").get<std::string>() == "in_place"
                                         ? SweepMode::in_place
                                         : SweepMode::synchronous;
            sol->solve.converged = j.at("converged").get<bool>();
            sol->solve.sweeps_used = j.at("sweeps_used").get<int>();
            sol->solve.error_bound = j.at("error_bound").get<double>();
            sol->solve.table.k = sol->config.k;
            sol->solve.table.gamma = (*system)->gamma;
            sol->solve.table.residual_bound = sol->solve.error_bound;
            sol->solve.table.values = j.at("values").get<std::vector<double>>();
            sol->policy.k = sol->config.k;
            sol->policy.actions = j.at("policy").get<std::vector<int>>();
            return AnySolution(std::shared_ptr<const DiscountedSolution>(std::move(sol)));
        }
        if (type == "regret_finite") {
            auto sol = std::make_shared<FiniteSolution>();
            sol->system = system;
            sol->config.k = j.at("k").get<int>();
            sol->config.horizon = j.at("horizon").get<int>();
            sol->stack.k = sol->config.k;
            sol->stack.horizon = sol->config.horizon;
            sol->stack.tail.k = sol->config.k;
            sol->stack.tail.values = j.at("tail").get<std::vector<double>>();
            sol->stack.stage_values =
                j.at("stage_values").get<std::vector<std::vector<double>>>();
            sol->stack.stage_selectors =
                j.at("stage_selectors").get<std::vector<std::vector<int>>>();
            return AnySolution(std::shared_ptr<const FiniteSolution>(std::move(sol)));
        }
        if (type == "mdp" || type == "robust") {
            auto sol = std::make_shared<BaselineSolution>();
            sol->system = system;
            sol->kind = type;
            sol->id = j.at("id").get<std::string>();
            sol->epsilon = j.at("epsilon").get<double>();
            sol->policy.converged = j.at("converged").get<bool>();
            sol->policy.sweeps_used = j.at("sweeps_used").get<int>();
            sol->policy.error_bound = j.at("error_bound").get<double>();
            sol->policy.values = j.at("values").get<std::vector<double>>();
            sol->policy.actions = j.at("actions").get<std::vector<int>>();
            if (auto it = j.find("distribution"); it != j.end()) {
                sol->distribution.p = it->get<std::vector<double>>();
            }
            return AnySolution(std::shared_ptr<const BaselineSolution>(std::move(sol)));
        }
        throw ParseError("unknown artifact type: " + type);
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema error: ") + e.what());
    }
}

void save_solution_file(const AnySolution& solution, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << save_solution(solution);
    if (!out) throw IoError("write failed: " + path);
}

AnySolution load_solution_file(std::shared_ptr<const ValidatedSystem> system,
                               const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_solution(std::move(system), buf.str());
}

std::unique_ptr<Controller> make_controller(const AnySolution& solution, int s0) {
    if (const auto* d = std::get_if<std::shared_ptr<const DiscountedSolution>>(&solution)) {
        return std::make_unique<RegretController>(*d, s0);
    }
    if (const auto* f = std::get_if<std::shared_ptr<const FiniteSolution>>(&solution)) {
        return std::make_unique<FiniteRegretController>(*f, s0);
    }
    const auto& b = *std::get_if<std::shared_ptr<const BaselineSolution>>(&solution);
    auto controller = std::make_unique<StatePolicyController>((*b).system, (*b).policy, (*b).id);
    controller->reset(s0);
    return controller;
}

double solution_regret(const AnySolution& solution, int s0) {
    if (const auto* d = std::get_if<std::shared_ptr<const DiscountedSolution>>(&solution)) {
        const DiscountedSolution& sol = **d;
        return prefix_dp(*sol.system, sol.config.k, sol.solve.table, s0).regret;
    }
    if (const auto* f = std::get_if<std::shared_ptr<const FiniteSolution>>(&solution)) {
        const FiniteSolution& sol = **f;
        return finite_prefix_dp(*sol.system, sol.config, sol.stack, s0).regret;
    }
    throw ValidationError("baseline artifacts have no regret value");
}

} // namespace regret
