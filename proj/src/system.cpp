#include "system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace regret {

namespace {

std::string coord(int s, int a, int w) {
    std::ostringstream os;
    os << "(s=" << s << ", a=" << a << ", w=" << w << ")";
    return os.str();
}

} // namespace

ValidatedSystem validate_system(SystemSpec spec) {
    if (spec.num_states < 1 || spec.num_actions < 1 || spec.num_disturbances < 1) {
        throw ValidationError("alphabet sizes must be positive");
    }
    if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) {
        throw ValidationError("gamma must lie in (0, 1), got " + std::to_string(spec.gamma));
    }
    const std::size_t n = spec.table_size();
    if (spec.transition.size() != n) {
        throw ValidationError("transition table has " + std::to_string(spec.transition.size()) +
                              " entries, expected " + std::to_string(n));
    }
    if (spec.reward.size() != n) {
        throw ValidationError("reward table has " + std::to_string(spec.reward.size()) +
                              " entries, expected " + std::to_string(n));
    }
    double max_abs = 0.0;
    for (int s = 0; s < spec.num_states; ++s) {
        for (int a = 0; a < spec.num_actions; ++a) {
            for (int w = 0; w < spec.num_disturbances; ++w) {
                const int target = spec.next_state(s, a, w);
                if (target < 0 || target >= spec.num_states) {
                    throw ValidationError("out-of-range transition at " + coord(s, a, w) +
                                          ": target " + std::to_string(target) +
                                          " not in [0, " + std::to_string(spec.num_states) + ")");
                }
                const double r = spec.reward_at(s, a, w);
                if (!std::isfinite(r)) {
                    throw ValidationError("non-finite reward at " + coord(s, a, w));
                }
                max_abs = std::max(max_abs, std::abs(r));
            }
        }
    }
    spec.r_max = max_abs;
    if (!spec.labels.empty()) {
        if ((!spec.labels.states.empty() &&
             spec.labels.states.size() != static_cast<std::size_t>(spec.num_states)) ||
            (!spec.labels.actions.empty() &&
             spec.labels.actions.size() != static_cast<std::size_t>(spec.num_actions)) ||
            (!spec.labels.disturbances.empty() &&
             spec.labels.disturbances.size() != static_cast<std::size_t>(spec.num_disturbances))) {
            throw ValidationError("label list sizes do not match the alphabets");
        }
    }
    return ValidatedSystem(std::move(spec));
}

SystemSpec build_inventory_system(const InventoryParams& params) {
    if (params.s_max < 1) throw ValidationError("s_max must be >= 1");
    if (params.a_max < 0 || params.w_max < 0) {
        throw ValidationError("a_max and w_max must be nonnegative");
    }
    if (!(std::isfinite(params.holding_cost) && params.holding_cost >= 0.0)) {
        throw ValidationError("holding cost must be finite and >= 0");
    }
    if (!(std::isfinite(params.penalty) && params.penalty >= 0.0)) {
        throw ValidationError("penalty must be finite and >= 0");
    }
    if (!(params.gamma > 0.0 && params.gamma < 1.0)) {
        throw ValidationError("gamma must lie in (0, 1)");
    }

    SystemSpec spec;
    spec.num_states = params.s_max + 1;
    spec.num_actions = params.a_max + 1;
    spec.num_disturbances = params.w_max + 1;
    spec.gamma = params.gamma;
    spec.transition.resize(spec.table_size());
    spec.reward.resize(spec.table_size());
    for (int s = 0; s <= params.s_max; ++s) {
        for (int a = 0; a <= params.a_max; ++a) {
            for (int w = 0; w <= params.w_max; ++w) {
                const int left = std::max(s - w, 0);
                const int shortage = std::max(w - s, 0);
                spec.transition[spec.entry(s, a, w)] = std::min(left + a, params.s_max);
                spec.reward[spec.entry(s, a, w)] =
                    -(params.holding_cost * left + params.penalty * shortage);
            }
        }
    }
    spec.r_max = validate_system(spec)->r_max;
    return spec;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const json& require_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string("missing field: ") + name);
    return *it;
}

template <typename T>
std::vector<T> parse_table3(const json& arr, const char* name, int d0, int d1, int d2) {
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(d0)) {
        throw ParseError(std::string(name) + ": expected " + std::to_string(d0) + " rows");
    }
    std::vector<T> flat;
    flat.reserve(static_cast<std::size_t>(d0) * d1 * d2);
    for (const auto& row : arr) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(d1)) {
            throw ParseError(std::string(name) + ": expected " + std::to_string(d1) +
                             " entries per state row");
        }
        for (const auto& cell : row) {
            if (!cell.is_array() || cell.size() != static_cast<std::size_t>(d2)) {
                throw ParseError(std::string(name) + ": expected " + std::to_string(d2) +
                                 " entries per action row");
            }
            for (const auto& v : cell) {
                if (!v.is_number()) throw ParseError(std::string(name) + ": non-numeric entry");
                flat.push_back(v.get<T>());
            }
        }
    }
    return flat;
}

template <typename T>
ordered_json dump_table3(const std::vector<T>& flat, int d0, int d1, int d2) {
    ordered_json arr = ordered_json::array();
    std::size_t idx = 0;
    for (int i = 0; i < d0; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < d1; ++j) {
            ordered_json cell = ordered_json::array();
            for (int k = 0; k < d2; ++k) cell.push_back(flat[idx++]);
            row.push_back(std::move(cell));
        }
        arr.push_back(std::move(row));
    }
    return arr;
}

} // namespace

SystemSpec load_system(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        const int version = require_field(j, "version").get<int>();
        if (version != 1) {
            throw ParseError("unsupported schema version " + std::to_string(version));
        }
        SystemSpec spec;
        spec.num_states = require_field(j, "num_states").get<int>();
        spec.num_actions = require_field(j, "num_actions").get<int>();
        spec.num_disturbances = require_field(j, "num_disturbances").get<int>();
        if (spec.num_states < 1 || spec.num_actions < 1 || spec.num_disturbances < 1) {
            throw ParseError("alphabet sizes must be positive");
        }
        spec.gamma = require_field(j, "gamma").get<double>();
        spec.transition = parse_table3<int>(require_field(j, "transition"), "transition",
                                            spec.num_states, spec.num_actions,
                                            spec.num_disturbances);
        spec.reward = parse_table3<double>(require_field(j, "reward"), "reward", spec.num_states,
                                           spec.num_actions, spec.num_disturbances);
        if (auto it = j.find("labels"); it != j.end()) {
            if (auto s = it->find("states"); s != it->end())
                spec.labels.states = s->get<std::vector<std::string>>();
            if (auto a = it->find("actions"); a != it->end())
                spec.labels.actions = a->get<std::vector<std::string>>();
            if (auto w = it->find("disturbances"); w != it->end())
                spec.labels.disturbances = w->get<std::vector<std::string>>();
        }
        spec.r_max = 0.0;
        for (double r : spec.reward) spec.r_max = std::max(spec.r_max, std::abs(r));
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema error: ") + e.what());
    }
}

std::string save_system(const SystemSpec& spec) {
    ordered_json j;
    j["version"] = 1;
    j["num_states"] = spec.num_states;
    j["num_actions"] = spec.num_actions;
    j["num_disturbances"] = spec.num_disturbances;
    j["gamma"] = spec.gamma;
    j["transition"] =
        dump_table3(spec.transition, spec.num_states, spec.num_actions, spec.num_disturbances);
    j["reward"] =
        dump_table3(spec.reward, spec.num_states, spec.num_actions, spec.num_disturbances);
    if (!spec.labels.empty()) {
        ordered_json labels;
        if (!spec.labels.states.empty()) labels["states"] = spec.labels.states;
        if (!spec.labels.actions.empty()) labels["actions"] = spec.labels.actions;
        if (!spec.labels.disturbances.empty()) labels["disturbances"] = spec.labels.disturbances;
        j["labels"] = std::move(labels);
    }
    return j.dump(2) + "\n";
}

SystemSpec load_system_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_system(buf.str());
}

void save_system_file(const SystemSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << save_system(spec);
    if (!out) throw IoError("write failed: " + path);
}

std::uint64_t system_hash(const SystemSpec& spec) {
    const std::string text = save_system(spec);
    std::uint64_t h = 1469598103934665603ull; // FNV-1a 64-bit
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace regret
