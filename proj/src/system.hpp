#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace regret {

struct Labels {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::string> disturbances;

    bool empty() const { return states.empty() && actions.empty() && disturbances.empty(); }
};

/**
 * Finite disturbance-driven system: deterministic dynamics s' = f(s, a, w)
 * over index alphabets S, A, W, a bounded reward table r(s, a, w) and a
 * discount factor gamma in (0, 1).
 *
 * Tables are dense and row-major in (s, a, w) order. r_max is the attained
 * maximum of |reward| and is recomputed by validation, never trusted from
 * input.
 */
struct SystemSpec {
    int num_states = 0;
    int num_actions = 0;
    int num_disturbances = 0;
    double gamma = 0.0;
    std::vector<int> transition; // [s][a][w] -> next state
    std::vector<double> reward;  // [s][a][w] -> reward
    double r_max = 0.0;
    Labels labels;

    std::size_t table_size() const {
        return static_cast<std::size_t>(num_states) * num_actions * num_disturbances;
    }
    std::size_t entry(int s, int a, int w) const {
        return (static_cast<std::size_t>(s) * num_actions + a) * num_disturbances + w;
    }
    int next_state(int s, int a, int w) const { return transition[entry(s, a, w)]; }
    double reward_at(int s, int a, int w) const { return reward[entry(s, a, w)]; }
};

/// A SystemSpec whose invariants have been checked. Immutable after
/// construction; safe for concurrent reads from any number of solver threads.
class ValidatedSystem {
  public:
    const SystemSpec& spec() const { return spec_; }
    const SystemSpec* operator->() const { return &spec_; }

  private:
    friend ValidatedSystem validate_system(SystemSpec spec);
    explicit ValidatedSystem(SystemSpec spec) : spec_(std::move(spec)) {}
    SystemSpec spec_;
};

/**
 * Checks every invariant of the spec and recomputes r_max from the reward
 * table. Throws ValidationError naming the offending (s, a, w) coordinate.
 */
ValidatedSystem validate_system(SystemSpec spec);

/// Lost-sales inventory instance: state is the on-hand stock, the action is
/// the order quantity and the disturbance is the demand.
struct InventoryParams {
    int s_max = 0;  // inventory cap; S = {0..s_max}
    int a_max = 0;  // order cap;     A = {0..a_max}
    int w_max = 0;  // demand cap;    W = {0..w_max}
    double holding_cost = 0.0;
    double penalty = 0.0;
    double gamma = 0.0;
};

/**
 * Builds the lost-sales inventory system
 *   f(s, a, w) = min((s - w)^+ + a, s_max)
 *   r(s, a, w) = -(h (s - w)^+ + p (w - s)^+)
 * Rewards are negated costs so every solver uniformly maximizes reward.
 */
SystemSpec build_inventory_system(const InventoryParams& params);

/// Parses the JSON system format (see README). Throws ParseError with the
/// offending field.
SystemSpec load_system(const std::string& text);

/// Serializes to the JSON system format; load_system(save_system(x)) == x
/// bit-exactly on all tables.
std::string save_system(const SystemSpec& spec);

SystemSpec load_system_file(const std::string& path);
void save_system_file(const SystemSpec& spec, const std::string& path);

/// FNV-1a over the canonical serialization; used to tie solve artifacts to
/// the system they were computed from.
std::uint64_t system_hash(const SystemSpec& spec);

} // namespace regret
