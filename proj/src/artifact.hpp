#pragma once

#include <memory>
#include <string>
#include <variant>

#include "baselines.hpp"
#include "controller.hpp"
#include "discounted.hpp"
#include "finite.hpp"

namespace regret {

/// Solved baseline policy with the inputs it was computed from.
struct BaselineSolution {
    std::shared_ptr<const ValidatedSystem> system;
    std::string kind; // "mdp" or "robust"
    std::string id;
    StatePolicy policy;
    double epsilon = 0.0;
    DisturbanceDistribution distribution; // empty for robust
};

using AnySolution = std::variant<std::shared_ptr<const DiscountedSolution>,
                                 std::shared_ptr<const FiniteSolution>,
                                 std::shared_ptr<const BaselineSolution>>;

/// JSON solve-artifact container: a header (type, system hash, parameters,
/// convergence info) followed by the dense tables. Field order is fixed;
/// identical inputs produce byte-identical artifacts.
std::string save_solution(const AnySolution& solution);

/// Parses a solve artifact and ties it back to the system, rejecting a
/// system-hash mismatch.
AnySolution load_solution(std::shared_ptr<const ValidatedSystem> system, const std::string& text);

void save_solution_file(const AnySolution& solution, const std::string& path);
AnySolution load_solution_file(std::shared_ptr<const ValidatedSystem> system,
                               const std::string& path);

/// Deployable runtime for any solution kind.
std::unique_ptr<Controller> make_controller(const AnySolution& solution, int s0);

/// Optimal regret from s0 (prefix recursion on the solved tables); throws
/// for baseline artifacts.
double solution_regret(const AnySolution& solution, int s0);

} // namespace regret
