#include <doctest.h>

#include <memory>

#include "artifact.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "simulate.hpp"

using namespace regret;

namespace {

std::shared_ptr<const ValidatedSystem> pennies(double gamma) {
    return std::make_shared<const ValidatedSystem>(
        validate_system(testing::matching_pennies(gamma)));
}

} // namespace

TEST_CASE("discounted artifact round trip preserves tables and regret") {
    auto system = pennies(0.5);
    SolverConfig config;
    config.k = 1;
    config.epsilon = 1e-9;
    auto solution =
        std::make_shared<const DiscountedSolution>(solve_regret_discounted(system, config));
    const AnySolution original(solution);

    const std::string text = save_solution(original);
    const AnySolution loaded = load_solution(system, text);
    CHECK(solution_regret(loaded, 0) == doctest::Approx(solution_regret(original, 0)));
    const auto& restored = *std::get<std::shared_ptr<const DiscountedSolution>>(loaded);
    CHECK(restored.solve.table.values == solution->solve.table.values); // bit-exact
    CHECK(restored.policy.actions == solution->policy.actions);
    CHECK(save_solution(loaded) == text);
}

TEST_CASE("finite artifact round trip reconstructs a working controller") {
    auto system = pennies(0.5);
    auto solution = std::make_shared<const FiniteSolution>(
        solve_regret_finite(system, FiniteSolverConfig{1, 3, 1}));
    const AnySolution original(solution);
    const AnySolution loaded = load_solution(system, save_solution(original));

    auto controller = make_controller(loaded, 0);
    const Trajectory traj = rollout(*system, *controller, 0, {1, 0, 1});
    CHECK(traj.steps.size() == 3);
    CHECK(solution_regret(loaded, 0) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("baseline artifact carries the policy and distribution") {
    auto system = pennies(0.9);
    auto baseline = std::make_shared<BaselineSolution>();
    baseline->system = system;
    baseline->kind = "mdp";
    baseline->id = "mdp-1";
    baseline->epsilon = 1e-8;
    baseline->distribution.p = {0.25, 0.75};
    baseline->policy = mdp_value_iteration(*system, baseline->distribution, 1e-8);
    const AnySolution original{std::shared_ptr<const BaselineSolution>(baseline)};

    const AnySolution loaded = load_solution(system, save_solution(original));
    const auto& restored = *std::get<std::shared_ptr<const BaselineSolution>>(loaded);
    CHECK(restored.policy.actions == baseline->policy.actions);
    CHECK(restored.distribution.p == baseline->distribution.p);
    CHECK_THROWS_AS(solution_regret(loaded, 0), ValidationError);
}

TEST_CASE("artifacts refuse to load against a different system") {
    auto system = pennies(0.5);
    auto other = pennies(0.9);
    auto solution = std::make_shared<const FiniteSolution>(
        solve_regret_finite(system, FiniteSolverConfig{1, 3, 1}));
    const std::string text = save_solution(AnySolution(solution));
    CHECK_THROWS_WITH_AS(load_solution(other, text), doctest::Contains("hash"),
                         ValidationError);
}

TEST_CASE("malformed artifacts raise parse errors") {
    auto system = pennies(0.5);
    CHECK_THROWS_AS(load_solution(system, "not json"), ParseError);
    CHECK_THROWS_AS(load_solution(system, "{}"), ParseError);
}
