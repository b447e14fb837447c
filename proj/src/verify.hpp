#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "system.hpp"

namespace regret {

struct VerifyOptions {
    // Grid bounds for the exhaustive small-instance suites.
    int max_states = 3;
    int max_actions = 3;
    int max_disturbances = 3;
    int k_max = 2;
    int horizon_max = 5;
    int systems_per_cell = 5;

    // Oracle-equivalence and nonnegativity slack; the fixed 1e-12 slacks of
    // the contraction and decomposition suites are additionally capped by it,
    // so an impossible tolerance of 0 fails on floating-point residue.
    double tolerance = 1e-9;

    int contraction_systems = 20;
    int contraction_pairs = 100;
    int decomposition_systems = 100;
    int decomposition_trials = 5;
    std::uint64_t seed = 20260810;
    int threads = 0;
};

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::int64_t checks = 0;
    std::string detail;
    std::string failing_instance; // serialized reproduction data, empty if passed
};

struct VerifyReport {
    std::vector<SuiteResult> suites;
    bool all_passed = false;
    std::string to_json() const;
};

/**
 * Runs the contraction, oracle-equivalence, decomposition and nonnegativity
 * suites over seeded random instances, plus non-gating diagnostics
 * (empirical monotonicity of the regret in k, and the gap between the game
 * value and the per-path clairvoyant comparison). Grid bounds that would
 * exceed the enumeration guard are rejected up front.
 */
VerifyReport run_verification(const VerifyOptions& options);

} // namespace regret
