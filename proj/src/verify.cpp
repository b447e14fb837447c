#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "artifact.hpp"
#include "oracle.hpp"
#include "simulate.hpp"

namespace regret {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string describe_instance(const SystemSpec& spec, int k, int T, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["k"] = k;
    if (T > 0) j["horizon"] = T;
    j["seed"] = seed;
    j["system"] = nlohmann::json::parse(save_system(spec));
    return j.dump();
}

template <typename Fn>
void parallel_instances(int threads, std::int64_t count, Fn&& fn) {
    int n = threads;
    if (n <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        n = hw > 0 ? static_cast<int>(hw) : 1;
    }
    n = static_cast<int>(std::min<std::int64_t>(n, count));
    if (n <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&fn, t, n, count] {
            for (std::int64_t i = t; i < count; i += n) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

SuiteResult contraction_suite(const VerifyOptions& options) {
    SuiteResult suite;
    suite.name = "contraction";
    suite.passed = true;
    const double slack = std::min(1e-12, options.tolerance);
    const double gammas[] = {0.5, 0.9, 0.995};

    for (int i = 0; i < options.contraction_systems && suite.passed; ++i) {
        const std::uint64_t seed = mix(options.seed, 1000 + i);
        std::mt19937_64 rng(seed);
        const int ns = 1 + static_cast<int>(rng() % options.max_states);
        const int na = 1 + static_cast<int>(rng() % options.max_actions);
        const int nw = 1 + static_cast<int>(rng() % options.max_disturbances);
        const int k = 1 + static_cast<int>(rng() % options.k_max);
        const double gamma = gammas[i % 3];
        const SystemSpec spec = random_system(ns, na, nw, gamma, mix(seed, 7));
        const ValidatedSystem sys = validate_system(spec);
        AugmentedSpace space(ns, nw, k);

        ValueTable j1, j2;
        j1.k = j2.k = k;
        j1.gamma = j2.gamma = gamma;
        j1.values.resize(space.size());
        j2.values.resize(space.size());
        for (int pair = 0; pair < options.contraction_pairs; ++pair) {
            for (auto& v : j1.values) v = 10.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 5.0;
            for (auto& v : j2.values) v = 10.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 5.0;
            double dist = 0.0;
            for (std::size_t idx = 0; idx < j1.values.size(); ++idx) {
                dist = std::max(dist, std::abs(j1.values[idx] - j2.values[idx]));
            }
            const BellmanResult t1 = apply_regret_bellman(sys, k, j1);
            const BellmanResult t2 = apply_regret_bellman(sys, k, j2);
            double tdist = 0.0;
            for (std::size_t idx = 0; idx < j1.values.size(); ++idx) {
                tdist = std::max(tdist,
                                 std::abs(t1.table.values[idx] - t2.table.values[idx]));
            }
            ++suite.checks;
            if (tdist > gamma * dist + slack) {
                suite.passed = false;
                std::ostringstream os;
                os << "||TJ - TJ'|| = " << tdist << " > gamma ||J - J'|| = " << gamma * dist;
                suite.detail = os.str();
                suite.failing_instance = describe_instance(spec, k, 0, seed);
                break;
            }
        }
    }
    if (suite.passed) suite.detail = "all table pairs contracted";
    return suite;
}

struct OracleInstance {
    int ns, na, nw, k, T;
    std::uint64_t seed;
    double dp = 0.0;
    double oracle = 0.0;
    bool ok = false;
};

SuiteResult oracle_suite(const VerifyOptions& options, std::vector<OracleInstance>& instances) {
    SuiteResult suite;
    suite.name = "oracle_equivalence";

    for (int ns = 1; ns <= options.max_states; ++ns) {
        for (int na = 1; na <= options.max_actions; ++na) {
            for (int nw = 1; nw <= options.max_disturbances; ++nw) {
                for (int k = 1; k <= options.k_max; ++k) {
                    for (int T = k + 1; T <= options.horizon_max; ++T) {
                        const double leaves =
                            std::pow(double(na) * nw, k) * std::pow(double(na) * na * nw, T - k);
                        if (leaves > static_cast<double>(kEnumerationGuard)) {
                            throw GuardError(
                                "verification grid exceeds the enumeration guard at "
                                "|A|=" + std::to_string(na) + ", |W|=" + std::to_string(nw) +
                                ", k=" + std::to_string(k) + ", T=" + std::to_string(T));
                        }
                        for (int i = 0; i < options.systems_per_cell; ++i) {
                            OracleInstance inst;
                            inst.ns = ns;
                            inst.na = na;
                            inst.nw = nw;
                            inst.k = k;
                            inst.T = T;
                            // The system seed deliberately ignores k, so the
                            // k = 1 and k = 2 cells solve the same systems and
                            // the monotonicity-in-k diagnostic has matched pairs.
                            inst.seed = mix(options.seed,
                                            mix((ns * 8 + na) * 8 + nw, T * 64 + i));
                            instances.push_back(inst);
                        }
                    }
                }
            }
        }
    }

    parallel_instances(options.threads, static_cast<std::int64_t>(instances.size()),
                       [&](std::int64_t idx) {
                           OracleInstance& inst = instances[idx];
                           const SystemSpec spec = random_system(inst.ns, inst.na, inst.nw, 0.9,
                                                                 inst.seed);
                           const ValidatedSystem sys = validate_system(spec);
                           const FiniteSolverConfig config{inst.k, inst.T, 1};
                           const FiniteValueStack stack =
                               backward_regret_dp(sys, config, tail_value(sys, inst.k));
                           inst.dp = finite_prefix_dp(sys, config, stack, 0).regret;
                           inst.oracle = history_tree_regret(sys, 0, inst.k, inst.T);
                           inst.ok = std::abs(inst.dp - inst.oracle) <= options.tolerance;
                       });

    suite.passed = true;
    double max_gap = 0.0;
    for (const OracleInstance& inst : instances) {
        ++suite.checks;
        max_gap = std::max(max_gap, std::abs(inst.dp - inst.oracle));
        if (!inst.ok && suite.passed) {
            suite.passed = false;
            std::ostringstream os;
            os << "G_0 = " << inst.dp << " vs oracle " << inst.oracle << " at |S|=" << inst.ns
               << " |A|=" << inst.na << " |W|=" << inst.nw << " k=" << inst.k
               << " T=" << inst.T;
            suite.detail = os.str();
            suite.failing_instance = describe_instance(
                random_system(inst.ns, inst.na, inst.nw, 0.9, inst.seed), inst.k, inst.T,
                inst.seed);
        }
    }
    if (suite.passed) {
        std::ostringstream os;
        os << "max |G_0 - oracle| = " << max_gap;
        suite.detail = os.str();
    }
    return suite;
}

SuiteResult decomposition_suite(const VerifyOptions& options) {
    SuiteResult suite;
    suite.name = "decomposition";
    suite.passed = true;
    const double tol = std::min(1e-12, options.tolerance);
    for (int i = 0; i < options.decomposition_systems && suite.passed; ++i) {
        const std::uint64_t seed = mix(options.seed, 3000 + i);
        std::mt19937_64 rng(seed);
        const int ns = 1 + static_cast<int>(rng() % options.max_states);
        const int na = 1 + static_cast<int>(rng() % options.max_actions);
        const int nw = 1 + static_cast<int>(rng() % options.max_disturbances);
        const int k = 1 + static_cast<int>(rng() % options.k_max);
        const int T = k + 1 + static_cast<int>(rng() % std::max(1, options.horizon_max - k));
        const SystemSpec spec = random_system(ns, na, nw, 0.95, mix(seed, 11));
        const ValidatedSystem sys = validate_system(spec);
        const DecompositionReport report =
            decomposition_check(sys, k, T, options.decomposition_trials, mix(seed, 13), tol);
        suite.checks += report.trials;
        if (!report.passed) {
            suite.passed = false;
            std::ostringstream os;
            os << "max finite error " << report.max_error_finite << ", max discounted error "
               << report.max_error_discounted;
            suite.detail = os.str();
            suite.failing_instance = describe_instance(spec, k, T, seed);
        }
    }
    if (suite.passed) suite.detail = "return-gap identities exact";
    return suite;
}

SuiteResult nonnegativity_suite(const VerifyOptions& options,
                                const std::vector<OracleInstance>& oracle_instances) {
    SuiteResult suite;
    suite.name = "nonnegativity";
    suite.passed = true;

    for (const OracleInstance& inst : oracle_instances) {
        ++suite.checks;
        if (inst.dp < -options.tolerance) {
            suite.passed = false;
            std::ostringstream os;
            os << "finite G_0 = " << inst.dp << " < 0 at k=" << inst.k << " T=" << inst.T;
            suite.detail = os.str();
            suite.failing_instance = describe_instance(
                random_system(inst.ns, inst.na, inst.nw, 0.9, inst.seed), inst.k, inst.T,
                inst.seed);
            return suite;
        }
    }

    // Discounted counterpart on a smaller sample.
    const double epsilon = 1e-6;
    for (int i = 0; i < 12; ++i) {
        const std::uint64_t seed = mix(options.seed, 4000 + i);
        std::mt19937_64 rng(seed);
        const int ns = 1 + static_cast<int>(rng() % options.max_states);
        const int na = 1 + static_cast<int>(rng() % options.max_actions);
        const int nw = 1 + static_cast<int>(rng() % options.max_disturbances);
        const int k = 1 + static_cast<int>(rng() % options.k_max);
        const double gammas[] = {0.5, 0.9, 0.995};
        const SystemSpec spec = random_system(ns, na, nw, gammas[i % 3], mix(seed, 5));
        const ValidatedSystem sys = validate_system(spec);
        SolverConfig config;
        config.k = k;
        config.epsilon = epsilon;
        config.threads = 1;
        const SolveResult solved = solve_fixed_point(sys, config);
        const double g0 = prefix_dp(sys, k, solved.table, 0).regret;
        ++suite.checks;
        if (g0 < -2.0 * epsilon) {
            suite.passed = false;
            std::ostringstream os;
            os << "discounted G_0 = " << g0 << " < -2 epsilon";
            suite.detail = os.str();
            suite.failing_instance = describe_instance(spec, k, 0, seed);
            return suite;
        }
    }
    suite.detail = "all regret values nonnegative";
    return suite;
}

SuiteResult diagnostics_suite(const VerifyOptions& options,
                              const std::vector<OracleInstance>& oracle_instances) {
    SuiteResult suite;
    suite.name = "diagnostics";
    suite.passed = true; // observational, never gates

    // Empirical monotonicity of the finite regret in k on matched instances.
    int pairs = 0, violations = 0;
    for (const OracleInstance& a : oracle_instances) {
        if (a.k != 1) continue;
        for (const OracleInstance& b : oracle_instances) {
            if (b.k == 2 && b.ns == a.ns && b.na == a.na && b.nw == a.nw && b.T == a.T &&
                b.seed == a.seed) {
                ++pairs;
                if (b.dp < a.dp - 1e-9) ++violations;
            }
        }
    }

    // Gap between the game value and the per-path clairvoyant comparison for
    // the extracted controller on a tiny instance (the clairvoyant number is
    // an upper bound by construction; no pass/fail contract).
    std::ostringstream os;
    os << "k-monotonicity pairs=" << pairs << " violations=" << violations;
    {
        const SystemSpec spec = random_system(2, 2, 2, 0.9, mix(options.seed, 77));
        auto system = std::make_shared<const ValidatedSystem>(validate_system(spec));
        const FiniteSolverConfig config{1, 4, 1};
        auto solution = std::make_shared<const FiniteSolution>(solve_regret_finite(system, config));
        const double g0 = finite_prefix_dp(*system, config, solution->stack, 0).regret;
        FiniteRegretController controller(solution, 0);
        double clairvoyant_gap = -1e300;
        std::vector<int> w(4, 0);
        while (true) {
            const Trajectory traj = rollout(*system, controller, 0, w);
            const double clair = clairvoyant_path_value(*system, 0, w, false).value;
            clairvoyant_gap = std::max(clairvoyant_gap, clair - traj.undiscounted_return);
            int pos = 3;
            while (pos >= 0 && ++w[pos] == spec.num_disturbances) w[pos--] = 0;
            if (pos < 0) break;
        }
        os << "; joint-sup diagnostic: game value " << g0 << ", clairvoyant worst gap "
           << clairvoyant_gap;
    }
    suite.detail = os.str();
    suite.checks = pairs;
    return suite;
}

} // namespace

std::string VerifyReport::to_json() const {
    nlohmann::ordered_json j;
    j["all_passed"] = all_passed;
    j["suites"] = nlohmann::ordered_json::array();
    for (const SuiteResult& suite : suites) {
        nlohmann::ordered_json s;
        s["name"] = suite.name;
        s["passed"] = suite.passed;
        s["checks"] = suite.checks;
        s["detail"] = suite.detail;
        if (!suite.failing_instance.empty()) {
            s["failing_instance"] = nlohmann::json::parse(suite.failing_instance);
        }
        j["suites"].push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

VerifyReport run_verification(const VerifyOptions& options) {
    if (options.max_states < 1 || options.max_actions < 1 || options.max_disturbances < 1) {
        throw ValidationError("grid bounds must be positive");
    }
    if (options.k_max < 1 || options.horizon_max <= options.k_max) {
        throw ValidationError("need k_max >= 1 and horizon_max > k_max");
    }
    if (!(options.tolerance >= 0.0)) throw ValidationError("tolerance must be >= 0");

    // Reject grids that would blow the enumeration guard before doing work.
    // The largest tree in the grid is the k = 1, T = horizon_max cell.
    {
        const double worst = double(options.max_actions) * options.max_disturbances *
                             std::pow(double(options.max_actions) * options.max_actions *
                                          options.max_disturbances,
                                      options.horizon_max - 1);
        if (worst > static_cast<double>(kEnumerationGuard)) {
            throw GuardError("requested grid exceeds the enumeration guard of " +
                             std::to_string(kEnumerationGuard) + " leaves");
        }
    }

    VerifyReport report;
    report.suites.push_back(contraction_suite(options));
    std::vector<OracleInstance> oracle_instances;
    report.suites.push_back(oracle_suite(options, oracle_instances));
    report.suites.push_back(decomposition_suite(options));
    report.suites.push_back(nonnegativity_suite(options, oracle_instances));
    report.suites.push_back(diagnostics_suite(options, oracle_instances));
    report.all_passed = true;
    for (const SuiteResult& suite : report.suites) {
        report.all_passed = report.all_passed && suite.passed;
    }
    return report;
}

} // namespace regret
