#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "controller.hpp"
#include "disturbance.hpp"
#include "system.hpp"

namespace regret {

struct StepRecord {
    int s = 0;
    int a = 0;
    int w = 0;
    double reward = 0.0;
};

struct Trajectory {
    std::vector<StepRecord> steps;
    double discounted_return = 0.0;   // sum gamma^t r_t
    double undiscounted_return = 0.0; // sum r_t
};

/// Rolls the controller along a fixed disturbance sequence.
Trajectory rollout(const ValidatedSystem& sys, Controller& controller, int s0,
                   const std::vector<int>& w_sequence);

struct ControllerSpec {
    enum class Type { mdp, robust, regret, clairvoyant };
    Type type = Type::robust;
    double lambda = 0.0; // mdp design rate
    int k = 1;           // regret lookahead
    std::string id() const;
};

struct ModelSpec {
    enum class Type { poisson, hmm };
    Type type = Type::poisson;
    PoissonModel poisson;
    HmmModel hmm;
    std::string name() const { return type == Type::poisson ? "poisson" : "hmm"; }
};

struct ExperimentConfig {
    SystemSpec system; // resolved from inline inventory params or a system file
    std::vector<ControllerSpec> controllers;
    std::vector<ModelSpec> models;
    int horizon = 0;
    int num_seeds = 1;
    std::uint64_t base_seed = 1;
    int s0 = 0;
    double epsilon = 1e-4;
    int max_sweeps = 200000;
    int threads = 0;
    std::string output; // default output directory; a CLI flag overrides it
};

/// Parses the experiment JSON (see README); `base_dir` resolves a relative
/// "system_file" reference.
ExperimentConfig load_experiment_config(const std::string& text, const std::string& base_dir);

struct ControllerRun {
    std::string id;
    bool enabled = false; // solved and usable
    bool converged = false;
    int sweeps_used = 0;
};

struct CellResult {
    int controller_index = 0;
    int model_index = 0;
    std::vector<double> final_avg_rewards; // one per seed
    double mean = 0.0;
    double stderr_mean = 0.0;
};

struct ExperimentResult {
    std::vector<ControllerRun> controllers;
    std::vector<CellResult> cells;
    bool all_converged = false;
};

/**
 * Runs every (controller, model, seed) cell: solves each controller once,
 * samples a seeded disturbance sequence per (model, seed) shared by all
 * controllers, rolls out, and writes records.csv, aggregate.csv and
 * manifest.json under out_dir. Identical config and seeds produce
 * byte-identical files. A controller that fails to converge is reported and
 * skipped while the run continues.
 */
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Fixed-format decimal with 12 significant digits (CSV contract).
std::string format_csv_double(double v);

} // namespace regret
