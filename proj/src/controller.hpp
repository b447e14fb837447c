#pragma once

#include <memory>
#include <optional>
#include <string>

#include "baselines.hpp"
#include "discounted.hpp"
#include "finite.hpp"

namespace regret {

/**
 * Deployed controller interface. Per time step: act() returns the action for
 * the current step (pure; callable repeatedly), then observe(w) feeds the
 * realized disturbance and advances the internal state. step() mirrors the
 * one-call-per-step convention where the previous step's disturbance arrives
 * with the next action request (absent at t = 0).
 */
class Controller {
  public:
    virtual ~Controller() = default;
    virtual std::string id() const = 0;
    virtual void reset(int s0) = 0;
    virtual int act() = 0;
    virtual void observe(int w) = 0;

    int step(std::optional<int> realized_w) {
        if (realized_w) observe(*realized_w);
        return act();
    }
};

/// Memoryless state feedback (MDP and robust baselines).
class StatePolicyController : public Controller {
  public:
    StatePolicyController(std::shared_ptr<const ValidatedSystem> system, StatePolicy policy,
                          std::string id);
    std::string id() const override { return id_; }
    void reset(int s0) override;
    int act() override;
    void observe(int w) override;

  private:
    std::shared_ptr<const ValidatedSystem> system_;
    StatePolicy policy_;
    std::string id_;
    int state_ = 0;
};

/**
 * Runtime for the solved discounted instance. Before the window fills it
 * follows the prefix selectors over (state, disturbance prefix); afterwards
 * it follows the stationary policy over the tracking state. On each realized
 * disturbance the internal benchmark state advances with the maximizing
 * lagged action at that disturbance (ties toward the lowest index), keeping
 * the runtime consistent with the solved table.
 */
class RegretController : public Controller {
  public:
    RegretController(std::shared_ptr<const DiscountedSolution> sol, int s0);
    std::string id() const override;
    void reset(int s0) override;
    int act() override;
    void observe(int w) override;

    int lagged_benchmark_state() const { return s_l_; }

  private:
    std::shared_ptr<const DiscountedSolution> solution_;
    AugmentedSpace space_;
    PrefixTables prefix_;
    int t_ = 0;
    int s_c_ = 0;
    int s_l_ = 0;
    std::int64_t widx_ = 0;       // window index once t >= k
    std::int64_t prefix_idx_ = 0; // disturbance-prefix index while t < k
};

/// Runtime for the finite-horizon stack; stage-indexed selectors, same
/// benchmark bookkeeping. Stepping past stage T-1 throws HorizonError.
class FiniteRegretController : public Controller {
  public:
    FiniteRegretController(std::shared_ptr<const FiniteSolution> sol, int s0);
    std::string id() const override;
    void reset(int s0) override;
    int act() override;
    void observe(int w) override;

    int lagged_benchmark_state() const { return s_l_; }

  private:
    std::shared_ptr<const FiniteSolution> solution_;
    AugmentedSpace space_;
    FinitePrefix prefix_;
    int t_ = 0;
    int s_c_ = 0;
    int s_l_ = 0;
    std::int64_t widx_ = 0;
    std::int64_t prefix_idx_ = 0;
};

/// Picks the maximizing lagged benchmark action at a realized disturbance:
///   argmax_{a_l} { r(s_l, a_l, w0) + cont * J(F(x, a_c, a_l, w)) },
/// ties toward the lowest index. Shared by the runtimes and the realized-
/// regret oracle so their bookkeeping agrees exactly.
int maximizing_benchmark_action(const ValidatedSystem& sys, const AugmentedSpace& space,
                                const std::vector<double>& j_next, double cont, int s_c, int s_l,
                                std::int64_t widx, int a_c, int w);

} // namespace regret
