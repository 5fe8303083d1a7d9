#pragma once

#include <cstdint>
#include <vector>

#include "folio/data/panel.hpp"
#include "folio/env/portfolio_env.hpp"
#include "folio/policy/policy_net.hpp"
#include "folio/rng.hpp"

namespace folio::rl {

struct TrajectoryStep {
  std::size_t day = 0;
  std::vector<double> pre_mask_action;
  std::vector<double> old_alpha;
  double old_log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

/// One rollout segment. Observations are not copied: each step's window is
/// rebuilt from `panel` on demand (and recorded in `ledger`).
struct Trajectory {
  const data::PanelTensor* panel = nullptr;
  data::AccessLedger* ledger = nullptr;
  std::size_t window = 0;
  std::vector<TrajectoryStep> steps;
  double bootstrap_value = 0.0;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return steps.size(); }
  double mean_reward() const;
  data::WindowView observation(std::size_t k) const;
  std::span<const std::uint8_t> mask(std::size_t k) const;
};

/// Runs `days` stochastic steps from the env's current state.
Trajectory collect_rollout(env::PortfolioEnv& env, const policy::PolicyNet& policy,
                           std::size_t days, Rng& rng, data::AccessLedger* ledger = nullptr);

}  // namespace folio::rl
