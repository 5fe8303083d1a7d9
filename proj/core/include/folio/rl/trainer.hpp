#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <vector>

#include "folio/data/panel.hpp"
#include "folio/env/portfolio_env.hpp"
#include "folio/policy/policy_net.hpp"
#include "folio/rl/rollout.hpp"
#include "folio/rl/train_config.hpp"

namespace folio::rl {

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double kl = 0.0;
  double entropy = 0.0;
  /// Mean pre-clip gradient norm over optimizer steps.
  double grad_norm = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  std::size_t optimizer_steps = 0;
  /// Minibatches dropped because a ratio was not finite.
  std::size_t skipped = 0;
};

/// Fills advantages and return targets for `algo` (GAE for PPO and A2C,
/// Monte Carlo suffix returns minus the stored baseline for REINFORCE).
void prepare_targets(Trajectory& batch, const TrainConfig& config);

UpdateStats ppo_update(policy::PolicyNet& policy, const Trajectory& batch,
                       const TrainConfig& config);
UpdateStats a2c_update(policy::PolicyNet& policy, const Trajectory& batch,
                       const TrainConfig& config);
UpdateStats reinforce_update(policy::PolicyNet& policy, const Trajectory& batch,
                             const TrainConfig& config);

/// Accumulates gradients of the algorithm's loss over `indices` without
/// stepping the optimizer. Returns the loss terms averaged over the indices.
/// Exposed for gradient checks.
UpdateStats accumulate_gradients(policy::PolicyNet& policy, const Trajectory& batch,
                                 const TrainConfig& config, std::span<const std::size_t> indices,
                                 std::span<const double> advantages);

struct UpdateLog {
  std::size_t update = 0;
  std::size_t start_day = 0;
  double mean_reward = 0.0;
  UpdateStats stats;
  double wall_seconds = 0.0;
};

void write_training_log_header(std::ostream& out);
void write_training_log_row(std::ostream& out, const UpdateLog& row);

/// Rollout + optimization loop on a fixed day range of one panel.
class Trainer {
 public:
  Trainer(policy::PolicyNet& policy, const data::PanelTensor& panel, env::EnvConfig env_config,
          TrainConfig config, data::DayRange train_range, data::AccessLedger* ledger = nullptr);

  UpdateLog run_update();

  /// Runs `updates` updates; `on_update` sees each log row as it lands.
  std::vector<UpdateLog> train(std::size_t updates,
                               const std::function<void(const UpdateLog&)>& on_update = {});

  std::size_t updates_done() const { return updates_done_; }
  const TrainConfig& config() const { return config_; }

 private:
  policy::PolicyNet* policy_;
  const data::PanelTensor* panel_;
  env::EnvConfig env_config_;
  TrainConfig config_;
  data::DayRange range_;
  data::AccessLedger* ledger_;
  Rng rollout_rng_;
  std::size_t updates_done_ = 0;
};

}  // namespace folio::rl
