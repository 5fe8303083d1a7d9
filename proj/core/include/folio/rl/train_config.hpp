#pragma once

#include <cstdint>
#include <string>

namespace folio::rl {

enum class Algo { kPpo, kA2c, kReinforce };

std::string to_string(Algo algo);
Algo parse_algo(const std::string& text);

struct TrainConfig {
  Algo algo = Algo::kPpo;
  double lr = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double kl_coef = 0.0;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  std::size_t rollout_days = 128;
  std::size_t updates_per_epoch = 6;
  /// Clamped to the rollout length when larger.
  std::size_t minibatch = 256;
  std::size_t microbatch = 32;
  /// Optimization passes over each rollout.
  std::size_t epochs_per_update = 1;
  std::uint64_t seed = 42;
  double clip_norm = 0.5;
  /// Training budget, in epochs of updates_per_epoch updates.
  std::size_t epochs = 10;
  /// Write a checkpoint every this many updates (0 = only at the end).
  std::size_t checkpoint_every = 0;
  bool normalize_advantages = true;

  void validate() const;
  std::size_t total_updates() const { return epochs * updates_per_epoch; }
  /// Effective minibatch for a rollout of `samples` steps.
  std::size_t effective_minibatch(std::size_t samples) const;
};

}  // namespace folio::rl
