#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "folio/data/panel.hpp"
#include "folio/env/portfolio_env.hpp"
#include "folio/policy/policy_net.hpp"
#include "folio/rl/grid_search.hpp"
#include "folio/rl/train_config.hpp"

namespace folio::app {

struct DataConfig {
  std::filesystem::path path;
  /// Empty: every column except date, ticker and Close.
  std::vector<std::string> features;
  data::SplitMode split_mode = data::SplitMode::kQuantile80;
  /// Unset means the state window length W.
  std::optional<std::size_t> embargo_days;
  /// Only for fixed_ranges; ISO "from:to".
  std::string train_dates;
  std::string validation_dates;
  std::string test_dates;
};

struct EvalConfig {
  /// "from:to"; empty means the test split.
  std::string range;
  std::vector<std::string> baselines{"equal_weight_buy_and_hold"};
};

struct SyntheticSpec {
  std::size_t assets = 10;
  std::size_t days = 3000;
  /// "planted": each name's signal feature predicts its own next return.
  /// "cross_sectional": names form two groups flagged by aux = +1 / -1 and
  /// each name's next return follows the mean signal of its group peers; a
  /// name's own features say nothing about it.
  std::string variant = "planted";
  double ic = 0.3;
  double noise_vol = 0.015;
  double drift = 3e-4;
  double halt_prob = 1e-3;
  std::size_t max_halt_days = 5;
  std::uint64_t seed = 42;
  std::string start_date = "2000-01-03";

  void validate() const;
};

struct RunConfig {
  DataConfig data;
  env::EnvConfig env;
  policy::PolicyConfig policy;
  rl::TrainConfig train;
  EvalConfig eval;
  rl::FinetuneGrid grid;
  SyntheticSpec synthetic;
  std::filesystem::path output_dir;

  void validate() const;
};

/// Flat INI file; sections [data] [env] [policy] [train] [eval] [finetune]
/// [synthetic] [output]. Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
std::string to_ini(const RunConfig& config);

}  // namespace folio::app
