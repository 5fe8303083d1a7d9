#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "folio/data/panel.hpp"
#include "folio/env/portfolio_env.hpp"
#include "folio/metrics/metrics.hpp"
#include "folio/rl/train_config.hpp"

namespace folio::rl {

enum class EvalMetric { kSharpe, kCagr, kMdd };

std::string to_string(EvalMetric metric);
EvalMetric parse_eval_metric(const std::string& text);

struct FinetuneGrid {
  std::vector<double> learning_rates{1e-4, 5e-5};
  std::vector<std::size_t> epochs{3, 5};
  std::vector<std::size_t> minibatches{128, 256};
  std::size_t microbatch = 32;
  std::size_t extra_updates = 6;
  EvalMetric metric = EvalMetric::kSharpe;
};

struct TrialResult {
  std::size_t trial = 0;  // lexicographic grid position
  double lr = 0.0;
  std::size_t epochs = 0;
  std::size_t minibatch = 0;
  std::size_t microbatch = 0;
  std::size_t extra_updates = 0;
  metrics::MetricsReport metrics;
  std::filesystem::path checkpoint;
};

struct GridSearchResult {
  /// Ranked best first; ties keep grid order.
  std::vector<TrialResult> ranked;
  std::filesystem::path best_checkpoint;
};

/// Larger is better for every metric (MDD is <= 0, so the shallowest wins).
double metric_value(const metrics::MetricsReport& report, EvalMetric metric);

/// Indices of `values` sorted descending with ties broken by position.
std::vector<std::size_t> rank_descending(const std::vector<double>& values);

struct FinetuneSetup {
  const data::PanelTensor* panel = nullptr;
  env::EnvConfig env;
  TrainConfig base;
  data::DayRange train_range;
  data::DayRange eval_range;
  data::AccessLedger* ledger = nullptr;
};

/// For each grid cell: reload `checkpoint`, run extra_updates with the cell's
/// settings, evaluate in mean mode on eval_range. Trial checkpoints go to
/// `out_dir/trial_<k>.ckpt`; the winner is copied to `out_dir/best.ckpt`.
GridSearchResult grid_search_finetune(const std::filesystem::path& checkpoint,
                                      const FinetuneGrid& grid, const FinetuneSetup& setup,
                                      const std::filesystem::path& out_dir);

std::string to_json(const std::vector<TrialResult>& trials);

}  // namespace folio::rl
