#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "folio/app/config.hpp"
#include "folio/app/evaluate.hpp"
#include "folio/app/synthetic.hpp"
#include "folio/data/panel_io.hpp"
#include "folio/rl/grid_search.hpp"
#include "folio/rl/trainer.hpp"

namespace folio::app {

namespace fs = std::filesystem;

/// Artifact layout under a run directory.
struct RunLayout {
  fs::path root;

  fs::path manifest() const { return root / "manifest.json"; }
  fs::path panel() const { return root / "panel.bin"; }
  fs::path config() const { return root / "run.cfg"; }
  fs::path checkpoints() const { return root / "checkpoints"; }
  fs::path logs() const { return root / "logs"; }
  fs::path reports() const { return root / "reports"; }
};

struct PrepareResult {
  RunLayout layout;
  std::size_t days = 0;
  std::size_t assets = 0;
  std::size_t features = 0;
  data::SplitSpec split;
};

/// CSV -> standardized panel, split manifest and a copy of the config.
PrepareResult cmd_prepare(const fs::path& data_csv, const fs::path& out_dir, RunConfig config,
                          const std::string& generator_json = {});

/// The prepared panel's own config, or `override_path` when given.
RunConfig run_config_for(const fs::path& panel_dir,
                         const std::optional<fs::path>& override_path = std::nullopt);

struct TrainResult {
  fs::path checkpoint;
  fs::path log;
  fs::path access_log;
  std::vector<rl::UpdateLog> updates;
  std::uint64_t train_reads = 0;
  std::uint64_t validation_reads = 0;
  std::uint64_t test_reads = 0;
};

/// Trains on the train split only; algo and seed come from `config.train`.
TrainResult cmd_train(const fs::path& panel_dir, const RunConfig& config);

/// A strategy to evaluate: a checkpoint path or a baseline name.
struct StrategySource {
  std::optional<fs::path> checkpoint;
  std::optional<std::string> baseline;
};

struct EvaluateResult {
  data::DayRange range;
  std::vector<Evaluation> evaluations;
  fs::path table;
};

/// Evaluates every source over the same range and cost level and writes
/// per-strategy metrics JSON, equity/drawdown/step CSVs and a comparison
/// table. An empty `range` falls back to the config, then the test split.
EvaluateResult cmd_evaluate(const fs::path& panel_dir, const RunConfig& config,
                            const std::vector<StrategySource>& sources,
                            const std::string& range = {});

struct FinetuneResult {
  rl::GridSearchResult search;
  fs::path results_json;
  fs::path summary;
};

FinetuneResult cmd_finetune(const fs::path& panel_dir, const RunConfig& config,
                            const fs::path& checkpoint, const rl::FinetuneGrid& grid);

/// Writes `<out_dir>/data.csv` from the spec, then prepares it in place with
/// the generating parameters recorded in the manifest.
PrepareResult cmd_synthetic(const SyntheticSpec& spec, const fs::path& out_dir,
                            RunConfig config = {});

/// "<algo>_seed<seed>".
std::string run_tag(const rl::TrainConfig& config);

}  // namespace folio::app
