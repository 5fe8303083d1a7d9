// folio: prepare -> train -> evaluate -> finetune pipeline over a long-format
// price/feature CSV, plus a synthetic market generator.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "folio/app/commands.hpp"
#include "folio/error.hpp"

namespace fs = std::filesystem;
using namespace folio;

namespace {

// Checkpoints live in <panel>/checkpoints/.
fs::path panel_from_checkpoint(const fs::path& ckpt) {
  const fs::path parent = ckpt.parent_path();
  if (parent.filename() == "checkpoints") return parent.parent_path();
  const fs::path grand = parent.parent_path();
  if (grand.filename() == "checkpoints") return grand.parent_path();
  return fs::current_path();
}

void print_split(const app::PrepareResult& r) {
  std::cout << "prepared " << r.layout.root.string() << ": T=" << r.days << " N=" << r.assets
            << " F=" << r.features << " train=[" << r.split.train.first << ","
            << r.split.train.last << "] test=[" << r.split.test.first << "," << r.split.test.last
            << "]\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Portfolio allocation with attention policies and on-policy RL"};
  cli.require_subcommand(1);

  auto* prepare = cli.add_subcommand("prepare", "Build a panel artifact from a long CSV");
  std::string data_csv, config_path, out_dir;
  prepare->add_option("--data", data_csv, "Long-format CSV (Date, ticker, Close, features)")
      ->required();
  prepare->add_option("--config", config_path, "INI run config");
  prepare->add_option("--out", out_dir, "Output directory")->required();

  auto* train = cli.add_subcommand("train", "Train a policy on the train split");
  std::string panel_dir, algo;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  train->add_option("--panel", panel_dir, "Prepared panel directory")->required();
  train->add_option("--algo", algo, "ppo | a2c | reinforce");
  train->add_option("--seed", seed, "Root seed");
  train->add_option("--epochs", epochs, "Training budget in epochs of updates");
  train->add_option("--config", config_path, "Override the panel's run.cfg");

  auto* evaluate = cli.add_subcommand("evaluate", "Deterministic backtest of policies/baselines");
  std::vector<std::string> checkpoints, baselines;
  std::string range;
  evaluate->add_option("--checkpoint", checkpoints, "Policy checkpoint (repeatable)");
  evaluate->add_option("--baseline", baselines,
                       "equal_weight_buy_and_hold | all_cash (repeatable)");
  evaluate->add_option("--range", range, "from:to (ISO dates or day indices)");
  evaluate->add_option("--panel", panel_dir, "Prepared panel directory");
  evaluate->add_option("--config", config_path, "Override the panel's run.cfg");

  auto* finetune = cli.add_subcommand("finetune", "Grid-search fine-tuning from a checkpoint");
  std::string checkpoint, grid_path;
  finetune->add_option("--checkpoint", checkpoint, "Pretrained checkpoint")->required();
  finetune->add_option("--grid", grid_path, "INI file with a [finetune] section");
  finetune->add_option("--panel", panel_dir, "Prepared panel directory");
  finetune->add_option("--config", config_path, "Override the panel's run.cfg");

  auto* synthetic = cli.add_subcommand("synthetic", "Generate and prepare a synthetic market");
  std::string spec_path;
  synthetic->add_option("--spec", spec_path, "INI file with a [synthetic] section")->required();
  synthetic->add_option("--out", out_dir, "Output directory (default: [output] dir)");

  CLI11_PARSE(cli, argc, argv);

  const auto optional_path = [](const std::string& p) -> std::optional<fs::path> {
    if (p.empty()) return std::nullopt;
    return fs::path(p);
  };

  try {
    if (*prepare) {
      const app::RunConfig cfg = config_path.empty() ? app::RunConfig{} : app::load_config(config_path);
      print_split(app::cmd_prepare(data_csv, out_dir, cfg));
    } else if (*train) {
      app::RunConfig cfg = app::run_config_for(panel_dir, optional_path(config_path));
      if (!algo.empty()) cfg.train.algo = rl::parse_algo(algo);
      if (seed) cfg.train.seed = *seed;
      if (epochs) cfg.train.epochs = *epochs;
      const app::TrainResult r = app::cmd_train(panel_dir, cfg);
      std::cout << "trained " << r.updates.size() << " updates -> " << r.checkpoint.string()
                << "\nlog " << r.log.string() << "\ntest-range reads during training: "
                << r.test_reads << "\n";
    } else if (*evaluate) {
      if (panel_dir.empty()) {
        panel_dir = checkpoints.empty() ? fs::current_path().string()
                                        : panel_from_checkpoint(checkpoints.front()).string();
      }
      const app::RunConfig cfg = app::run_config_for(panel_dir, optional_path(config_path));
      if (baselines.empty()) baselines = cfg.eval.baselines;
      std::vector<app::StrategySource> sources;
      for (const auto& c : checkpoints) sources.push_back({fs::path(c), std::nullopt});
      for (const auto& b : baselines) sources.push_back({std::nullopt, b});
      const app::EvaluateResult r = app::cmd_evaluate(panel_dir, cfg, sources, range);
      std::ifstream table(r.table);
      std::cout << table.rdbuf();
    } else if (*finetune) {
      if (panel_dir.empty()) panel_dir = panel_from_checkpoint(checkpoint).string();
      const app::RunConfig cfg = app::run_config_for(panel_dir, optional_path(config_path));
      const rl::FinetuneGrid grid = grid_path.empty() ? cfg.grid : app::load_config(grid_path).grid;
      const app::FinetuneResult r = app::cmd_finetune(panel_dir, cfg, checkpoint, grid);
      std::ifstream summary(r.summary);
      std::cout << summary.rdbuf() << "best " << r.search.best_checkpoint.string() << "\n";
    } else if (*synthetic) {
      const app::RunConfig cfg = app::load_config(spec_path);
      fs::path out = out_dir.empty() ? cfg.output_dir : fs::path(out_dir);
      folio::require(!out.empty(), ErrorKind::kConfig,
                     "synthetic: give --out or an [output] dir in the spec");
      print_split(app::cmd_synthetic(cfg.synthetic, out, cfg));
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
