#include "folio/app/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "folio/data/csv.hpp"
#include "folio/error.hpp"
#include "json.hpp"

namespace folio::app {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> default_features(const fs::path& csv) {
  std::ifstream in(csv);
  require(in.good(), ErrorKind::kIo, "cannot open " + csv.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::kEmptyInput,
          csv.string() + " is empty");
  std::vector<std::string> out;
  for (std::string name : data::split_csv_line(line)) {
    while (!name.empty() && (name.back() == ' ' || name.back() == '\r')) name.pop_back();
    const std::string key = lower(name);
    if (key == "date" || key == "ticker" || name == "Close") continue;
    out.push_back(name);
  }
  require(!out.empty(), ErrorKind::kSchema, csv.string() + " has no feature columns");
  return out;
}

data::DateInterval parse_interval(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, ErrorKind::kConfig,
          std::string("data.") + what + " must look like YYYY-MM-DD:YYYY-MM-DD");
  const auto from = data::parse_date(text.substr(0, colon));
  const auto to = data::parse_date(text.substr(colon + 1));
  require(from && to, ErrorKind::kConfig, std::string("data.") + what + " has a bad date");
  return {*from, *to};
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::kIo, "cannot write " + path.string());
  out << text;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

data::DayRange resolve_range(const std::string& cli, const RunConfig& config,
                             const data::PanelArtifact& art) {
  if (!cli.empty()) return parse_range(cli, art.panel);
  if (!config.eval.range.empty()) return parse_range(config.eval.range, art.panel);
  return art.split.test;
}

nlohmann::json range_json(const data::PanelTensor& panel, const data::DayRange& r) {
  return {{"first", r.first},
          {"last", r.last},
          {"from", panel.dates[r.first].iso()},
          {"to", panel.dates[r.last].iso()}};
}

}  // namespace

std::string run_tag(const rl::TrainConfig& config) {
  return rl::to_string(config.algo) + "_seed" + std::to_string(config.seed);
}

PrepareResult cmd_prepare(const fs::path& data_csv, const fs::path& out_dir, RunConfig config,
                          const std::string& generator_json) {
  std::vector<std::string> features =
      config.data.features.empty() ? default_features(data_csv) : config.data.features;
  const auto rows = data::load_long_csv(data_csv, features);
  data::PanelTensor panel = data::standardize_cross_section(data::pivot_panel(rows, features));

  std::optional<data::FixedRanges> fixed;
  if (config.data.split_mode == data::SplitMode::kFixedRanges) {
    data::FixedRanges f;
    f.train = parse_interval(config.data.train_dates, "train_dates");
    if (!config.data.validation_dates.empty()) {
      f.validation = parse_interval(config.data.validation_dates, "validation_dates");
    }
    f.test = parse_interval(config.data.test_dates, "test_dates");
    fixed = f;
  }
  const data::SplitSpec split = data::make_splits(panel.dates, config.data.split_mode,
                                                  config.data.embargo_days.value_or(config.env.window),
                                                  fixed ? &*fixed : nullptr);
  PrepareResult result;
  result.layout.root = out_dir;
  fs::create_directories(out_dir);
  data::save_panel_artifact(out_dir, panel, split, generator_json);
  config.data.path = data_csv;
  config.data.features = features;
  write_text(result.layout.config(), to_ini(config));
  result.days = panel.num_days();
  result.assets = panel.num_assets();
  result.features = panel.num_features();
  result.split = split;
  return result;
}

RunConfig run_config_for(const fs::path& panel_dir, const std::optional<fs::path>& override_path) {
  if (override_path) return load_config(*override_path);
  const RunLayout layout{panel_dir};
  require(fs::exists(layout.manifest()), ErrorKind::kIo,
          panel_dir.string() + " is not a prepared panel (no manifest.json)");
  return fs::exists(layout.config()) ? load_config(layout.config()) : RunConfig{};
}

TrainResult cmd_train(const fs::path& panel_dir, const RunConfig& config) {
  config.validate();
  const RunLayout layout{panel_dir};
  const data::PanelArtifact art = data::load_panel_artifact(panel_dir);
  const data::PanelTensor& panel = art.panel;
  const std::string tag = run_tag(config.train);

  data::AccessLedger ledger(panel.num_days());
  policy::PolicyNet net(config.policy, panel.num_features(),
                        stream_seed(config.train.seed, "init"));
  rl::Trainer trainer(net, panel, config.env, config.train, art.split.train, &ledger);

  TrainResult result;
  result.log = layout.logs() / ("train_" + tag + ".csv");
  result.checkpoint = layout.checkpoints() / (tag + ".ckpt");
  result.access_log = layout.logs() / ("access_" + tag + ".json");
  std::ofstream log = open_out(result.log);
  rl::write_training_log_header(log);

  const nlohmann::json extra{{"algo", rl::to_string(config.train.algo)},
                             {"seed", config.train.seed}};
  auto save = [&](const fs::path& path) {
    fs::create_directories(path.parent_path());
    net.save(path, extra.dump());
  };
  const std::size_t budget = config.train.total_updates();
  try {
    trainer.train(budget, [&](const rl::UpdateLog& row) {
      rl::write_training_log_row(log, row);
      log.flush();
      result.updates.push_back(row);
      const std::size_t every = config.train.checkpoint_every;
      if (every > 0 && row.update % every == 0 && row.update < budget) {
        save(layout.checkpoints() / (tag + "_u" + std::to_string(row.update) + ".ckpt"));
      }
    });
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kTraining) throw;
    // The optimizer refuses non-finite gradients before touching parameters.
    const fs::path last_good = layout.checkpoints() / (tag + "_last_good.ckpt");
    save(last_good);
    fail(ErrorKind::kTraining, std::string(e.what()) + "; last good parameters kept in " +
                                   last_good.string());
  }
  save(result.checkpoint);

  result.train_reads = ledger.reads_in(art.split.train);
  result.test_reads = ledger.reads_in(art.split.test);
  result.validation_reads = art.split.validation ? ledger.reads_in(*art.split.validation) : 0;
  nlohmann::json access{{"train_range", range_json(panel, art.split.train)},
                        {"test_range", range_json(panel, art.split.test)},
                        {"train_reads", result.train_reads},
                        {"validation_reads", result.validation_reads},
                        {"test_reads", result.test_reads},
                        {"total_reads", ledger.total_reads()}};
  write_text(result.access_log, access.dump(2) + "\n");
  require(result.test_reads == 0, ErrorKind::kLeakage,
          "training read " + std::to_string(result.test_reads) + " test-range days");
  return result;
}

EvaluateResult cmd_evaluate(const fs::path& panel_dir, const RunConfig& config,
                            const std::vector<StrategySource>& sources, const std::string& range) {
  require(!sources.empty(), ErrorKind::kConfig, "evaluate: give a checkpoint or a baseline");
  config.env.validate();
  const RunLayout layout{panel_dir};
  const data::PanelArtifact art = data::load_panel_artifact(panel_dir);
  EvaluateResult result;
  result.range = resolve_range(range, config, art);

  std::vector<std::pair<std::string, metrics::MetricsReport>> rows;
  for (const auto& src : sources) {
    Evaluation ev;
    if (src.checkpoint) {
      const policy::PolicyNet net = policy::PolicyNet::load(*src.checkpoint);
      require(net.num_features() == art.panel.num_features(), ErrorKind::kVersion,
              src.checkpoint->string() + " expects " + std::to_string(net.num_features()) +
                  " features, panel has " + std::to_string(art.panel.num_features()));
      ev = evaluate_policy(net, art.panel, config.env, result.range);
      ev.name = src.checkpoint->stem().string();
    } else {
      require(src.baseline.has_value(), ErrorKind::kConfig, "evaluate: empty strategy");
      ev = evaluate_baseline(parse_baseline(*src.baseline), art.panel, config.env, result.range);
    }
    const fs::path dir = layout.reports();
    write_text(dir / (ev.name + "_metrics.json"), metrics::to_json(ev.report) + "\n");
    {
      std::ofstream eq = open_out(dir / (ev.name + "_equity.csv"));
      metrics::write_curve_csv(eq, ev.dates, ev.series.equity);
      std::ofstream dd = open_out(dir / (ev.name + "_drawdown.csv"));
      const auto curve = metrics::drawdown_curve(ev.series.equity);
      metrics::write_curve_csv(dd, ev.dates, curve);
      std::ofstream steps = open_out(dir / (ev.name + "_steps.csv"));
      env::write_step_log_header(steps, art.panel.num_assets());
      for (std::size_t k = 0; k < ev.steps.size(); ++k) {
        env::write_step_log_row(steps, ev.dates[k], ev.steps[k]);
      }
    }
    rows.emplace_back(ev.name, ev.report);
    result.evaluations.push_back(std::move(ev));
  }
  result.table = layout.reports() / "comparison.txt";
  std::ofstream table = open_out(result.table);
  table << "range " << art.panel.dates[result.range.first].iso() << ':'
        << art.panel.dates[result.range.last].iso() << "  kappa " << config.env.kappa << '\n';
  metrics::write_comparison_table(table, rows);
  return result;
}

FinetuneResult cmd_finetune(const fs::path& panel_dir, const RunConfig& config,
                            const fs::path& checkpoint, const rl::FinetuneGrid& grid) {
  config.validate();
  const RunLayout layout{panel_dir};
  const data::PanelArtifact art = data::load_panel_artifact(panel_dir);
  std::string extra_json;
  policy::PolicyNet::load(checkpoint, &extra_json);
  rl::TrainConfig base = config.train;
  const auto extra = nlohmann::json::parse(extra_json);
  if (extra.contains("algo")) base.algo = rl::parse_algo(extra.at("algo").get<std::string>());

  rl::FinetuneSetup setup;
  setup.panel = &art.panel;
  setup.env = config.env;
  setup.base = base;
  setup.train_range = art.split.train;
  setup.eval_range = !config.eval.range.empty()
                         ? parse_range(config.eval.range, art.panel)
                         : (art.split.validation ? *art.split.validation : art.split.test);
  const std::string stem = checkpoint.stem().string();
  FinetuneResult result;
  result.search =
      rl::grid_search_finetune(checkpoint, grid, setup, layout.checkpoints() / ("finetune_" + stem));
  result.results_json = layout.reports() / ("finetune_" + stem + ".json");
  write_text(result.results_json, rl::to_json(result.search.ranked) + "\n");

  std::vector<rl::TrialResult> by_sharpe = result.search.ranked;
  std::stable_sort(by_sharpe.begin(), by_sharpe.end(), [](const auto& a, const auto& b) {
    return a.metrics.sharpe > b.metrics.sharpe;
  });
  result.summary = layout.reports() / ("finetune_" + stem + ".txt");
  std::ofstream out = open_out(result.summary);
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %9s %6s %5s %8s %13s %8s %8s %8s\n", "Algo", "LR",
                "Epochs", "MB", "MB_micro", "Extra updates", "Sharpe", "CAGR", "MDD");
  out << line;
  for (const auto& t : by_sharpe) {
    std::snprintf(line, sizeof(line), "%-10s %9.2e %6zu %5zu %8zu %13zu %8.4f %8.4f %8.4f\n",
                  rl::to_string(base.algo).c_str(), t.lr, t.epochs, t.minibatch, t.microbatch,
                  t.extra_updates, t.metrics.sharpe, t.metrics.cagr, t.metrics.mdd);
    out << line;
  }
  return result;
}

PrepareResult cmd_synthetic(const SyntheticSpec& spec, const fs::path& out_dir, RunConfig config) {
  const SyntheticMarket market = generate_synthetic(spec);
  const fs::path csv = out_dir / "data.csv";
  write_long_csv(csv, market.rows, market.features);
  config.synthetic = spec;
  config.data.features = market.features;
  return cmd_prepare(csv, out_dir, std::move(config), market.generator_json);
}

}  // namespace folio::app
