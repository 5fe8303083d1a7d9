#include "folio/rl/grid_search.hpp"

#include <algorithm>
#include <numeric>

#include "folio/app/evaluate.hpp"
#include "folio/error.hpp"
#include "folio/policy/policy_net.hpp"
#include "folio/rl/trainer.hpp"
#include "json.hpp"

namespace folio::rl {

std::string to_string(EvalMetric metric) {
  switch (metric) {
    case EvalMetric::kSharpe: return "sharpe";
    case EvalMetric::kCagr: return "cagr";
    case EvalMetric::kMdd: return "mdd";
  }
  return "?";
}

EvalMetric parse_eval_metric(const std::string& text) {
  if (text == "sharpe") return EvalMetric::kSharpe;
  if (text == "cagr") return EvalMetric::kCagr;
  if (text == "mdd") return EvalMetric::kMdd;
  fail(ErrorKind::kConfig, "unknown eval metric '" + text + "' (sharpe|cagr|mdd)");
}

double metric_value(const metrics::MetricsReport& report, EvalMetric metric) {
  switch (metric) {
    case EvalMetric::kSharpe: return report.sharpe;
    case EvalMetric::kCagr: return report.cagr;
    case EvalMetric::kMdd: return report.mdd;
  }
  return 0.0;
}

std::vector<std::size_t> rank_descending(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

GridSearchResult grid_search_finetune(const std::filesystem::path& checkpoint,
                                      const FinetuneGrid& grid, const FinetuneSetup& setup,
                                      const std::filesystem::path& out_dir) {
  require(setup.panel != nullptr, ErrorKind::kContract, "grid search: no panel");
  require(!grid.learning_rates.empty() && !grid.epochs.empty() && !grid.minibatches.empty(),
          ErrorKind::kConfig, "grid search: every grid axis needs at least one value");
  require(grid.extra_updates > 0, ErrorKind::kConfig, "grid search: extra_updates must be positive");
  std::filesystem::create_directories(out_dir);
  std::vector<TrialResult> trials;
  for (double lr : grid.learning_rates) {
    for (std::size_t epochs : grid.epochs) {
      for (std::size_t mb : grid.minibatches) {
        TrialResult trial;
        trial.trial = trials.size();
        trial.lr = lr;
        trial.epochs = epochs;
        trial.minibatch = mb;
        trial.microbatch = grid.microbatch;
        trial.extra_updates = grid.extra_updates;

        policy::PolicyNet net = policy::PolicyNet::load(checkpoint);
        require(net.num_features() == setup.panel->num_features(), ErrorKind::kVersion,
                "checkpoint expects " + std::to_string(net.num_features()) +
                    " features, panel has " + std::to_string(setup.panel->num_features()));
        TrainConfig cfg = setup.base;
        cfg.lr = lr;
        cfg.epochs_per_update = epochs;
        cfg.minibatch = mb;
        cfg.microbatch = grid.microbatch;
        Trainer trainer(net, *setup.panel, setup.env, cfg, setup.train_range, setup.ledger);
        trainer.train(grid.extra_updates);
        const app::Evaluation ev =
            app::evaluate_policy(net, *setup.panel, setup.env, setup.eval_range);
        trial.metrics = ev.report;
        trial.checkpoint = out_dir / ("trial_" + std::to_string(trial.trial) + ".ckpt");
        nlohmann::json extra{{"algo", to_string(cfg.algo)},
                             {"lr", lr},
                             {"epochs", epochs},
                             {"minibatch", mb},
                             {"microbatch", grid.microbatch},
                             {"extra_updates", grid.extra_updates}};
        net.save(trial.checkpoint, extra.dump());
        trials.push_back(std::move(trial));
      }
    }
  }
  std::vector<double> scores;
  for (const auto& t : trials) scores.push_back(metric_value(t.metrics, grid.metric));
  GridSearchResult result;
  for (std::size_t k : rank_descending(scores)) result.ranked.push_back(trials[k]);
  result.best_checkpoint = out_dir / "best.ckpt";
  std::filesystem::copy_file(result.ranked.front().checkpoint, result.best_checkpoint,
                             std::filesystem::copy_options::overwrite_existing);
  return result;
}

std::string to_json(const std::vector<TrialResult>& trials) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : trials) {
    arr.push_back({{"trial", t.trial},
                   {"lr", t.lr},
                   {"epochs", t.epochs},
                   {"minibatch", t.minibatch},
                   {"microbatch", t.microbatch},
                   {"extra_updates", t.extra_updates},
                   {"checkpoint", t.checkpoint.filename().string()},
                   {"metrics", nlohmann::json::parse(metrics::to_json(t.metrics))}});
  }
  return arr.dump(2);
}

}  // namespace folio::rl
