#pragma once

#include <string>
#include <vector>

#include "folio/data/panel.hpp"
#include "folio/env/portfolio_env.hpp"
#include "folio/metrics/metrics.hpp"
#include "folio/policy/policy_net.hpp"

namespace folio::app {

enum class Baseline { kEqualWeightBuyAndHold, kAllCash };

std::string to_string(Baseline baseline);
Baseline parse_baseline(const std::string& text);

struct Evaluation {
  std::string name;
  data::DayRange range;
  /// Realization dates: the return of the decision at day t lands on t + 1.
  std::vector<data::Date> dates;
  std::vector<env::StepResult> steps;
  metrics::ReturnSeries series;
  metrics::MetricsReport report;
};

/// Deterministic (mean-action) rollout from `range.first` to `range.last`.
Evaluation evaluate_policy(const policy::PolicyNet& policy, const data::PanelTensor& panel,
                           const env::EnvConfig& config, data::DayRange range,
                           data::AccessLedger* ledger = nullptr);

/// Equal weight across tradable names at the start, drifting afterwards and
/// re-levelled only on days the tradable set changes; or all cash.
Evaluation evaluate_baseline(Baseline baseline, const data::PanelTensor& panel,
                             const env::EnvConfig& config, data::DayRange range,
                             data::AccessLedger* ledger = nullptr);

/// Parses "from:to" with ISO dates (or bare day indices); either side may be
/// empty to mean the panel edge. Dates are snapped inward to trading days.
data::DayRange parse_range(const std::string& text, const data::PanelTensor& panel);

}  // namespace folio::app
