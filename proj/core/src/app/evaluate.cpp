#include "folio/app/evaluate.hpp"

#include <algorithm>

#include "folio/error.hpp"
#include "folio/simplex/projection.hpp"

namespace folio::app {

std::string to_string(Baseline baseline) {
  return baseline == Baseline::kAllCash ? "all_cash" : "equal_weight_buy_and_hold";
}

Baseline parse_baseline(const std::string& text) {
  if (text == "equal_weight_buy_and_hold" || text == "buy_and_hold") {
    return Baseline::kEqualWeightBuyAndHold;
  }
  if (text == "all_cash") return Baseline::kAllCash;
  fail(ErrorKind::kConfig,
       "unknown baseline '" + text + "' (equal_weight_buy_and_hold|all_cash)");
}

namespace {

void check_range(const data::PanelTensor& panel, const env::EnvConfig& config,
                 data::DayRange range) {
  require(range.last < panel.num_days() && range.first < range.last, ErrorKind::kRange,
          "evaluation range [" + std::to_string(range.first) + ", " + std::to_string(range.last) +
              "] is empty or outside the panel (" + std::to_string(panel.num_days()) + " days)");
  require(range.first >= config.min_start(), ErrorKind::kRange,
          "evaluation range starts at day " + std::to_string(range.first) +
              " before the first full window (day " + std::to_string(config.min_start()) + ")");
}

template <typename Decide>
Evaluation run(const std::string& name, const data::PanelTensor& panel,
               const env::EnvConfig& config, data::DayRange range, data::AccessLedger* ledger,
               Decide&& decide) {
  check_range(panel, config, range);
  env::PortfolioEnv env(panel, config, range, ledger);
  env.reset(range.first);
  Evaluation ev;
  ev.name = name;
  ev.range = range;
  std::vector<double> returns;
  while (!env.done()) {
    const std::size_t t = env.state().t;
    const std::vector<double> target = decide(env);
    ev.steps.push_back(env.step(target));
    returns.push_back(ev.steps.back().info.net_simple_return);
    ev.dates.push_back(panel.dates[t + 1]);
  }
  ev.series = metrics::ReturnSeries::from_returns(std::move(returns), ev.dates);
  ev.report = metrics::compute_metrics(ev.series);
  return ev;
}

}  // namespace

Evaluation evaluate_policy(const policy::PolicyNet& policy, const data::PanelTensor& panel,
                           const env::EnvConfig& config, data::DayRange range,
                           data::AccessLedger* ledger) {
  return run("policy", panel, config, range, ledger, [&](const env::PortfolioEnv& env) {
    policy::ActOptions options;
    options.include_cash = config.include_cash;
    options.caps = env.caps();
    return policy.act(env.state(), policy::ActMode::kMean, nullptr, options).weights;
  });
}

Evaluation evaluate_baseline(Baseline baseline, const data::PanelTensor& panel,
                             const env::EnvConfig& config, data::DayRange range,
                             data::AccessLedger* ledger) {
  const std::size_t n = panel.num_assets();
  if (baseline == Baseline::kAllCash) {
    return run(to_string(baseline), panel, config, range, ledger, [n](const env::PortfolioEnv&) {
      std::vector<double> w(n + 1, 0.0);
      w[0] = 1.0;
      return w;
    });
  }
  std::vector<std::uint8_t> held;
  return run(to_string(baseline), panel, config, range, ledger,
             [&](const env::PortfolioEnv& env) {
               const auto& s = env.state();
               const bool relevel = held.empty() || !std::equal(held.begin(), held.end(),
                                                                s.mask.begin(), s.mask.end());
               if (!relevel) return s.drifted_weights;
               held.assign(s.mask.begin(), s.mask.end());
               const auto live = static_cast<double>(std::count(held.begin(), held.end(), 1));
               std::vector<double> w(n + 1, 0.0);
               if (live == 0.0) {
                 w[0] = 1.0;
                 return w;
               }
               for (std::size_t i = 0; i < n; ++i) w[i + 1] = held[i] ? 1.0 / live : 0.0;
               if (const auto caps = env.caps()) {
                 w = simplex::project_capped_simplex(w, *caps, config.include_cash);
               }
               return w;
             });
}

data::DayRange parse_range(const std::string& text, const data::PanelTensor& panel) {
  require(panel.num_days() > 0, ErrorKind::kRange, "range: empty panel");
  const auto colon = text.find(':');
  require(colon != std::string::npos, ErrorKind::kRange,
          "range '" + text + "' must look like from:to");
  const std::string lhs = text.substr(0, colon);
  const std::string rhs = text.substr(colon + 1);
  const auto& dates = panel.dates;
  auto is_index = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  data::DayRange r{0, panel.num_days() - 1};
  if (!lhs.empty()) {
    if (is_index(lhs)) {
      r.first = std::stoul(lhs);
    } else {
      const auto parsed = data::parse_date(lhs);
      require(parsed.has_value(), ErrorKind::kRange, "range: bad date '" + lhs + "'");
      const data::Date d = *parsed;
      r.first = static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), d) -
                                         dates.begin());
    }
  }
  if (!rhs.empty()) {
    if (is_index(rhs)) {
      r.last = std::stoul(rhs);
    } else {
      const auto parsed = data::parse_date(rhs);
      require(parsed.has_value(), ErrorKind::kRange, "range: bad date '" + rhs + "'");
      const data::Date d = *parsed;
      const auto it = std::upper_bound(dates.begin(), dates.end(), d);
      require(it != dates.begin(), ErrorKind::kRange, "range ends before the first panel date");
      r.last = static_cast<std::size_t>(it - dates.begin()) - 1;
    }
  }
  require(r.first < panel.num_days() && r.last < panel.num_days() && r.first < r.last,
          ErrorKind::kRange, "range '" + text + "' is empty or outside the panel");
  return r;
}

}  // namespace folio::app
