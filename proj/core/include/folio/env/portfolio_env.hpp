#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "folio/data/panel.hpp"

namespace folio::env {

struct EnvConfig {
  std::size_t window = 30;
  /// Cost per unit of risky turnover (5 bps).
  double kappa = 5e-4;
  double lambda_risk = 0.0;
  std::size_t cov_window = 60;
  bool include_cash = true;
  /// Uniform per-name upper bound; unset means uncapped.
  std::optional<double> name_cap;

  void validate() const;
  /// Earliest decision day: max(W - 1, L - 1).
  std::size_t min_start() const;
};

struct EnvState {
  std::size_t t = 0;
  data::WindowView window;
  std::span<const std::uint8_t> mask;
  /// Pre-trade weights [cash, assets...] after yesterday's prices moved.
  std::vector<double> drifted_weights;
  double wealth = 1.0;
  /// Market-level covariates; empty unless a caller supplies them.
  std::vector<double> market;
};

struct StepInfo {
  double gross_log_return = 0.0;
  double gross_simple_return = 0.0;
  double turnover = 0.0;
  double cost_paid = 0.0;
  double risk_penalty = 0.0;
  double net_simple_return = 0.0;
  std::vector<double> realized_weights;
};

struct StepResult {
  double reward = 0.0;
  bool terminal = false;
  StepInfo info;
};

/// Value-weighted drift with cash growing at 1; names masked tomorrow have
/// their post-drift value swept to cash. Missing returns count as 0.
std::vector<double> drift_weights(std::span<const double> w, std::span<const double> returns,
                                  std::span<const std::uint8_t> mask_next);

/// Sample covariance (divide by n - 1) of an L x N block of simple returns
/// using pairwise-complete observations. Rows and columns of masked names are
/// zero; negative eigenvalues are clipped to 0 when pairwise deletion breaks
/// positive semidefiniteness.
data::Matrix rolling_covariance(const data::Matrix& returns, std::span<const std::uint8_t> mask);

/// Daily-rebalancing portfolio MDP over a read-only panel.
///
/// `horizon.last` is the last day the environment may read; a step at day t
/// consumes returns from day t + 1, so the episode ends once t reaches it.
/// Every day touched is recorded in the optional ledger.
class PortfolioEnv {
 public:
  PortfolioEnv(const data::PanelTensor& panel, EnvConfig config, data::DayRange horizon,
               data::AccessLedger* ledger = nullptr);

  const EnvState& reset(std::size_t start);
  StepResult step(std::span<const double> target);

  const EnvState& state() const { return state_; }
  const EnvConfig& config() const { return config_; }
  const data::PanelTensor& panel() const { return *panel_; }
  bool done() const { return done_; }
  std::size_t steps_remaining() const;

  /// Per-name caps for the current mask: name_cap where tradable, 0 where not.
  std::optional<std::vector<double>> caps() const;

 private:
  void emit_state(std::size_t t);
  double risk_penalty(std::span<const double> target) const;

  const data::PanelTensor* panel_;
  EnvConfig config_;
  data::DayRange horizon_;
  data::AccessLedger* ledger_;
  EnvState state_;
  bool done_ = true;
};

void write_step_log_header(std::ostream& out, std::size_t num_assets);
void write_step_log_row(std::ostream& out, const data::Date& date, const StepResult& result);

}  // namespace folio::env
