#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "folio/data/date.hpp"

namespace folio::metrics {

inline constexpr int kTradingDaysPerYear = 252;

/// Net daily simple returns and the equity curve they compound to,
/// equity_t = prod_{s<=t} (1 + r_s).
struct ReturnSeries {
  std::vector<data::Date> dates;
  std::vector<double> net_returns;
  std::vector<double> equity;

  static ReturnSeries from_returns(std::vector<double> returns,
                                   std::vector<data::Date> dates = {});
};

struct MetricsReport {
  double terminal_wealth = 0.0;
  double cagr = 0.0;
  double ann_return = 0.0;
  double ann_vol = 0.0;
  /// +/-inf with sharpe_defined = false when volatility is zero.
  double sharpe = 0.0;
  bool sharpe_defined = true;
  /// +inf with sortino_defined = false when there is no downside.
  double sortino = 0.0;
  bool sortino_defined = true;
  double mdd = 0.0;
  /// +/-inf with calmar_defined = false when the drawdown is zero.
  double calmar = 0.0;
  bool calmar_defined = true;
  double hit_rate = 0.0;
  double avg_gain = 0.0;
  double avg_loss = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  double var_5 = 0.0;
  double cvar_5 = 0.0;
  double tail_ratio = 0.0;
  std::size_t observations = 0;
};

/// Linear interpolation between order statistics at rank q * (n - 1).
double percentile(std::vector<double> values, double q);

/// dd_t = equity_t / max_{s<=t} equity_s - 1.
std::vector<double> drawdown_curve(std::span<const double> equity);

double max_drawdown(std::span<const double> equity);

MetricsReport compute_metrics(const ReturnSeries& series,
                              int periods_per_year = kTradingDaysPerYear);

std::string to_json(const MetricsReport& report);

/// Aligned text table: Algo, Term. Wealth, CAGR, Ann. Ret., Ann. Vol.,
/// Sharpe, Sortino, Calmar, MDD.
void write_comparison_table(std::ostream& out,
                            const std::vector<std::pair<std::string, MetricsReport>>& rows);

/// `date,value` rows; dates fall back to the row index when absent.
void write_curve_csv(std::ostream& out, std::span<const data::Date> dates,
                     std::span<const double> values);

}  // namespace folio::metrics
