#include "folio/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>

#include "folio/error.hpp"
#include "json.hpp"

namespace folio::metrics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

ReturnSeries ReturnSeries::from_returns(std::vector<double> returns,
                                        std::vector<data::Date> dates) {
  ReturnSeries s;
  s.net_returns = std::move(returns);
  s.dates = std::move(dates);
  s.equity.reserve(s.net_returns.size());
  double wealth = 1.0;
  for (double r : s.net_returns) {
    wealth *= 1.0 + r;
    s.equity.push_back(wealth);
  }
  return s;
}

double percentile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorKind::kData, "percentile of an empty series");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> drawdown_curve(std::span<const double> equity) {
  std::vector<double> dd(equity.size());
  double peak = -kInf;
  for (std::size_t t = 0; t < equity.size(); ++t) {
    peak = std::max(peak, equity[t]);
    dd[t] = equity[t] / peak - 1.0;
  }
  return dd;
}

double max_drawdown(std::span<const double> equity) {
  const auto dd = drawdown_curve(equity);
  return dd.empty() ? 0.0 : *std::min_element(dd.begin(), dd.end());
}

MetricsReport compute_metrics(const ReturnSeries& series, int periods_per_year) {
  const auto& r = series.net_returns;
  const std::size_t n = r.size();
  require(n >= 2, ErrorKind::kData, "metrics need at least two observations");
  require(series.equity.size() == n, ErrorKind::kData, "equity and returns differ in length");
  const double ppy = static_cast<double>(periods_per_year);
  const double dn = static_cast<double>(n);

  MetricsReport m;
  m.observations = n;
  m.terminal_wealth = series.equity.back();
  m.cagr = std::pow(m.terminal_wealth, ppy / dn) - 1.0;

  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= dn;
  // the summed mean of a constant series can miss it by an ulp
  const auto [lo_it, hi_it] = std::minmax_element(r.begin(), r.end());
  if (*lo_it == *hi_it) mean = *lo_it;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, downside = 0.0;
  std::size_t wins = 0, losses = 0;
  double gain_sum = 0.0, loss_sum = 0.0;
  for (double v : r) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    const double low = std::min(v, 0.0);
    downside += low * low;
    if (v > 0.0) {
      ++wins;
      gain_sum += v;
    } else if (v < 0.0) {
      ++losses;
      loss_sum += v;
    }
  }
  const double sample_sd = std::sqrt(m2 / (dn - 1.0));
  m.ann_return = ppy * mean;
  m.ann_vol = std::sqrt(ppy) * sample_sd;
  if (m.ann_vol > 0.0) {
    m.sharpe = m.ann_return / m.ann_vol;
  } else {
    m.sharpe = m.ann_return >= 0.0 ? kInf : -kInf;
    m.sharpe_defined = false;
  }
  const double downside_dev = std::sqrt(ppy * downside / dn);
  if (downside_dev > 0.0) {
    m.sortino = m.ann_return / downside_dev;
  } else {
    m.sortino = m.ann_return >= 0.0 ? kInf : -kInf;
    m.sortino_defined = false;
  }
  m.mdd = max_drawdown(series.equity);
  if (m.mdd < 0.0) {
    m.calmar = m.cagr / std::abs(m.mdd);
  } else {
    m.calmar = m.cagr >= 0.0 ? kInf : -kInf;
    m.calmar_defined = false;
  }
  m.hit_rate = static_cast<double>(wins) / dn;
  m.avg_gain = wins ? gain_sum / static_cast<double>(wins) : 0.0;
  m.avg_loss = losses ? loss_sum / static_cast<double>(losses) : 0.0;
  const double pop_var = m2 / dn;
  if (pop_var > 0.0) {
    m.skewness = (m3 / dn) / std::pow(pop_var, 1.5);
    m.kurtosis = (m4 / dn) / (pop_var * pop_var) - 3.0;
  }
  m.var_5 = percentile(r, 0.05);
  double tail_sum = 0.0;
  std::size_t tail_n = 0;
  for (double v : r) {
    if (v <= m.var_5) {
      tail_sum += v;
      ++tail_n;
    }
  }
  m.cvar_5 = tail_sum / static_cast<double>(tail_n);
  const double p95 = percentile(r, 0.95);
  m.tail_ratio = m.var_5 != 0.0 ? std::abs(p95) / std::abs(m.var_5) : kInf;
  return m;
}

std::string to_json(const MetricsReport& m) {
  nlohmann::json j{{"terminal_wealth", m.terminal_wealth},
                   {"cagr", m.cagr},
                   {"ann_return", m.ann_return},
                   {"ann_vol", m.ann_vol},
                   {"sharpe", number_or_null(m.sharpe)},
                   {"sharpe_defined", m.sharpe_defined},
                   {"sortino", number_or_null(m.sortino)},
                   {"sortino_defined", m.sortino_defined},
                   {"mdd", m.mdd},
                   {"calmar", number_or_null(m.calmar)},
                   {"calmar_defined", m.calmar_defined},
                   {"hit_rate", m.hit_rate},
                   {"avg_gain", m.avg_gain},
                   {"avg_loss", m.avg_loss},
                   {"skewness", m.skewness},
                   {"kurtosis", m.kurtosis},
                   {"var_5", m.var_5},
                   {"cvar_5", m.cvar_5},
                   {"tail_ratio", number_or_null(m.tail_ratio)},
                   {"observations", m.observations}};
  return j.dump(2);
}

void write_comparison_table(std::ostream& out,
                            const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  int width = 4;
  for (const auto& row : rows) width = std::max(width, static_cast<int>(row.first.size()));
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s %12s %8s %9s %9s %8s %8s %8s %8s\n", width, "Algo",
                "Term. Wealth", "CAGR", "Ann. Ret.", "Ann. Vol.", "Sharpe", "Sortino", "Calmar",
                "MDD");
  out << line;
  for (const auto& [name, m] : rows) {
    std::snprintf(line, sizeof(line), "%-*s %12.4f %8.4f %9.4f %9.4f %8.4f %8.4f %8.4f %8.4f\n",
                  width, name.c_str(), m.terminal_wealth, m.cagr, m.ann_return, m.ann_vol,
                  m.sharpe, m.sortino, m.calmar, m.mdd);
    out << line;
  }
}

void write_curve_csv(std::ostream& out, std::span<const data::Date> dates,
                     std::span<const double> values) {
  out << "date,value\n" << std::setprecision(17);
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (t < dates.size()) {
      out << dates[t].iso();
    } else {
      out << t;
    }
    out << ',' << values[t] << '\n';
  }
}

}  // namespace folio::metrics
