#include "folio/env/portfolio_env.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include <Eigen/Eigenvalues>

#include "folio/error.hpp"

namespace folio::env {
namespace {

constexpr double kWipeoutReward = -18.420680743952367;  // ln(1e-8)
constexpr double kFeasibilityTol = 1e-9;

}  // namespace

void EnvConfig::validate() const {
  require(window >= 1, ErrorKind::kConfig, "env: window must be >= 1");
  require(kappa >= 0.0, ErrorKind::kConfig, "env: kappa must be >= 0");
  require(lambda_risk >= 0.0, ErrorKind::kConfig, "env: lambda must be >= 0");
  require(lambda_risk == 0.0 || cov_window >= 2, ErrorKind::kConfig,
          "env: cov_window must be >= 2 when lambda > 0");
  if (name_cap) {
    require(*name_cap > 0.0 && *name_cap <= 1.0, ErrorKind::kConfig,
            "env: name cap must lie in (0, 1]");
  }
}

std::size_t EnvConfig::min_start() const {
  return std::max(window, std::max<std::size_t>(cov_window, 1)) - 1;
}

std::vector<double> drift_weights(std::span<const double> w, std::span<const double> returns,
                                  std::span<const std::uint8_t> mask_next) {
  require(w.size() == returns.size() + 1 && mask_next.size() == returns.size(), ErrorKind::kShape,
          "drift_weights: weights, returns and mask disagree in size");
  std::vector<double> value(w.size());
  value[0] = w[0];
  double total = w[0];
  for (std::size_t i = 0; i < returns.size(); ++i) {
    const double r = std::isfinite(returns[i]) ? returns[i] : 0.0;
    value[i + 1] = w[i + 1] * (1.0 + r);
    total += value[i + 1];
  }
  for (std::size_t i = 0; i < returns.size(); ++i) {
    if (!mask_next[i]) {
      value[0] += value[i + 1];
      value[i + 1] = 0.0;
    }
  }
  if (!(total > 0.0)) {
    std::vector<double> cash(w.size(), 0.0);
    cash[0] = 1.0;
    return cash;
  }
  for (double& v : value) v /= total;
  return value;
}

data::Matrix rolling_covariance(const data::Matrix& returns, std::span<const std::uint8_t> mask) {
  const std::size_t L = returns.rows();
  const std::size_t N = returns.cols();
  require(L >= 2, ErrorKind::kConfig, "rolling_covariance: need at least 2 observations");
  require(mask.size() == N, ErrorKind::kShape, "rolling_covariance: mask length mismatch");

  data::Matrix cov(N, N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    if (!mask[i]) continue;
    for (std::size_t j = i; j < N; ++j) {
      if (!mask[j]) continue;
      // Shift by the first complete pair so constant series give exactly 0.
      double ki = 0.0, kj = 0.0;
      bool shifted = false;
      double si = 0.0, sj = 0.0;
      std::size_t n = 0;
      for (std::size_t t = 0; t < L; ++t) {
        const double a = returns(t, i), b = returns(t, j);
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        if (!shifted) {
          ki = a;
          kj = b;
          shifted = true;
        }
        si += a - ki;
        sj += b - kj;
        ++n;
      }
      if (n < 2) continue;
      const double mi = si / static_cast<double>(n);
      const double mj = sj / static_cast<double>(n);
      double acc = 0.0;
      for (std::size_t t = 0; t < L; ++t) {
        const double a = returns(t, i), b = returns(t, j);
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        acc += (a - ki - mi) * (b - kj - mj);
      }
      cov(i, j) = cov(j, i) = acc / static_cast<double>(n - 1);
    }
  }

  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      cov.data().data(), static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  if (N > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
    // Rounding alone leaves eigenvalues of order 1e-16 * scale; repair only
    // genuine indefiniteness from pairwise deletion.
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
      const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
      Eigen::MatrixXd repaired =
          eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
      repaired = 0.5 * (repaired + repaired.transpose());
      m = repaired;
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
          if (!mask[i] || !mask[j]) cov(i, j) = 0.0;
        }
      }
    }
  }
  return cov;
}

PortfolioEnv::PortfolioEnv(const data::PanelTensor& panel, EnvConfig config,
                           data::DayRange horizon, data::AccessLedger* ledger)
    : panel_(&panel), config_(std::move(config)), horizon_(horizon), ledger_(ledger) {
  config_.validate();
  require(horizon_.last < panel.num_days() && horizon_.first <= horizon_.last, ErrorKind::kRange,
          "env: horizon lies outside the panel");
}

std::size_t PortfolioEnv::steps_remaining() const {
  return done_ ? 0 : horizon_.last - state_.t;
}

std::optional<std::vector<double>> PortfolioEnv::caps() const {
  if (!config_.name_cap) return std::nullopt;
  std::vector<double> caps(panel_->num_assets());
  for (std::size_t i = 0; i < caps.size(); ++i) caps[i] = state_.mask[i] ? *config_.name_cap : 0.0;
  return caps;
}

void PortfolioEnv::emit_state(std::size_t t) {
  require(t <= horizon_.last, ErrorKind::kLeakage,
          "env: day " + std::to_string(t) + " lies past the readable horizon");
  state_.t = t;
  state_.window = data::window_view(*panel_, t, config_.window);
  state_.mask = panel_->mask_row(t);
  if (ledger_) ledger_->record(t + 1 - config_.window, t);
}

const EnvState& PortfolioEnv::reset(std::size_t start) {
  require(start >= config_.min_start(), ErrorKind::kWindow,
          "env: start day " + std::to_string(start) + " precedes the first full window (" +
              std::to_string(config_.min_start()) + ")");
  require(start >= horizon_.first && start < horizon_.last, ErrorKind::kRange,
          "env: start day " + std::to_string(start) + " is outside the episode horizon");
  emit_state(start);
  state_.drifted_weights.assign(panel_->num_assets() + 1, 0.0);
  state_.drifted_weights[0] = 1.0;
  state_.wealth = 1.0;
  state_.market.clear();
  done_ = false;
  return state_;
}

double PortfolioEnv::risk_penalty(std::span<const double> target) const {
  const std::size_t L = config_.cov_window;
  const std::size_t N = panel_->num_assets();
  const std::size_t t = state_.t;
  data::Matrix block(L, N, data::kMissing);
  const std::size_t first = t + 1 - L;
  if (ledger_) ledger_->record(first, t);
  for (std::size_t k = 0; k < L; ++k) {
    const auto row = panel_->return_row(first + k);
    std::copy(row.begin(), row.end(), block.row(k).begin());
  }
  const data::Matrix cov = rolling_covariance(block, state_.mask);
  double q = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) q += target[i + 1] * cov(i, j) * target[j + 1];
  }
  return std::max(q, 0.0);
}

StepResult PortfolioEnv::step(std::span<const double> target) {
  require(!done_, ErrorKind::kContract, "env: step() called on a finished episode");
  const std::size_t N = panel_->num_assets();
  require(target.size() == N + 1, ErrorKind::kShape,
          "env: target has " + std::to_string(target.size()) + " weights, expected " +
              std::to_string(N + 1));

  double total = 0.0;
  for (std::size_t k = 0; k <= N; ++k) {
    require(target[k] >= -kFeasibilityTol, ErrorKind::kAction, "env: negative target weight");
    total += target[k];
    if (k > 0) {
      require(state_.mask[k - 1] || target[k] <= kFeasibilityTol, ErrorKind::kAction,
              "env: target places " + std::to_string(target[k]) + " on untradable " +
                  panel_->tickers[k - 1]);
      if (config_.name_cap) {
        require(target[k] <= *config_.name_cap + kFeasibilityTol, ErrorKind::kAction,
                "env: target breaches the name cap on " + panel_->tickers[k - 1]);
      }
    }
  }
  require(std::abs(total - 1.0) <= kFeasibilityTol, ErrorKind::kAction,
          "env: target weights sum to " + std::to_string(total));
  require(config_.include_cash || target[0] <= kFeasibilityTol, ErrorKind::kAction,
          "env: cash is disabled but the target holds cash");

  const std::size_t t = state_.t;
  const std::size_t next = t + 1;
  if (ledger_) ledger_->record(next);
  const auto returns = panel_->return_row(next);

  StepResult result;
  StepInfo& info = result.info;
  for (std::size_t i = 0; i < N; ++i) {
    info.turnover += std::abs(target[i + 1] - state_.drifted_weights[i + 1]);
    if (state_.mask[i] && std::isfinite(returns[i])) info.gross_simple_return += target[i + 1] * returns[i];
  }
  info.cost_paid = config_.kappa * info.turnover;
  info.risk_penalty = config_.lambda_risk > 0.0 ? risk_penalty(target) : 0.0;
  info.realized_weights.assign(target.begin(), target.end());

  const double growth = 1.0 + info.gross_simple_return;
  if (!(growth > 0.0)) {
    info.gross_log_return = kWipeoutReward;
    result.reward = kWipeoutReward;
    result.terminal = true;
    state_.wealth = 0.0;
    info.net_simple_return = -1.0;
    done_ = true;
    return result;
  }
  info.gross_log_return = std::log1p(info.gross_simple_return);
  result.reward = info.gross_log_return - config_.kappa * info.turnover -
                  config_.lambda_risk * info.risk_penalty;
  const double net_growth = growth * (1.0 - info.cost_paid);
  info.net_simple_return = net_growth - 1.0;
  state_.wealth *= net_growth;

  state_.drifted_weights = drift_weights(target, returns, panel_->mask_row(next));
  emit_state(next);
  if (next >= horizon_.last) {
    result.terminal = true;
    done_ = true;
  }
  return result;
}

void write_step_log_header(std::ostream& out, std::size_t num_assets) {
  out << "date,reward,gross_log_return,turnover,cost_paid,risk_penalty,net_simple_return";
  out << ",w_cash";
  for (std::size_t i = 0; i < num_assets; ++i) out << ",w_" << i + 1;
  out << '\n';
}

void write_step_log_row(std::ostream& out, const data::Date& date, const StepResult& result) {
  const auto& info = result.info;
  out << date.iso() << std::setprecision(17) << ',' << result.reward << ','
      << info.gross_log_return << ',' << info.turnover << ',' << info.cost_paid << ','
      << info.risk_penalty << ',' << info.net_simple_return;
  for (double w : info.realized_weights) out << ',' << w;
  out << '\n';
}

}  // namespace folio::env
