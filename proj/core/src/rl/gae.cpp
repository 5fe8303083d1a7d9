#include "folio/rl/gae.hpp"

#include <cmath>

#include "folio/error.hpp"

namespace folio::rl {

AdvantageTargets compute_gae(std::span<const double> rewards, std::span<const double> values,
                             double bootstrap, double gamma, double lam,
                             std::span<const std::uint8_t> dones) {
  const std::size_t n = rewards.size();
  require(values.size() == n, ErrorKind::kShape, "compute_gae: rewards and values differ");
  require(dones.empty() || dones.size() == n, ErrorKind::kShape,
          "compute_gae: done flags differ in length");
  AdvantageTargets out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  double next_value = bootstrap;
  for (std::size_t k = n; k-- > 0;) {
    const bool terminal = !dones.empty() && dones[k];
    const double v_next = terminal ? 0.0 : next_value;
    const double delta = rewards[k] + gamma * v_next - values[k];
    const double adv = delta + (terminal ? 0.0 : gamma * lam * next_adv);
    out.advantages[k] = adv;
    out.returns[k] = adv + values[k];
    next_adv = adv;
    next_value = values[k];
  }
  return out;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t k = rewards.size(); k-- > 0;) {
    acc = rewards[k] + gamma * acc;
    g[k] = acc;
  }
  return g;
}

void normalize_in_place(std::span<double> values) {
  if (values.empty()) return;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double sd = std::sqrt(var);
  for (double& v : values) v = sd > 1e-12 ? (v - mean) / sd : v - mean;
}

}  // namespace folio::rl
