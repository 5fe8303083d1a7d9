#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace folio::rl {

struct AdvantageTargets {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// GAE(lambda). `dones[t]` (optional) marks a terminal transition: the value
/// after it is taken as 0 and the recursion does not cross it. `bootstrap` is
/// V at the state following the last step.
AdvantageTargets compute_gae(std::span<const double> rewards, std::span<const double> values,
                             double bootstrap, double gamma, double lam,
                             std::span<const std::uint8_t> dones = {});

/// Discounted suffix sums G_t = sum_k gamma^k r_{t+k}, no bootstrap.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

/// Zero mean, unit variance. A constant batch is centered only.
void normalize_in_place(std::span<double> values);

}  // namespace folio::rl
