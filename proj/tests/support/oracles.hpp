#pragma once

#include <cmath>
#include <span>

#include "folio/data/panel.hpp"

namespace folio::testing {

/// w'Sw with S the pairwise-complete sample covariance of the L returns
/// ending at day t, over names tradable at t.
inline double brute_variance(const data::PanelTensor& p, std::size_t t, std::size_t L,
                      std::span<const double> w) {
  const std::size_t N = p.num_assets();
  double var = 0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      if (!p.tradable(t, i) || !p.tradable(t, j)) continue;
      double mi = 0, mj = 0, n = 0;
      for (std::size_t s = t + 1 - L; s <= t; ++s) {
        const double a = p.simple_return(s, i), b = p.simple_return(s, j);
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        mi += a, mj += b, n += 1;
      }
      if (n < 2) continue;
      mi /= n, mj /= n;
      double c = 0;
      for (std::size_t s = t + 1 - L; s <= t; ++s) {
        const double a = p.simple_return(s, i), b = p.simple_return(s, j);
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        c += (a - mi) * (b - mj);
      }
      var += w[i + 1] * w[j + 1] * c / (n - 1);
    }
  }
  return var;
}

}  // namespace folio::testing
