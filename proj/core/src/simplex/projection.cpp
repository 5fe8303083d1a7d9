#include "folio/simplex/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "folio/error.hpp"

namespace folio::simplex {

std::vector<double> mask_and_renormalize(std::span<const double> p,
                                         std::span<const std::uint8_t> mask) {
  require(p.size() == mask.size(), ErrorKind::kShape,
          "mask_and_renormalize: point and mask lengths differ");
  std::vector<double> w(p.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (mask[k]) {
      w[k] = p[k];
      total += p[k];
    }
  }
  require(total >= 1e-12, ErrorKind::kDegenerateMask,
          "mask_and_renormalize: no mass left on feasible coordinates");
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> mask_and_renormalize_assets(std::span<const double> p,
                                                std::span<const std::uint8_t> asset_mask,
                                                bool cash_feasible) {
  std::vector<std::uint8_t> full(asset_mask.size() + 1);
  full[0] = cash_feasible ? 1 : 0;
  std::copy(asset_mask.begin(), asset_mask.end(), full.begin() + 1);
  return mask_and_renormalize(p, full);
}

std::vector<double> project_box_sum(std::span<const double> v, std::span<const double> caps,
                                    double total) {
  const std::size_t n = v.size();
  require(caps.size() == n, ErrorKind::kShape, "project_box_sum: caps length mismatch");
  enum class Slot : std::uint8_t { kFree, kAtCap, kAtZero };
  std::vector<Slot> slot(n, Slot::kFree);
  for (std::size_t i = 0; i < n; ++i) {
    if (caps[i] <= 0.0) slot[i] = Slot::kAtCap;
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t iter = 0; iter <= n; ++iter) {
    double fixed_mass = 0.0;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (slot[i] == Slot::kAtCap) fixed_mass += std::max(caps[i], 0.0);
      if (slot[i] == Slot::kFree) {
        free_sum += v[i];
        ++free_count;
      }
    }
    if (free_count == 0) break;
    const double shift = (free_sum - (total - fixed_mass)) / static_cast<double>(free_count);

    std::size_t worst = n;
    double worst_violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (slot[i] != Slot::kFree) continue;
      const double candidate = v[i] - shift;
      const double violation = std::max(candidate - caps[i], -candidate);
      if (violation > worst_violation) {
        worst_violation = violation;
        worst = i;
      }
    }
    if (worst == n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (slot[i] == Slot::kFree) x[i] = v[i] - shift;
      }
      break;
    }
    slot[worst] = (v[worst] - shift > caps[worst]) ? Slot::kAtCap : Slot::kAtZero;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (slot[i] == Slot::kAtCap) x[i] = std::max(caps[i], 0.0);
    if (slot[i] == Slot::kAtZero) x[i] = 0.0;
    x[i] = std::clamp(x[i], 0.0, std::max(caps[i], 0.0));
  }
  return x;
}

std::vector<double> project_capped_simplex(std::span<const double> w,
                                           std::span<const double> caps, bool cash_slack) {
  require(!w.empty() && caps.size() + 1 == w.size(), ErrorKind::kShape,
          "project_capped_simplex: expected one cap per risky name");
  for (double c : caps) {
    require(std::isfinite(c) && c >= 0.0, ErrorKind::kFeasibility,
            "project_capped_simplex: caps must be finite and nonnegative");
  }
  const double cap_total = std::accumulate(caps.begin(), caps.end(), 0.0);
  const std::span<const double> risky = w.subspan(1);
  const double risky_total = std::accumulate(risky.begin(), risky.end(), 0.0);

  std::vector<double> out(w.size(), 0.0);
  if (!cash_slack) {
    require(cap_total + 1e-12 >= risky_total, ErrorKind::kFeasibility,
            "project_capped_simplex: caps sum to " + std::to_string(cap_total) +
                " but the risky block needs " + std::to_string(risky_total));
  }

  const bool binding = std::any_of(risky.begin(), risky.end(), [&, k = std::size_t{0}](double v) mutable {
    return v > caps[k++];
  });
  if (!binding) {
    std::copy(w.begin(), w.end(), out.begin());
    return out;
  }

  std::vector<double> x;
  if (risky_total >= cap_total) {
    x.assign(caps.begin(), caps.end());
  } else {
    x = project_box_sum(risky, caps, risky_total);
  }
  double placed = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i + 1] = x[i];
    placed += x[i];
  }
  out[0] = cash_slack ? std::max(0.0, 1.0 - placed) : w[0];
  return out;
}

bool is_feasible(std::span<const double> w, std::span<const std::uint8_t> asset_mask,
                 double tol) {
  if (w.size() != asset_mask.size() + 1) return false;
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!(w[k] >= 0.0)) return false;
    if (k > 0 && !asset_mask[k - 1] && w[k] > tol) return false;
    total += w[k];
  }
  return std::abs(total - 1.0) <= tol;
}

}  // namespace folio::simplex
