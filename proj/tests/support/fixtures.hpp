#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "folio/data/panel.hpp"
#include "folio/rng.hpp"

namespace folio::testing {

/// Day-major panel with N(0,1) features and random-walk closes. Asset 0 is
/// always tradable; the others halt with probability `halt_prob` per day.
inline data::PanelTensor random_panel(std::size_t T, std::size_t N, std::size_t F,
                                      std::uint64_t seed, double halt_prob = 0.0,
                                      double vol = 0.01) {
  Rng rng(seed);
  data::PanelTensor p;
  const data::Date base = data::Date::from_ymd(2000, 1, 3);
  for (std::size_t t = 0; t < T; ++t) {
    p.dates.emplace_back(base.sys_days() + std::chrono::days(static_cast<int>(t)));
  }
  for (std::size_t i = 0; i < N; ++i) p.tickers.push_back("A" + std::to_string(i));
  for (std::size_t f = 0; f < F; ++f) p.features.push_back("f" + std::to_string(f));
  p.z.assign(T * N * F, 0.0);
  p.raw_close.assign(T * N, data::kMissing);
  p.mask.assign(T * N, 0);
  std::vector<double> level(N, 100.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      level[i] *= 1.0 + vol * standard_normal(rng);
      const bool live = i == 0 || uniform01(rng) >= halt_prob;
      if (!live) continue;
      p.mask[t * N + i] = 1;
      p.raw_close[t * N + i] = level[i];
      for (std::size_t f = 0; f < F; ++f) p.z_at(t, i, f) = standard_normal(rng);
    }
  }
  p.simple_returns = data::compute_returns(p.close_matrix()).simple_returns.data();
  return p;
}

inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Central difference of f at x[k].
inline double central_diff(const std::function<double()>& f, double& x, double h = 1e-5) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("folio_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace folio::testing

namespace folio::testing {

/// Panel from a T x N close table (NaN = untradable) with one zero feature.
inline data::PanelTensor panel_from_closes(const std::vector<std::vector<double>>& closes) {
  data::PanelTensor p;
  const std::size_t T = closes.size();
  const std::size_t N = closes.front().size();
  const data::Date base = data::Date::from_ymd(2000, 1, 3);
  for (std::size_t t = 0; t < T; ++t) {
    p.dates.emplace_back(base.sys_days() + std::chrono::days(static_cast<int>(t)));
  }
  for (std::size_t i = 0; i < N; ++i) p.tickers.push_back("A" + std::to_string(i));
  p.features = {"f0"};
  p.z.assign(T * N, 0.0);
  for (const auto& row : closes) {
    for (double c : row) {
      p.raw_close.push_back(c);
      p.mask.push_back(std::isfinite(c) ? 1 : 0);
    }
  }
  p.simple_returns = data::compute_returns(p.close_matrix()).simple_returns.data();
  return p;
}

}  // namespace folio::testing
