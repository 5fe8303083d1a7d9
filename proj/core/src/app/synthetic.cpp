#include "folio/app/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "folio/error.hpp"
#include "folio/rng.hpp"
#include "json.hpp"

namespace folio::app {
namespace {

std::vector<data::Date> business_days(data::Date start, std::size_t count) {
  std::vector<data::Date> out;
  out.reserve(count);
  auto day = start.sys_days();
  while (out.size() < count) {
    const std::chrono::weekday wd(day);
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
      out.push_back(data::Date(day));
    }
    day += std::chrono::days(1);
  }
  return out;
}

}  // namespace

SyntheticMarket generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const bool cross = spec.variant == "cross_sectional";
  const std::size_t T = spec.days;
  const std::size_t N = spec.assets;
  Rng rng = make_stream(spec.seed, "data-gen");
  const std::vector<data::Date> dates = business_days(*data::parse_date(spec.start_date), T);
  const double resid = std::sqrt(1.0 - spec.ic * spec.ic);

  // Day-major latent arrays.
  std::vector<double> signal(T * N), noise(T * N), aux(T * N), ret(T * N, 0.0), close(T * N);
  std::vector<std::uint8_t> live(T * N, 1);
  // cross_sectional: names alternate between two groups (aux = +1 / -1) and
  // each name is driven by the mean signal of the other members of its group.
  auto group = [](std::size_t i) { return i % 2; };
  std::vector<std::size_t> group_size(2, 0);
  for (std::size_t i = 0; i < N; ++i) ++group_size[group(i)];
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      signal[t * N + i] = standard_normal(rng);
      noise[t * N + i] = standard_normal(rng);
      aux[t * N + i] = cross ? (group(i) == 0 ? 1.0 : -1.0) : standard_normal(rng);
    }
    if (t + 1 == T) break;
    double group_sum[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < N; ++i) group_sum[group(i)] += signal[t * N + i];
    for (std::size_t i = 0; i < N; ++i) {
      double driver = signal[t * N + i];
      if (cross) {
        const double peers = static_cast<double>(group_size[group(i)] - 1);
        driver = (group_sum[group(i)] - signal[t * N + i]) / std::sqrt(peers);
      }
      const double e = standard_normal(rng);
      ret[(t + 1) * N + i] =
          std::max(-0.95, spec.drift + spec.noise_vol * (spec.ic * driver + resid * e));
    }
  }
  std::vector<std::size_t> halt_left(N, 0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      close[t * N + i] = t == 0 ? 100.0 : close[(t - 1) * N + i] * (1.0 + ret[t * N + i]);
      const double u = uniform01(rng);
      const double len_draw = uniform01(rng);
      if (t == 0) continue;
      if (halt_left[i] == 0 && u < spec.halt_prob) {
        halt_left[i] = 1 + static_cast<std::size_t>(len_draw * static_cast<double>(spec.max_halt_days));
      }
      if (halt_left[i] > 0) {
        live[t * N + i] = 0;
        --halt_left[i];
      }
    }
  }

  SyntheticMarket out;
  out.features = {"signal", "noise", "aux", "ret_lag"};
  std::vector<std::string> tickers(N);
  for (std::size_t i = 0; i < N; ++i) {
    std::ostringstream name;
    name << "SYN" << std::setw(3) << std::setfill('0') << i;
    tickers[i] = name.str();
  }
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      if (!live[t * N + i]) continue;
      data::RawPanelRow row;
      row.date = dates[t];
      row.ticker = tickers[i];
      row.features["Close"] = close[t * N + i];
      row.features["signal"] = signal[t * N + i];
      row.features["noise"] = noise[t * N + i];
      row.features["aux"] = aux[t * N + i];
      const bool has_lag = t > 0 && live[(t - 1) * N + i];
      row.features["ret_lag"] = has_lag ? ret[t * N + i] : data::kMissing;
      out.rows.push_back(std::move(row));
    }
  }
  nlohmann::json gen{{"variant", spec.variant},
                     {"assets", N},
                     {"days", T},
                     {"ic", spec.ic},
                     {"noise_vol", spec.noise_vol},
                     {"drift", spec.drift},
                     {"halt_prob", spec.halt_prob},
                     {"max_halt_days", spec.max_halt_days},
                     {"seed", spec.seed},
                     {"start_date", spec.start_date},
                     {"signal_feature", "signal"}};
  if (cross) gen["groups"] = "aux sign; driver is the mean signal of same-group peers";
  out.generator_json = gen.dump();
  return out;
}

void write_long_csv(const std::filesystem::path& path, const std::vector<data::RawPanelRow>& rows,
                    const std::vector<std::string>& features) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::kIo, "cannot write " + path.string());
  out << "Date,ticker,Close";
  for (const auto& f : features) out << ',' << f;
  out << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    out << row.date.iso() << ',' << row.ticker << ',' << row.features.at("Close");
    for (const auto& f : features) {
      out << ',';
      const auto it = row.features.find(f);
      if (it != row.features.end() && !data::is_missing(it->second)) out << it->second;
    }
    out << '\n';
  }
}

}  // namespace folio::app
