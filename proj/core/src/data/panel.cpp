#include "folio/data/panel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include "folio/data/csv.hpp"
#include "folio/error.hpp"

namespace folio::data {
namespace {

constexpr double kStdOffset = 1e-8;

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_value(const std::string& text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return kMissing;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return kMissing;
  return v;
}

}  // namespace

Matrix PanelTensor::close_matrix() const {
  Matrix m(num_days(), num_assets());
  m.data() = raw_close;
  return m;
}

std::string to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::kFixedRanges: return "fixed_ranges";
    case SplitMode::kTwentyYear: return "twenty_year";
    case SplitMode::kQuantile80: return "quantile_80";
  }
  return "quantile_80";
}

SplitMode parse_split_mode(const std::string& text) {
  if (text == "fixed_ranges") return SplitMode::kFixedRanges;
  if (text == "twenty_year") return SplitMode::kTwentyYear;
  if (text == "quantile_80") return SplitMode::kQuantile80;
  fail(ErrorKind::kConfig, "unknown split mode '" + text + "'");
}

std::vector<RawPanelRow> load_long_csv(const std::filesystem::path& path,
                                       std::span<const std::string> schema) {
  const CsvTable table = read_csv(path);

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    std::string name = table.header[c];
    while (!name.empty() && (name.back() == ' ' || name.back() == '\r')) name.pop_back();
    const std::string key = lower(name);
    if (key == "date") {
      column.emplace("Date", c);
    } else if (key == "ticker") {
      column.emplace("ticker", c);
    } else {
      column.emplace(name, c);
    }
  }
  for (const char* required : {"Date", "ticker", "Close"}) {
    require(column.count(required) > 0, ErrorKind::kSchema,
            path.string() + ": missing required column '" + required + "'");
  }
  for (const auto& name : schema) {
    require(column.count(name) > 0, ErrorKind::kSchema,
            path.string() + ": missing required column '" + name + "'");
  }
  require(!table.rows.empty(), ErrorKind::kEmptyInput, path.string() + " has no data rows");

  const std::size_t date_col = column.at("Date");
  const std::size_t ticker_col = column.at("ticker");
  std::vector<std::pair<std::string, std::size_t>> feature_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == date_col || c == ticker_col) continue;
    std::string name = table.header[c];
    while (!name.empty() && (name.back() == ' ' || name.back() == '\r')) name.pop_back();
    feature_cols.emplace_back(name, c);
  }

  std::vector<RawPanelRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    if (fields.size() <= std::max(date_col, ticker_col)) continue;
    const auto date = parse_date(fields[date_col]);
    if (!date) continue;
    std::string ticker = fields[ticker_col];
    if (ticker.empty()) continue;

    RawPanelRow row{*date, std::move(ticker), {}};
    bool any = false;
    for (const auto& [name, c] : feature_cols) {
      const double v = c < fields.size() ? parse_value(fields[c]) : kMissing;
      any = any || !is_missing(v);
      row.features.emplace(name, v);
    }
    if (!any) continue;
    const double close = row.features.at("Close");
    require(is_missing(close) || close > 0.0, ErrorKind::kData,
            path.string() + " line " + std::to_string(table.lines[r]) +
                ": nonpositive Close for " + row.ticker + " on " + row.date.iso());
    rows.push_back(std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const RawPanelRow& a, const RawPanelRow& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.ticker < b.ticker;
  });
  return rows;
}

PanelTensor pivot_panel(std::span<const RawPanelRow> rows,
                        std::span<const std::string> feature_list) {
  require(!feature_list.empty(), ErrorKind::kConfig, "feature list is empty");
  require(!rows.empty(), ErrorKind::kEmptyInput, "no rows to pivot");

  PanelTensor panel;
  for (const auto& row : rows) {
    panel.dates.push_back(row.date);
    panel.tickers.push_back(row.ticker);
  }
  std::sort(panel.dates.begin(), panel.dates.end());
  panel.dates.erase(std::unique(panel.dates.begin(), panel.dates.end()), panel.dates.end());
  std::sort(panel.tickers.begin(), panel.tickers.end());
  panel.tickers.erase(std::unique(panel.tickers.begin(), panel.tickers.end()),
                      panel.tickers.end());
  panel.features.assign(feature_list.begin(), feature_list.end());

  const std::size_t T = panel.num_days();
  const std::size_t N = panel.num_assets();
  const std::size_t F = panel.num_features();
  panel.z.assign(T * N * F, kMissing);
  panel.raw_close.assign(T * N, kMissing);
  panel.mask.assign(T * N, 0);

  std::vector<std::uint8_t> seen(T * N, 0);
  for (const auto& row : rows) {
    const auto t = static_cast<std::size_t>(
        std::lower_bound(panel.dates.begin(), panel.dates.end(), row.date) - panel.dates.begin());
    const auto i = static_cast<std::size_t>(
        std::lower_bound(panel.tickers.begin(), panel.tickers.end(), row.ticker) -
        panel.tickers.begin());
    if (seen[t * N + i]) {
      fail(ErrorKind::kDuplicateKey,
           "duplicate (date, ticker) pair (" + row.date.iso() + ", " + row.ticker + ")");
    }
    seen[t * N + i] = 1;
    for (std::size_t f = 0; f < F; ++f) {
      const auto it = row.features.find(panel.features[f]);
      if (it != row.features.end()) panel.z_at(t, i, f) = it->second;
    }
    if (const auto it = row.features.find("Close"); it != row.features.end()) {
      panel.raw_close[t * N + i] = it->second;
      panel.mask[t * N + i] = is_missing(it->second) ? 0 : 1;
    }
  }

  if (T >= 2) {
    panel.simple_returns = compute_returns(panel.close_matrix()).simple_returns.data();
  } else {
    panel.simple_returns.assign(T * N, kMissing);
  }
  return panel;
}

std::vector<RawPanelRow> flatten_panel(const PanelTensor& panel) {
  std::vector<RawPanelRow> rows;
  for (std::size_t t = 0; t < panel.num_days(); ++t) {
    for (std::size_t i = 0; i < panel.num_assets(); ++i) {
      RawPanelRow row{panel.dates[t], panel.tickers[i], {}};
      bool any = false;
      for (std::size_t f = 0; f < panel.num_features(); ++f) {
        const double v = panel.z_at(t, i, f);
        if (is_missing(v)) continue;
        row.features.emplace(panel.features[f], v);
        any = true;
      }
      if (any) rows.push_back(std::move(row));
    }
  }
  return rows;
}

Returns compute_returns(const Matrix& close) {
  require(close.rows() >= 2, ErrorKind::kData, "returns need at least two days of closes");
  const std::size_t T = close.rows();
  const std::size_t N = close.cols();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      const double c = close(t, i);
      require(is_missing(c) || c > 0.0, ErrorKind::kData,
              "nonpositive close at (t=" + std::to_string(t) + ", i=" + std::to_string(i) + ")");
    }
  }

  Returns out{Matrix(T, N, kMissing), Matrix(T, N, kMissing)};
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      const double prev = close(t - 1, i);
      const double cur = close(t, i);
      if (is_missing(prev) || is_missing(cur)) continue;
      const double lr = std::log(cur / prev);
      out.log_returns(t, i) = lr;
      out.simple_returns(t, i) = std::expm1(lr);
    }
  }
  return out;
}

PanelTensor standardize_cross_section(PanelTensor panel) {
  const std::size_t T = panel.num_days();
  const std::size_t N = panel.num_assets();
  const std::size_t F = panel.num_features();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t f = 0; f < F; ++f) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < N; ++i) {
        const double v = panel.z_at(t, i, f);
        if (!panel.tradable(t, i) || is_missing(v)) continue;
        sum += v;
        ++n;
      }
      const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
      double ss = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double v = panel.z_at(t, i, f);
        if (!panel.tradable(t, i) || is_missing(v)) continue;
        ss += (v - mean) * (v - mean);
      }
      const double sd = n > 0 ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        double& v = panel.z_at(t, i, f);
        if (!panel.tradable(t, i) || is_missing(v)) {
          v = 0.0;
          continue;
        }
        v = (v - mean) / (sd + kStdOffset);
        if (!std::isfinite(v)) v = 0.0;
      }
    }
  }
  return panel;
}

SplitSpec make_splits(std::span<const Date> dates, SplitMode mode, std::size_t embargo_days,
                      const FixedRanges* fixed) {
  require(dates.size() >= 3, ErrorKind::kSplit, "splits need at least 3 dates");
  const std::size_t T = dates.size();
  const auto first_at_or_after = [&](Date d) {
    return static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), d) -
                                    dates.begin());
  };
  const auto quantile_cut = [&] { return static_cast<std::size_t>(0.8 * static_cast<double>(T)); };

  SplitSpec spec;
  spec.mode = mode;
  spec.embargo_days = embargo_days;

  // `cut` is the first index that does not belong to the training range.
  std::size_t cut = 0;
  switch (mode) {
    case SplitMode::kQuantile80:
      cut = quantile_cut();
      break;
    case SplitMode::kTwentyYear: {
      const Date boundary = dates.front().plus_years(20);
      cut = boundary > dates.back() ? quantile_cut() : first_at_or_after(boundary);
      break;
    }
    case SplitMode::kFixedRanges: {
      require(fixed != nullptr, ErrorKind::kSplit, "fixed_ranges mode needs explicit ranges");
      const auto to_range = [&](const DateInterval& iv, std::size_t min_first) {
        require(iv.from <= iv.to, ErrorKind::kSplit, "split range " + iv.from.iso() + ".." +
                                                         iv.to.iso() + " is reversed");
        const std::size_t lo = std::max(first_at_or_after(iv.from), min_first);
        const std::size_t hi_excl = static_cast<std::size_t>(
            std::upper_bound(dates.begin(), dates.end(), iv.to) - dates.begin());
        require(lo < hi_excl, ErrorKind::kSplit,
                "split range " + iv.from.iso() + ".." + iv.to.iso() + " is empty");
        return DayRange{lo, hi_excl - 1};
      };
      spec.train = to_range(fixed->train, 0);
      std::size_t next_min = spec.train.last + embargo_days + 1;
      if (fixed->validation) {
        spec.validation = to_range(*fixed->validation, next_min);
        next_min = spec.validation->last + embargo_days + 1;
      }
      spec.test = to_range(fixed->test, next_min);
      return spec;
    }
  }

  require(cut >= 1, ErrorKind::kSplit, "training range is empty");
  const std::size_t test_first = cut + embargo_days;
  require(test_first < T, ErrorKind::kSplit, "test range is empty after the embargo");
  spec.train = DayRange{0, cut - 1};
  spec.test = DayRange{test_first, T - 1};
  return spec;
}

WindowView window_view(const PanelTensor& panel, std::size_t t, std::size_t window) {
  require(window >= 1, ErrorKind::kWindow, "window length must be at least 1");
  require(t + 1 >= window, ErrorKind::kWindow,
          "day " + std::to_string(t) + " has fewer than " + std::to_string(window) +
              " days of history");
  require(t < panel.num_days(), ErrorKind::kWindow,
          "day " + std::to_string(t) + " is outside the panel");
  const std::size_t N = panel.num_assets();
  const std::size_t F = panel.num_features();
  const std::size_t begin = (t + 1 - window) * N * F;
  WindowView view;
  view.values = std::span<const double>(panel.z.data() + begin, window * N * F);
  view.mask = panel.mask_row(t);
  view.window = window;
  view.assets = N;
  view.features = F;
  view.end_day = t;
  return view;
}

void AccessLedger::record(std::size_t first, std::size_t last) {
  for (std::size_t t = first; t <= last && t < reads_.size(); ++t) ++reads_[t];
}

std::uint64_t AccessLedger::reads_in(const DayRange& range) const {
  std::uint64_t total = 0;
  for (std::size_t t = range.first; t <= range.last && t < reads_.size(); ++t) total += reads_[t];
  return total;
}

std::uint64_t AccessLedger::total_reads() const {
  std::uint64_t total = 0;
  for (auto r : reads_) total += r;
  return total;
}

}  // namespace folio::data
