#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "folio/data/date.hpp"

namespace folio::data {

/// Internal marker for an absent observation. Exported tensors never hold it.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return !std::isfinite(v); }

/// Dense row-major matrix of reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct RawPanelRow {
  Date date;
  std::string ticker;
  /// Feature name -> value; absent or unparseable cells hold kMissing.
  std::map<std::string, double> features;
};

/// Date x ticker x feature panel. `z` is laid out day-major: index
/// ((t * N) + i) * F + f. Before standardization it holds raw feature values.
struct PanelTensor {
  std::vector<Date> dates;
  std::vector<std::string> tickers;
  std::vector<std::string> features;
  std::vector<double> z;
  std::vector<double> raw_close;       // T x N
  std::vector<double> simple_returns;  // T x N, return realised from t-1 to t
  std::vector<std::uint8_t> mask;      // T x N

  std::size_t num_days() const { return dates.size(); }
  std::size_t num_assets() const { return tickers.size(); }
  std::size_t num_features() const { return features.size(); }

  double z_at(std::size_t t, std::size_t i, std::size_t f) const {
    return z[(t * num_assets() + i) * num_features() + f];
  }
  double& z_at(std::size_t t, std::size_t i, std::size_t f) {
    return z[(t * num_assets() + i) * num_features() + f];
  }
  double close(std::size_t t, std::size_t i) const { return raw_close[t * num_assets() + i]; }
  double simple_return(std::size_t t, std::size_t i) const {
    return simple_returns[t * num_assets() + i];
  }
  bool tradable(std::size_t t, std::size_t i) const { return mask[t * num_assets() + i] != 0; }
  std::span<const std::uint8_t> mask_row(std::size_t t) const {
    return {mask.data() + t * num_assets(), num_assets()};
  }
  std::span<const double> return_row(std::size_t t) const {
    return {simple_returns.data() + t * num_assets(), num_assets()};
  }

  Matrix close_matrix() const;
};

/// Inclusive range of day indices.
struct DayRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  bool contains(std::size_t t) const { return t >= first && t <= last; }
  friend bool operator==(const DayRange&, const DayRange&) = default;
};

enum class SplitMode { kFixedRanges, kTwentyYear, kQuantile80 };

std::string to_string(SplitMode mode);
SplitMode parse_split_mode(const std::string& text);

struct DateInterval {
  Date from;
  Date to;
};

/// Calendar ranges for SplitMode::kFixedRanges.
struct FixedRanges {
  DateInterval train;
  std::optional<DateInterval> validation;
  DateInterval test;
};

struct SplitSpec {
  SplitMode mode = SplitMode::kQuantile80;
  DayRange train;
  std::optional<DayRange> validation;
  DayRange test;
  std::size_t embargo_days = 0;
};

/// Reads a long-format CSV (one row per date/ticker). `schema` lists columns
/// that must be present in addition to Date, ticker and Close.
std::vector<RawPanelRow> load_long_csv(const std::filesystem::path& path,
                                       std::span<const std::string> schema = {});

/// Full date x ticker grid. Absent cells are missing; mask is Close finiteness.
/// Simple returns are filled in; `z` holds raw (unstandardized) values.
PanelTensor pivot_panel(std::span<const RawPanelRow> rows,
                        std::span<const std::string> feature_list);

/// Inverse of pivot_panel over the cells that carry at least one value.
std::vector<RawPanelRow> flatten_panel(const PanelTensor& panel);

struct Returns {
  Matrix log_returns;
  Matrix simple_returns;
};

/// Close-to-close returns. Row 0 and any step touching a missing close are
/// missing.
Returns compute_returns(const Matrix& close);

/// Same-day z-scoring of every feature over tradable names,
/// (x - mean) / (population std + 1e-8). Masked and non-finite cells become 0.
PanelTensor standardize_cross_section(PanelTensor panel);

SplitSpec make_splits(std::span<const Date> dates, SplitMode mode, std::size_t embargo_days,
                      const FixedRanges* fixed = nullptr);

/// Read-only W x N x F slice ending at day t plus that day's mask row.
struct WindowView {
  std::span<const double> values;
  std::span<const std::uint8_t> mask;
  std::size_t window = 0;
  std::size_t assets = 0;
  std::size_t features = 0;
  std::size_t end_day = 0;

  double at(std::size_t tau, std::size_t i, std::size_t f) const {
    return values[(tau * assets + i) * features + f];
  }
};

WindowView window_view(const PanelTensor& panel, std::size_t t, std::size_t window);

/// Counts reads per day index so callers can prove a training run never
/// touched held-out days.
class AccessLedger {
 public:
  explicit AccessLedger(std::size_t num_days = 0) : reads_(num_days, 0) {}

  void record(std::size_t first, std::size_t last);
  void record(std::size_t day) { record(day, day); }
  std::uint64_t reads_in(const DayRange& range) const;
  std::uint64_t total_reads() const;
  std::size_t num_days() const { return reads_.size(); }

 private:
  std::vector<std::uint64_t> reads_;
};

}  // namespace folio::data
