#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace folio::data {

/// Calendar day stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days day) : day_(day) {}

  static Date from_ymd(int year, unsigned month, unsigned day);

  std::chrono::sys_days sys_days() const { return day_; }
  int serial() const { return static_cast<int>(day_.time_since_epoch().count()); }
  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{day_}; }

  Date plus_years(int years) const;
  std::string iso() const;

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days day_{};
};

/// Accepts `YYYY-MM-DD` and ISO-8601 timestamps whose first ten characters are
/// a date (`2020-01-02T00:00:00`, `2020-01-02 16:00:00`). Returns nullopt for
/// anything else, including impossible days such as 2021-02-30.
std::optional<Date> parse_date(std::string_view text);

}  // namespace folio::data
