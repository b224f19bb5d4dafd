#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace hindsight {

/// Calendar date. Accepts "YYYY", "YYYY-MM" and "YYYY-MM-DD"; missing parts
/// default to the first month/day.
class Date {
 public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);

  static Date parse(std::string_view text);

  int year() const { return static_cast<int>(ymd_.year()); }
  unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  /// ISO "YYYY-MM-DD".
  std::string str() const;

  Date add_months(int months) const;

  auto operator<=>(const Date& other) const {
    return std::chrono::sys_days{ymd_} <=> std::chrono::sys_days{other.ymd_};
  }
  bool operator==(const Date& other) const = default;

 private:
  std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                   std::chrono::day{1}};
};

/// Whole calendar months from `from` to `to`; a partial month does not count.
int months_between(const Date& from, const Date& to);

}  // namespace hindsight
