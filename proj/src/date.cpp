#include "hindsight/date.hpp"

#include <charconv>
#include <cstdio>

#include "hindsight/error.hpp"

namespace hindsight {

namespace {

int parse_int(std::string_view part, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
  if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
    throw FormatError("invalid date '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day)
    : ymd_{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}} {
  if (!ymd_.ok()) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "invalid date %04d-%02u-%02u", year, month, day);
    throw FormatError(buf);
  }
}

Date Date::parse(std::string_view text) {
  if (text.size() != 4 && text.size() != 7 && text.size() != 10) {
    throw FormatError("invalid date '" + std::string(text) + "'");
  }
  const int year = parse_int(text.substr(0, 4), text);
  unsigned month = 1;
  unsigned day = 1;
  if (text.size() >= 7) {
    if (text[4] != '-') throw FormatError("invalid date '" + std::string(text) + "'");
    month = static_cast<unsigned>(parse_int(text.substr(5, 2), text));
  }
  if (text.size() == 10) {
    if (text[7] != '-') throw FormatError("invalid date '" + std::string(text) + "'");
    day = static_cast<unsigned>(parse_int(text.substr(8, 2), text));
  }
  return Date(year, month, day);
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

Date Date::add_months(int months) const {
  auto ym = std::chrono::year_month{ymd_.year(), ymd_.month()} + std::chrono::months{months};
  auto candidate = ym / ymd_.day();
  if (!candidate.ok()) candidate = ym / std::chrono::last;
  return Date(static_cast<int>(candidate.year()), static_cast<unsigned>(candidate.month()),
              static_cast<unsigned>(candidate.day()));
}

int months_between(const Date& from, const Date& to) {
  int months = (to.year() - from.year()) * 12 + static_cast<int>(to.month()) -
               static_cast<int>(from.month());
  if (months > 0 && to.day() < from.day()) --months;
  if (months < 0 && to.day() > from.day()) ++months;
  return months;
}

}  // namespace hindsight
