#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "txrisk/error.hpp"

namespace txrisk {

/// Calendar date with ISO-8601 (YYYY-MM-DD) text form.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}
  Date(int y, unsigned m, unsigned d)
      : ymd_(std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}) {}

  static Date parse(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(text);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
      fail(ErrorCode::ParseError, "bad date '" + s + "' (expected YYYY-MM-DD)");
    }
    Date out(y, m, d);
    require(out.ymd_.ok(), ErrorCode::ParseError, "invalid calendar date '" + s + "'");
    return out;
  }

  [[nodiscard]] std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
  }

  [[nodiscard]] int year() const { return static_cast<int>(ymd_.year()); }
  [[nodiscard]] unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  [[nodiscard]] unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  /// True for Monday through Friday.
  [[nodiscard]] bool is_weekday() const {
    const unsigned wd = std::chrono::weekday{std::chrono::sys_days{ymd_}}.iso_encoding();
    return wd <= 5;
  }

  /// Day of year, 0-based.
  [[nodiscard]] int day_of_year() const {
    const std::chrono::sys_days jan1{ymd_.year() / std::chrono::January / 1};
    return static_cast<int>((std::chrono::sys_days{ymd_} - jan1).count());
  }

  [[nodiscard]] Date plus_days(int n) const {
    return Date(std::chrono::year_month_day{std::chrono::sys_days{ymd_} + std::chrono::days{n}});
  }

  [[nodiscard]] long serial() const { return std::chrono::sys_days{ymd_}.time_since_epoch().count(); }

  friend bool operator==(const Date& a, const Date& b) { return a.ymd_ == b.ymd_; }
  friend auto operator<=>(const Date& a, const Date& b) { return a.serial() <=> b.serial(); }

 private:
  std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::January, std::chrono::day{1}};
};

}  // namespace txrisk
