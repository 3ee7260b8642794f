#include "inrad/timestamp.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "inrad/errors.hpp"

namespace inrad {
namespace {

constexpr int kMaxYear = 9999;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int read_fixed(std::string_view text, std::size_t pos, std::size_t width) {
  int value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = text[pos + i];
    if (!is_digit(c)) throw ParseError("malformed timestamp '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

unsigned days_in_month(int year, int month) {
  using namespace std::chrono;
  return static_cast<unsigned>(
      year_month_day_last{std::chrono::year{year}, month_day_last{std::chrono::month{
                                                       static_cast<unsigned>(month)}}}
          .day());
}

}  // namespace

bool Timestamp::valid() const noexcept {
  if (year < 1 || year > kMaxYear) return false;
  if (month < 1 || month > 12) return false;
  if (day < 1 || static_cast<unsigned>(day) > days_in_month(year, month)) return false;
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59) return false;
  return second >= 0.0 && second < 60.0;
}

std::string Timestamp::to_string() const {
  char buf[64];
  const double whole = std::floor(second);
  if (second == whole) {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", year, month, day, hour,
                  minute, static_cast<int>(whole));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%09.6f", year, month, day, hour,
                  minute, second);
  }
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DD HH:MM:SS[.fff]
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || text[10] != ' ' ||
      text[13] != ':' || text[16] != ':') {
    throw ParseError("malformed timestamp '" + std::string(text) + "'");
  }
  Timestamp t;
  t.year = read_fixed(text, 0, 4);
  t.month = read_fixed(text, 5, 2);
  t.day = read_fixed(text, 8, 2);
  t.hour = read_fixed(text, 11, 2);
  t.minute = read_fixed(text, 14, 2);
  t.second = read_fixed(text, 17, 2);
  if (text.size() > 19) {
    if (text[19] != '.' || text.size() == 20) {
      throw ParseError("malformed timestamp '" + std::string(text) + "'");
    }
    double frac = 0.0;
    double scale = 0.1;
    for (std::size_t i = 20; i < text.size(); ++i) {
      if (!is_digit(text[i])) throw ParseError("malformed timestamp '" + std::string(text) + "'");
      frac += scale * (text[i] - '0');
      scale *= 0.1;
    }
    t.second += frac;
  }
  if (!t.valid()) throw ParseError("timestamp out of range '" + std::string(text) + "'");
  return t;
}

Timestamp add_seconds(const Timestamp& t, std::int64_t seconds) {
  using namespace std::chrono;
  const sys_days day0{year_month_day{std::chrono::year{t.year},
                                     std::chrono::month{static_cast<unsigned>(t.month)},
                                     std::chrono::day{static_cast<unsigned>(t.day)}}};
  const double whole_sec = std::floor(t.second);
  const double frac = t.second - whole_sec;
  const std::int64_t total = static_cast<std::int64_t>(t.hour) * 3600 +
                             static_cast<std::int64_t>(t.minute) * 60 +
                             static_cast<std::int64_t>(whole_sec) + seconds;
  std::int64_t day_shift = total / 86400;
  std::int64_t rem = total % 86400;
  if (rem < 0) {
    rem += 86400;
    --day_shift;
  }
  if (day_shift > 4'000'000 || day_shift < -4'000'000) {
    throw RangeError("timestamp arithmetic overflows past year 9999");
  }
  const year_month_day ymd{day0 + days{day_shift}};
  const int y = static_cast<int>(ymd.year());
  if (y < 1 || y > kMaxYear) throw RangeError("timestamp arithmetic overflows past year 9999");
  Timestamp out;
  out.year = y;
  out.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  out.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  out.hour = static_cast<int>(rem / 3600);
  out.minute = static_cast<int>((rem % 3600) / 60);
  out.second = static_cast<double>(rem % 60) + frac;
  return out;
}

std::vector<Timestamp> assign_synthetic_timestamps(std::size_t n_points, const Timestamp& start,
                                                   std::int64_t interval_seconds) {
  if (!start.valid()) throw RangeError("invalid start timestamp " + start.to_string());
  if (interval_seconds <= 0) throw RangeError("timestamp interval must be positive");
  std::vector<Timestamp> out;
  out.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    out.push_back(add_seconds(start, static_cast<std::int64_t>(i) * interval_seconds));
  }
  return out;
}

}  // namespace inrad
