#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace inrad {

// Calendar timestamp without time zone. Ordering is lexicographic over the
// fields, year first.
struct Timestamp {
  int year = 2021;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  double second = 0.0;

  auto operator<=>(const Timestamp&) const = default;
  bool operator==(const Timestamp&) const = default;

  bool valid() const noexcept;
  std::string to_string() const;
};

// "YYYY-MM-DD HH:MM:SS" with optional fractional seconds. Throws ParseError.
Timestamp parse_timestamp(std::string_view text);

// Proleptic Gregorian arithmetic. Throws RangeError past year 9999.
Timestamp add_seconds(const Timestamp& t, std::int64_t seconds);

inline constexpr Timestamp kDefaultSyntheticStart{2021, 1, 1, 0, 0, 0.0};

// n timestamps spaced interval_seconds apart starting at start.
std::vector<Timestamp> assign_synthetic_timestamps(std::size_t n_points,
                                                   const Timestamp& start = kDefaultSyntheticStart,
                                                   std::int64_t interval_seconds = 60);

}  // namespace inrad
