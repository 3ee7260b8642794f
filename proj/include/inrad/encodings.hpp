#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inrad/matrix.hpp"
#include "inrad/timestamp.hpp"

namespace inrad {

enum class TimeField : std::size_t { kYear, kMonth, kDay, kHour, kMinute, kSecond };
inline constexpr std::size_t kTimeFieldCount = 6;

// Encoded time coordinates, one row per timestamp.
struct EncodedCoords {
  Matrix values;

  std::size_t n() const noexcept { return values.rows(); }
  std::size_t dim() const noexcept { return values.cols(); }
};

struct TemporalEncoderConfig {
  int anchor_year = 2021;
  // Number of distinct years spanned (latest - earliest + 1).
  int year_span = 1;
  std::array<bool, kTimeFieldCount> active_fields{true, true, true, true, true, true};

  // Per-field resolution N_j; year uses year_span.
  int resolution(TimeField field) const noexcept;
  std::size_t active_count() const noexcept;

  // Anchor at the first timestamp's year, span covering every timestamp given.
  static TemporalEncoderConfig from_timestamps(
      std::span<const Timestamp> timestamps,
      std::array<bool, kTimeFieldCount> active = {true, true, true, true, true, true});
};

// Linear per-field map onto [-1, 1]; the field minimum maps to -1 and the
// maximum to +1, so January 1st 00:00:00 of the anchor year encodes to all -1.
// A field with resolution 1 is constant -1. Returns only the active fields.
std::vector<double> temporal_encode(const Timestamp& t, const TemporalEncoderConfig& cfg);
EncodedCoords temporal_encode(std::span<const Timestamp> ts, const TemporalEncoderConfig& cfg);

// Index i in 1..N maps to (2/N) * i - 1.
EncodedCoords vanilla_encode(std::size_t n_points);

struct SplitCoords {
  EncodedCoords train;
  EncodedCoords test;
};

// Train part equals vanilla_encode(n_train); test index j in 1..n_test maps
// to 1 + (2/n_train) * j, continuing the train spacing past 1.
SplitCoords vanilla_star_encode(std::size_t n_train, std::size_t n_test);

enum class EncoderKind { kTemporal, kVanilla, kVanillaStar };

std::string_view encoder_name(EncoderKind kind) noexcept;
EncoderKind parse_encoder(std::string_view name);

// Encodes a train/test split with one encoder. Without train timestamps
// (cold start) only the test side is encoded: temporal anchors on the test
// timestamps and both index encoders reduce to vanilla over the test length.
SplitCoords encode_split(EncoderKind kind, std::optional<std::span<const Timestamp>> train,
                         std::span<const Timestamp> test,
                         std::array<bool, kTimeFieldCount> active = {true, true, true, true,
                                                                     true, true});

}  // namespace inrad
