#include "inrad/encodings.hpp"

#include <algorithm>

#include "inrad/errors.hpp"

namespace inrad {
namespace {

constexpr std::array<int, kTimeFieldCount> kClockResolution{0, 12, 31, 24, 60, 60};
constexpr std::array<double, kTimeFieldCount> kFieldBase{0.0, 1.0, 1.0, 0.0, 0.0, 0.0};

double field_value(const Timestamp& t, TimeField f) {
  switch (f) {
    case TimeField::kYear: return t.year;
    case TimeField::kMonth: return t.month;
    case TimeField::kDay: return t.day;
    case TimeField::kHour: return t.hour;
    case TimeField::kMinute: return t.minute;
    case TimeField::kSecond: return t.second;
  }
  return 0.0;
}

void encode_into(const Timestamp& t, const TemporalEncoderConfig& cfg, std::span<double> out) {
  if (!t.valid()) throw ParseError("invalid timestamp " + t.to_string());
  if (t.year < cfg.anchor_year) {
    throw RangeError("timestamp " + t.to_string() + " precedes anchor year " +
                     std::to_string(cfg.anchor_year));
  }
  if (t.year > cfg.anchor_year + cfg.year_span - 1) {
    throw RangeError("timestamp " + t.to_string() + " is past the encoder's year span");
  }
  std::size_t k = 0;
  for (std::size_t j = 0; j < kTimeFieldCount; ++j) {
    if (!cfg.active_fields[j]) continue;
    const auto field = static_cast<TimeField>(j);
    const int resolution = cfg.resolution(field);
    if (resolution <= 1) {
      out[k++] = -1.0;
      continue;
    }
    const double base = field == TimeField::kYear ? cfg.anchor_year : kFieldBase[j];
    // 2 * offset / (N - 1) rather than (2 / (N - 1)) * offset keeps the
    // endpoints exact.
    out[k++] = -1.0 + (2.0 * (field_value(t, field) - base)) / (resolution - 1);
  }
}

}  // namespace

int TemporalEncoderConfig::resolution(TimeField field) const noexcept {
  if (field == TimeField::kYear) return year_span;
  return kClockResolution[static_cast<std::size_t>(field)];
}

std::size_t TemporalEncoderConfig::active_count() const noexcept {
  return static_cast<std::size_t>(std::count(active_fields.begin(), active_fields.end(), true));
}

TemporalEncoderConfig TemporalEncoderConfig::from_timestamps(
    std::span<const Timestamp> timestamps, std::array<bool, kTimeFieldCount> active) {
  if (timestamps.empty()) throw EmptyInputError("cannot derive encoder config from no timestamps");
  TemporalEncoderConfig cfg;
  cfg.active_fields = active;
  cfg.anchor_year = timestamps.front().year;
  int lo = timestamps.front().year;
  int hi = lo;
  for (const auto& t : timestamps) {
    lo = std::min(lo, t.year);
    hi = std::max(hi, t.year);
  }
  cfg.year_span = hi - lo + 1;
  return cfg;
}

std::vector<double> temporal_encode(const Timestamp& t, const TemporalEncoderConfig& cfg) {
  std::vector<double> out(cfg.active_count());
  encode_into(t, cfg, out);
  return out;
}

EncodedCoords temporal_encode(std::span<const Timestamp> ts, const TemporalEncoderConfig& cfg) {
  if (cfg.active_count() == 0) throw ConfigError("temporal encoder has no active fields");
  EncodedCoords coords{Matrix(ts.size(), cfg.active_count())};
  for (std::size_t i = 0; i < ts.size(); ++i) encode_into(ts[i], cfg, coords.values.row(i));
  return coords;
}

EncodedCoords vanilla_encode(std::size_t n_points) {
  if (n_points == 0) throw EmptyInputError("vanilla encoding needs at least one point");
  EncodedCoords coords{Matrix(n_points, 1)};
  const double n = static_cast<double>(n_points);
  for (std::size_t i = 1; i <= n_points; ++i) {
    coords.values(i - 1, 0) = (2.0 / n) * static_cast<double>(i) - 1.0;
  }
  return coords;
}

SplitCoords vanilla_star_encode(std::size_t n_train, std::size_t n_test) {
  if (n_train == 0) throw EmptyInputError("vanilla* encoding needs a non-empty train split");
  SplitCoords out{vanilla_encode(n_train), EncodedCoords{Matrix(n_test, 1)}};
  const double step = 2.0 / static_cast<double>(n_train);
  for (std::size_t j = 1; j <= n_test; ++j) {
    out.test.values(j - 1, 0) = 1.0 + step * static_cast<double>(j);
  }
  return out;
}

std::string_view encoder_name(EncoderKind kind) noexcept {
  switch (kind) {
    case EncoderKind::kTemporal: return "temporal";
    case EncoderKind::kVanilla: return "vanilla";
    case EncoderKind::kVanillaStar: return "vanilla_star";
  }
  return "unknown";
}

EncoderKind parse_encoder(std::string_view name) {
  if (name == "temporal" || name == "temp") return EncoderKind::kTemporal;
  if (name == "vanilla" || name == "van") return EncoderKind::kVanilla;
  if (name == "vanilla_star" || name == "vanilla*" || name == "van*") {
    return EncoderKind::kVanillaStar;
  }
  throw ConfigError("unknown encoder '" + std::string(name) +
                    "' (expected temporal, vanilla or vanilla_star)");
}

SplitCoords encode_split(EncoderKind kind, std::optional<std::span<const Timestamp>> train,
                         std::span<const Timestamp> test,
                         std::array<bool, kTimeFieldCount> active) {
  if (test.empty()) throw EmptyInputError("test split is empty");
  const bool has_train = train.has_value() && !train->empty();
  switch (kind) {
    case EncoderKind::kTemporal: {
      if (!has_train) {
        return {EncodedCoords{}, temporal_encode(test, TemporalEncoderConfig::from_timestamps(test, active))};
      }
      std::vector<Timestamp> all(train->begin(), train->end());
      all.insert(all.end(), test.begin(), test.end());
      const auto cfg = TemporalEncoderConfig::from_timestamps(all, active);
      return {temporal_encode(*train, cfg), temporal_encode(test, cfg)};
    }
    case EncoderKind::kVanilla:
      if (!has_train) return {EncodedCoords{}, vanilla_encode(test.size())};
      return {vanilla_encode(train->size()), vanilla_encode(test.size())};
    case EncoderKind::kVanillaStar:
      if (!has_train) return {EncodedCoords{}, vanilla_encode(test.size())};
      return vanilla_star_encode(train->size(), test.size());
  }
  throw ConfigError("unknown encoder kind");
}

}  // namespace inrad
