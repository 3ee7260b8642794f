#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inrad/detector.hpp"
#include "inrad/matrix.hpp"
#include "inrad/timestamp.hpp"

namespace inrad {

struct TimeSeries {
  std::vector<Timestamp> timestamps;
  Matrix values;  // N x d
  std::optional<Labels> labels;
  std::string entity_id;

  std::size_t length() const noexcept { return values.rows(); }
  std::size_t dim() const noexcept { return values.cols(); }
  // Throws on unsorted timestamps or length mismatches.
  void validate() const;
};

// Per-feature min/max for the [-1, 1] scaling.
struct ScalingStats {
  std::vector<double> min;
  std::vector<double> max;

  static ScalingStats compute(const Matrix& values);
  std::size_t dim() const noexcept { return min.size(); }
  bool operator==(const ScalingStats&) const = default;
};

// 2 (x - min) / (max - min) - 1 per feature; constant features map to 0.
// Values outside the fitted range pass through unclipped.
Matrix scale(const Matrix& values, const ScalingStats& stats);
Matrix unscale(const Matrix& scaled, const ScalingStats& stats);

struct DatasetBundle {
  TimeSeries train;
  TimeSeries test;
  ScalingStats stats;  // fitted on train
};

struct CsvOptions {
  enum class Header { kAuto, kPresent, kAbsent };
  Header header = Header::kAuto;
  // Start and spacing for rows without a timestamp column.
  Timestamp synthetic_start = kDefaultSyntheticStart;
  std::int64_t interval_seconds = 60;
};

// Feature CSV with optional header and optional leading timestamp column.
// Without timestamps, rows get synthetic ones starting at `start`.
TimeSeries load_series_csv(const std::filesystem::path& path, const CsvOptions& options,
                           const Timestamp& start);
Labels load_labels(const std::filesystem::path& path);

// Test rows without timestamps continue one interval after the last train row.
DatasetBundle load_csv(const std::filesystem::path& train_path,
                       const std::filesystem::path& test_path,
                       const std::optional<std::filesystem::path>& label_path,
                       const CsvOptions& options = {});

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Writes "timestamp,f0,f1,..." (timestamp column optional) with round-trip
// precision.
void save_series_csv(const TimeSeries& series, const std::filesystem::path& path,
                     bool with_timestamps = true);
void save_labels(const Labels& labels, const std::filesystem::path& path);

// Entities under root: sub-directories holding train.csv and test.csv, sorted by name.
std::vector<std::string> list_entities(const std::filesystem::path& root);
DatasetBundle load_entity(const std::filesystem::path& root, const std::string& entity,
                          const CsvOptions& options = {});

// -- synthetic data --------------------------------------------------------

enum class AnomalyType { kSpike, kLevelShift, kNoiseBurst };
std::string anomaly_name(AnomalyType type);

struct SynthSpec {
  std::size_t length_train = 2000;
  std::size_t length_test = 2000;
  std::size_t d = 3;
  // Base signal per feature: sum of sinusoids with periods (in samples) drawn
  // from `periods`, amplitudes uniform in [amplitude_min, amplitude_max].
  std::size_t components = 2;
  std::vector<double> periods{60.0, 120.0, 180.0, 240.0, 360.0, 720.0};
  double amplitude_min = 0.5;
  double amplitude_max = 1.0;
  double noise_sigma = 0.01;
  // Anomaly segments cycle through `types`. Magnitudes are in units of the
  // affected feature's peak amplitude.
  std::size_t n_segments = 3;
  std::vector<AnomalyType> types{AnomalyType::kSpike, AnomalyType::kLevelShift,
                                 AnomalyType::kNoiseBurst};
  double magnitude = 1.0;
  std::size_t min_segment_length = 10;
  std::size_t max_segment_length = 30;
  Timestamp start = kDefaultSyntheticStart;
  std::int64_t interval_seconds = 60;
  std::uint64_t seed = 42;

  void validate() const;
};

struct AnomalySegment {
  AnomalyType type = AnomalyType::kSpike;
  std::size_t begin = 0;  // test row index
  std::size_t length = 0;
  std::size_t feature = 0;
  double magnitude = 0.0;
};

struct SynthDataset {
  DatasetBundle bundle;
  std::vector<AnomalySegment> anomalies;  // sorted by begin
};

SynthDataset generate_synthetic(const SynthSpec& spec);

// Saves train.csv, test.csv, test_label.csv and anomalies.csv into dir.
void save_dataset(const SynthDataset& data, const std::filesystem::path& dir);

struct DatasetStats {
  std::string entity;
  std::size_t train_length = 0;
  std::size_t test_length = 0;
  std::size_t d = 0;
  std::size_t anomalies = 0;
  double anomaly_percent = 0.0;
  std::size_t segments = 0;
};
DatasetStats dataset_stats(const DatasetBundle& bundle);

}  // namespace inrad
