#include "inrad/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string_view>

#include "inrad/errors.hpp"
#include "inrad/rng.hpp"

namespace inrad {
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool looks_like_timestamp(std::string_view s) {
  try {
    parse_timestamp(s);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void TimeSeries::validate() const {
  if (timestamps.size() != values.rows()) {
    throw SchemaError("series has " + std::to_string(timestamps.size()) + " timestamps for " +
                      std::to_string(values.rows()) + " rows");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i - 1] < timestamps[i])) {
      throw FormatError("timestamps not strictly increasing at row " + std::to_string(i + 1) +
                        " (" + timestamps[i].to_string() + ")");
    }
  }
  if (labels && labels->size() != values.rows()) {
    throw SchemaError("label count " + std::to_string(labels->size()) + " does not match " +
                      std::to_string(values.rows()) + " rows");
  }
}

ScalingStats ScalingStats::compute(const Matrix& values) {
  if (values.rows() == 0) throw EmptyInputError("scaling statistics need at least one row");
  ScalingStats s;
  s.min.assign(values.cols(), 0.0);
  s.max.assign(values.cols(), 0.0);
  for (std::size_t c = 0; c < values.cols(); ++c) {
    s.min[c] = s.max[c] = values(0, c);
  }
  for (std::size_t r = 1; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      s.min[c] = std::min(s.min[c], values(r, c));
      s.max[c] = std::max(s.max[c], values(r, c));
    }
  }
  return s;
}

Matrix scale(const Matrix& values, const ScalingStats& stats) {
  if (values.cols() != stats.dim()) {
    throw SchemaError("scale: values have " + std::to_string(values.cols()) +
                      " features, stats have " + std::to_string(stats.dim()));
  }
  Matrix out(values.rows(), values.cols());
  for (std::size_t c = 0; c < values.cols(); ++c) {
    const double range = stats.max[c] - stats.min[c];
    for (std::size_t r = 0; r < values.rows(); ++r) {
      out(r, c) = range > 0.0 ? 2.0 * (values(r, c) - stats.min[c]) / range - 1.0 : 0.0;
    }
  }
  return out;
}

Matrix unscale(const Matrix& scaled, const ScalingStats& stats) {
  if (scaled.cols() != stats.dim()) {
    throw SchemaError("unscale: values have " + std::to_string(scaled.cols()) +
                      " features, stats have " + std::to_string(stats.dim()));
  }
  Matrix out(scaled.rows(), scaled.cols());
  for (std::size_t c = 0; c < scaled.cols(); ++c) {
    const double range = stats.max[c] - stats.min[c];
    for (std::size_t r = 0; r < scaled.rows(); ++r) {
      out(r, c) = range > 0.0 ? (scaled(r, c) + 1.0) * range / 2.0 + stats.min[c] : stats.min[c];
    }
  }
  return out;
}

TimeSeries load_series_csv(const fs::path& path, const CsvOptions& options,
                           const Timestamp& start) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::optional<bool> has_timestamp;
  std::size_t width = 0;
  bool header_checked = false;
  std::vector<Timestamp> stamps;
  std::vector<double> data;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!header_checked) {
      header_checked = true;
      bool header = options.header == CsvOptions::Header::kPresent;
      if (options.header == CsvOptions::Header::kAuto) {
        for (std::size_t i = 0; i < fields.size() && !header; ++i) {
          const bool ok = parse_double(fields[i]).has_value() ||
                          (i == 0 && looks_like_timestamp(fields[i]));
          header = !ok;
        }
      }
      if (header) continue;
    }
    if (!has_timestamp) {
      has_timestamp = looks_like_timestamp(fields[0]);
      width = fields.size() - (*has_timestamp ? 1 : 0);
      if (width == 0) throw FormatError(where(path, line_no) + ": no feature columns");
    }
    const std::size_t expected = width + (*has_timestamp ? 1 : 0);
    if (fields.size() != expected) {
      throw FormatError(where(path, line_no) + ": expected " + std::to_string(expected) +
                        " fields, found " + std::to_string(fields.size()));
    }
    std::size_t first = 0;
    if (*has_timestamp) {
      try {
        stamps.push_back(parse_timestamp(fields[0]));
      } catch (const ParseError& e) {
        throw ParseError(where(path, line_no) + ": " + e.what());
      }
      first = 1;
    }
    for (std::size_t i = first; i < fields.size(); ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) {
        throw FormatError(where(path, line_no) + ": field " + std::to_string(i + 1) + " '" +
                          std::string(fields[i]) + "' is not a finite number");
      }
      data.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw EmptyInputError(path.string() + " contains no data rows");

  TimeSeries series;
  series.values = Matrix(rows, width, std::move(data));
  series.timestamps = *has_timestamp
                          ? std::move(stamps)
                          : assign_synthetic_timestamps(rows, start, options.interval_seconds);
  series.validate();
  return series;
}

Labels load_labels(const fs::path& path) {
  auto in = open_input(path);
  Labels out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t == "0" || t == "0.0") out.push_back(0);
    else if (t == "1" || t == "1.0") out.push_back(1);
    else if (out.empty() && !parse_double(t)) continue;  // header
    else throw FormatError(where(path, line_no) + ": label '" + std::string(t) + "' is not 0 or 1");
  }
  if (out.empty()) throw EmptyInputError(path.string() + " contains no labels");
  return out;
}

DatasetBundle load_csv(const fs::path& train_path, const fs::path& test_path,
                       const std::optional<fs::path>& label_path, const CsvOptions& options) {
  DatasetBundle b;
  b.train = load_series_csv(train_path, options, options.synthetic_start);
  const Timestamp test_start = add_seconds(b.train.timestamps.back(), options.interval_seconds);
  b.test = load_series_csv(test_path, options, test_start);
  if (b.train.dim() != b.test.dim()) {
    throw SchemaError("train has " + std::to_string(b.train.dim()) + " features, test has " +
                      std::to_string(b.test.dim()));
  }
  if (!(b.train.timestamps.back() < b.test.timestamps.front())) {
    throw SchemaError("test timestamps must follow the train timestamps");
  }
  if (label_path) {
    b.test.labels = load_labels(*label_path);
    if (b.test.labels->size() != b.test.length()) {
      throw SchemaError("label file has " + std::to_string(b.test.labels->size()) +
                        " rows, test has " + std::to_string(b.test.length()));
    }
  }
  b.stats = ScalingStats::compute(b.train.values);
  return b;
}

void save_series_csv(const TimeSeries& series, const fs::path& path, bool with_timestamps) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  if (with_timestamps) out << "timestamp";
  for (std::size_t c = 0; c < series.dim(); ++c) {
    if (with_timestamps || c > 0) out << ',';
    out << 'f' << c;
  }
  out << '\n';
  for (std::size_t r = 0; r < series.length(); ++r) {
    if (with_timestamps) out << series.timestamps[r].to_string();
    for (std::size_t c = 0; c < series.dim(); ++c) {
      if (with_timestamps || c > 0) out << ',';
      out << format_double(series.values(r, c));
    }
    out << '\n';
  }
}

void save_labels(const Labels& labels, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (auto l : labels) out << static_cast<int>(l) << '\n';
}

std::vector<std::string> list_entities(const fs::path& root) {
  if (!fs::is_directory(root)) throw FormatError(root.string() + " is not a directory");
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "train.csv") &&
        fs::exists(entry.path() / "test.csv")) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DatasetBundle load_entity(const fs::path& root, const std::string& entity,
                          const CsvOptions& options) {
  const fs::path dir = root / entity;
  std::optional<fs::path> labels;
  if (fs::exists(dir / "test_label.csv")) labels = dir / "test_label.csv";
  auto b = load_csv(dir / "train.csv", dir / "test.csv", labels, options);
  b.train.entity_id = entity;
  b.test.entity_id = entity;
  return b;
}

std::string anomaly_name(AnomalyType type) {
  switch (type) {
    case AnomalyType::kSpike: return "spike";
    case AnomalyType::kLevelShift: return "level_shift";
    case AnomalyType::kNoiseBurst: return "noise_burst";
  }
  return "unknown";
}

void SynthSpec::validate() const {
  if (length_train == 0 || length_test == 0 || d == 0) {
    throw SpecError("synthetic lengths and dimension must be positive");
  }
  if (components == 0 || periods.empty()) throw SpecError("synthetic signal needs components");
  if (noise_sigma < 0.0 || amplitude_min <= 0.0 || amplitude_max < amplitude_min) {
    throw SpecError("invalid synthetic amplitude or noise settings");
  }
  if (n_segments > 0) {
    if (types.empty()) throw SpecError("anomaly types list is empty");
    if (min_segment_length == 0 || max_segment_length < min_segment_length) {
      throw SpecError("invalid anomaly segment length range");
    }
    // Each segment gets its own slot with at least one normal point either side.
    const std::size_t slot = length_test / n_segments;
    if (slot < max_segment_length + 2) {
      throw SpecError("anomaly segments do not fit in a test split of length " +
                      std::to_string(length_test));
    }
  }
}

SynthDataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t total = spec.length_train + spec.length_test;

  Matrix values(total, spec.d);
  std::vector<double> peak(spec.d, 0.0);
  for (std::size_t f = 0; f < spec.d; ++f) {
    for (std::size_t c = 0; c < spec.components; ++c) {
      const double period = spec.periods[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(spec.periods.size()) - 1))];
      const double amp = rng.uniform(spec.amplitude_min, spec.amplitude_max);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      peak[f] += amp;
      for (std::size_t t = 0; t < total; ++t) {
        values(t, f) += amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
      }
    }
  }
  Rng noise = rng.fork(1);
  for (double& v : values.values()) v += spec.noise_sigma * noise.normal();

  SynthDataset out;
  Labels labels(spec.length_test, 0);
  if (spec.n_segments > 0) {
    const std::size_t slot = spec.length_test / spec.n_segments;
    Rng arng = rng.fork(2);
    for (std::size_t s = 0; s < spec.n_segments; ++s) {
      AnomalySegment seg;
      seg.type = spec.types[s % spec.types.size()];
      seg.length = static_cast<std::size_t>(arng.uniform_int(
          static_cast<std::int64_t>(spec.min_segment_length),
          static_cast<std::int64_t>(spec.max_segment_length)));
      const std::size_t lo = s * slot + 1;
      const std::size_t hi = (s + 1) * slot - 1 - seg.length;
      seg.begin = static_cast<std::size_t>(
          arng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
      seg.feature = static_cast<std::size_t>(
          arng.uniform_int(0, static_cast<std::int64_t>(spec.d) - 1));
      const double sign = arng.uniform() < 0.5 ? -1.0 : 1.0;
      seg.magnitude = sign * spec.magnitude * peak[seg.feature];

      const double half = static_cast<double>(seg.length - 1) / 2.0;
      for (std::size_t k = 0; k < seg.length; ++k) {
        const std::size_t row = spec.length_train + seg.begin + k;
        double delta = 0.0;
        switch (seg.type) {
          case AnomalyType::kSpike: {
            const double dist = half > 0.0 ? std::abs(static_cast<double>(k) - half) / (half + 1.0) : 0.0;
            delta = seg.magnitude * (1.0 - dist);
            break;
          }
          case AnomalyType::kLevelShift: delta = seg.magnitude; break;
          case AnomalyType::kNoiseBurst: delta = 0.5 * std::abs(seg.magnitude) * arng.normal(); break;
        }
        values(row, seg.feature) += delta;
        labels[seg.begin + k] = 1;
      }
      out.anomalies.push_back(seg);
    }
  }

  const auto stamps = assign_synthetic_timestamps(total, spec.start, spec.interval_seconds);
  auto& b = out.bundle;
  const auto split = static_cast<std::ptrdiff_t>(spec.length_train);
  b.train.timestamps.assign(stamps.begin(), stamps.begin() + split);
  b.test.timestamps.assign(stamps.begin() + split, stamps.end());
  std::vector<double> train_vals(values.data(), values.data() + spec.length_train * spec.d);
  std::vector<double> test_vals(values.data() + spec.length_train * spec.d,
                                values.data() + total * spec.d);
  b.train.values = Matrix(spec.length_train, spec.d, std::move(train_vals));
  b.test.values = Matrix(spec.length_test, spec.d, std::move(test_vals));
  b.test.labels = std::move(labels);
  b.train.entity_id = b.test.entity_id = "synthetic";
  b.stats = ScalingStats::compute(b.train.values);
  return out;
}

void save_dataset(const SynthDataset& data, const fs::path& dir) {
  fs::create_directories(dir);
  save_series_csv(data.bundle.train, dir / "train.csv");
  save_series_csv(data.bundle.test, dir / "test.csv");
  save_labels(*data.bundle.test.labels, dir / "test_label.csv");
  std::ofstream inv(dir / "anomalies.csv");
  if (!inv) throw FormatError("cannot write " + (dir / "anomalies.csv").string());
  inv << "type,begin,length,feature,magnitude\n";
  for (const auto& a : data.anomalies) {
    inv << anomaly_name(a.type) << ',' << a.begin << ',' << a.length << ',' << a.feature << ','
        << format_double(a.magnitude) << '\n';
  }
}

DatasetStats dataset_stats(const DatasetBundle& bundle) {
  DatasetStats s;
  s.entity = bundle.test.entity_id;
  s.train_length = bundle.train.length();
  s.test_length = bundle.test.length();
  s.d = bundle.test.dim();
  if (bundle.test.labels) {
    const auto& l = *bundle.test.labels;
    s.anomalies = static_cast<std::size_t>(std::count(l.begin(), l.end(), 1));
    s.segments = label_segments(l).size();
    if (!l.empty()) s.anomaly_percent = 100.0 * static_cast<double>(s.anomalies) / static_cast<double>(l.size());
  }
  return s;
}

}  // namespace inrad
