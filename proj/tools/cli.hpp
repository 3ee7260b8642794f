#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inrad/data_io.hpp"
#include "inrad/detector.hpp"
#include "inrad/trainer.hpp"

namespace inrad::cli {

// Every tunable has one key. Config files use the key verbatim; flags use it
// with underscores turned into dashes.
struct KeyDef {
  std::string name;
  std::string default_value;
  std::string help;
};
const std::vector<KeyDef>& keys();

// Resolved key -> value text, in key-table order when serialized. Typed
// getters throw ConfigError naming the key on malformed values.
class Settings {
 public:
  static Settings defaults();

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool has_value(const std::string& key) const { return !get(key).empty(); }
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::size_t get_count(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;

  // "key = value" lines; parseable by load_config.
  std::string serialize() const;

 private:
  std::map<std::string, std::string> values_;
};

// Applies a flat "key = value" file with '#' comments onto settings.
void apply_config_file(Settings& settings, const std::filesystem::path& path);
void apply_config_text(Settings& settings, const std::string& text, const std::string& origin);

// Precedence, lowest first: defaults, INRAD_SEED, config file, flags.
Settings resolve_settings(const std::optional<std::filesystem::path>& config_file,
                          const std::map<std::string, std::string>& flags);

PipelineConfig pipeline_config(const Settings& s);
SynthSpec synth_spec(const Settings& s);

struct EntityData {
  std::string name;
  std::optional<TimeSeries> train;  // absent for test-only cold start
  TimeSeries test;
};
// train/test files, an entity root, or the synthetic generator, in that order.
std::vector<EntityData> load_datasets(const Settings& s);

struct EntityOutcome {
  std::string name;
  PipelineResult result;
  std::optional<EvalResult> eval;
};
// Runs the pipeline for every entity, at most `jobs` at a time.
std::vector<EntityOutcome> run_entities(const Settings& s, const std::vector<EntityData>& data);

struct BenchRow {
  EncoderKind encoder = EncoderKind::kTemporal;
  std::size_t pretrain_epochs = 0;
  std::size_t retrain_epochs = 0;
  std::size_t total_epochs = 0;
  double seconds = 0.0;
  double pretrain_loss = 0.0;
  double retrain_loss = 0.0;
  bool converged = false;  // both phases reached the target loss
};
std::vector<BenchRow> encoder_bench(const Settings& s, const EntityData& data);

struct SweepRow {
  std::string param;
  std::string value;
  EvalResult eval;
  std::size_t pretrain_epochs = 0;
  std::size_t retrain_epochs = 0;
};
// Settings that appear in several grids are run once.
std::vector<SweepRow> sweep(const Settings& s, const EntityData& data);

// Built-in five-point grid for a sweepable parameter.
std::vector<std::string> default_grid(const std::string& param);

// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitInternal = 4;

}  // namespace inrad::cli
