#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "inrad/errors.hpp"

namespace inrad::cli {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const KeyDef* find_key(const std::string& name) {
  for (const auto& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace

const std::vector<KeyDef>& keys() {
  static const std::vector<KeyDef> table{
      // data
      {"train", "", "train split CSV"},
      {"test", "", "test split CSV"},
      {"labels", "", "test label file, one 0/1 per line"},
      {"root", "", "multi-entity root holding <entity>/{train,test,test_label}.csv"},
      {"header", "auto", "CSV header handling: auto, present or absent"},
      {"start", "2021-01-01 00:00:00", "first synthetic timestamp for rows without one"},
      {"interval", "60", "synthetic timestamp spacing in seconds"},
      // pipeline
      {"mode", "warm_start", "warm_start or cold_start"},
      {"encoder", "temporal", "temporal, vanilla or vanilla_star"},
      {"fields", "year,month,day,hour,minute,second", "active temporal fields"},
      {"seed", "0", "model initialisation seed (INRAD_SEED is the fallback)"},
      {"hidden_dim", "256", "hidden width"},
      {"n_layers", "3", "number of sine layers"},
      {"omega0_first", "3000", "first layer frequency"},
      {"omega0_hidden", "30", "hidden layer frequency"},
      {"lr", "0.0001", "Adam learning rate"},
      {"beta1", "0.9", "Adam beta1"},
      {"beta2", "0.99", "Adam beta2"},
      {"epsilon", "1e-08", "Adam epsilon"},
      {"patience", "30", "early stopping patience in epochs"},
      {"max_epochs", "10000", "epoch cap per training phase"},
      {"min_rel_improvement", "1e-06", "relative loss decrease that counts as improvement"},
      {"batch_size", "0", "minibatch size; 0 trains full-batch"},
      {"threshold_candidates", "0", "cap on best-F1 threshold candidates; 0 tries all"},
      // output
      {"out", "inrad_out", "output directory"},
      {"jobs", "1", "worker cap: entities in parallel, or kernel threads for one entity"},
      {"plot", "false", "also write SVG plots"},
      // synthetic data
      {"synth_train", "2000", "synthetic train length"},
      {"synth_test", "2000", "synthetic test length"},
      {"synth_d", "3", "synthetic feature count"},
      {"synth_noise", "0.01", "synthetic noise standard deviation"},
      {"synth_magnitude", "1", "anomaly magnitude in units of feature peak amplitude"},
      {"synth_segments", "3", "number of anomaly segments"},
      {"synth_min_len", "10", "shortest anomaly segment"},
      {"synth_max_len", "30", "longest anomaly segment"},
      {"synth_seed", "42", "synthetic data seed"},
      // encoder-bench
      {"bench_target_loss", "0.001", "loss each phase must reach"},
      {"bench_max_epochs", "3000", "epoch cap per phase in the encoder bench"},
      // sweep
      {"sweep_param", "patience", "comma list of patience, hidden_dim, omega0_first, n_layers"},
      {"sweep_values", "", "comma list of values; empty uses the built-in grid"},
  };
  return table;
}

Settings Settings::defaults() {
  Settings s;
  for (const auto& k : keys()) s.values_[k.name] = k.default_value;
  return s;
}

void Settings::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ConfigError("unknown setting '" + key + "'");
  values_[key] = value;
}

const std::string& Settings::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown setting '" + key + "'");
  return it->second;
}

double Settings::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("setting " + key + " = '" + v + "' is not a number");
  }
  return out;
}

std::int64_t Settings::get_int(const std::string& key) const {
  const std::string& v = get(key);
  std::int64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("setting " + key + " = '" + v + "' is not an integer");
  }
  return out;
}

std::size_t Settings::get_count(const std::string& key) const {
  const auto v = get_int(key);
  if (v < 0) throw ConfigError("setting " + key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

bool Settings::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("setting " + key + " = '" + v + "' is not a boolean");
}

std::vector<std::string> Settings::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string Settings::serialize() const {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + get(k.name) + "\n";
  return out;
}

void apply_config_text(Settings& settings, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (!find_key(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown setting '" + key + "'");
    }
    settings.set(key, trim(std::string_view(body).substr(eq + 1)));
  }
}

void apply_config_file(Settings& settings, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(settings, buf.str(), path.string());
}

Settings resolve_settings(const std::optional<std::filesystem::path>& config_file,
                          const std::map<std::string, std::string>& flags) {
  Settings s = Settings::defaults();
  if (const char* env = std::getenv("INRAD_SEED"); env && *env) s.set("seed", env);
  if (config_file) apply_config_file(s, *config_file);
  for (const auto& [k, v] : flags) s.set(k, v);
  return s;
}

}  // namespace inrad::cli
