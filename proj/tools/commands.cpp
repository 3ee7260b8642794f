#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include "cli.hpp"
#include "inrad/errors.hpp"
#include "inrad/kernels.hpp"
#include "svg.hpp"
#include "CLI11.hpp"

namespace inrad::cli {
namespace {

// Keys whose values spell a sweepable SirenConfig or TrainConfig field.
const std::vector<std::string> kSweepParams{"patience", "hidden_dim", "omega0_first", "n_layers"};

CsvOptions csv_options(const Settings& s) {
  CsvOptions o;
  const std::string& h = s.get("header");
  if (h == "auto") o.header = CsvOptions::Header::kAuto;
  else if (h == "present") o.header = CsvOptions::Header::kPresent;
  else if (h == "absent") o.header = CsvOptions::Header::kAbsent;
  else throw ConfigError("setting header = '" + h + "' is not auto, present or absent");
  o.synthetic_start = parse_timestamp(s.get("start"));
  o.interval_seconds = s.get_int("interval");
  if (o.interval_seconds <= 0) throw ConfigError("setting interval must be positive");
  return o;
}

std::array<bool, kTimeFieldCount> parse_fields(const std::vector<std::string>& names) {
  static const char* const kNames[kTimeFieldCount] = {"year", "month", "day",
                                                      "hour", "minute", "second"};
  std::array<bool, kTimeFieldCount> active{};
  for (const auto& n : names) {
    const auto it = std::find(std::begin(kNames), std::end(kNames), n);
    if (it == std::end(kNames)) throw ConfigError("unknown temporal field '" + n + "'");
    active[static_cast<std::size_t>(it - std::begin(kNames))] = true;
  }
  if (std::none_of(active.begin(), active.end(), [](bool b) { return b; })) {
    throw ConfigError("setting fields selects no temporal field");
  }
  return active;
}

std::optional<EvalResult> evaluate(const Settings& s, const EntityData& d,
                                   const PipelineResult& r) {
  if (!d.test.labels) return std::nullopt;
  BestF1Options opt;
  opt.max_candidates = s.get_count("threshold_candidates");
  return best_f1_search(r.scores, *d.test.labels, opt);
}

EntityOutcome run_one(const Settings& s, const PipelineConfig& cfg, const EntityData& d) {
  EntityOutcome o{d.name, detect_pipeline(d.train ? &*d.train : nullptr, d.test, cfg), {}};
  o.eval = evaluate(s, d, o.result);
  return o;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string threshold_text(double t) {
  return std::isfinite(t) ? format_double(t) : std::string("null");
}

// Fixed key order keeps the files byte-stable across runs.
std::string metrics_json(const Settings& s, const std::optional<EvalResult>& e) {
  std::string out = "{\n";
  if (e) {
    out += "  \"precision\": " + format_double(e->precision) + ",\n";
    out += "  \"recall\": " + format_double(e->recall) + ",\n";
    out += "  \"f1\": " + format_double(e->f1) + ",\n";
    out += "  \"threshold\": " + threshold_text(e->threshold) + ",\n";
  } else {
    out += "  \"precision\": null,\n  \"recall\": null,\n  \"f1\": null,\n  \"threshold\": null,\n";
  }
  out += "  \"mode\": \"" + s.get("mode") + "\",\n";
  out += "  \"encoder\": \"" + s.get("encoder") + "\"\n}\n";
  return out;
}

std::string report_json(const TrainReport& r) {
  auto opt = [](const auto& v) {
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>) {
      return v ? format_double(*v) : std::string("null");
    } else {
      return v ? std::to_string(*v) : std::string("null");
    }
  };
  std::string out = "{\n";
  out += "    \"epochs\": " + std::to_string(r.stopping_epoch) + ",\n";
  out += "    \"best_epoch\": " + std::to_string(r.best_epoch) + ",\n";
  out += "    \"best_loss\": " + format_double(r.best_loss) + ",\n";
  out += "    \"hit_max_epochs\": " + std::string(r.hit_max_epochs ? "true" : "false") + ",\n";
  out += "    \"epochs_to_target\": " + opt(r.epochs_to_target) + ",\n";
  out += "    \"seconds_to_target\": " + opt(r.seconds_to_target) + ",\n";
  out += "    \"seconds_per_epoch\": " + format_double(r.seconds_per_epoch) + ",\n";
  out += "    \"total_seconds\": " + format_double(r.total_seconds) + "\n  }";
  return out;
}

std::string loss_csv(const TrainReport& r) {
  std::string out = "epoch,loss\n";
  for (std::size_t i = 0; i < r.loss_trace.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_double(r.loss_trace[i]) + "\n";
  }
  return out;
}

svg::Series loss_series(const std::string& name, const TrainReport& r, std::size_t offset) {
  svg::Series s{name, {}, {}};
  for (std::size_t i = 0; i < r.loss_trace.size(); ++i) {
    s.x.push_back(static_cast<double>(offset + i + 1));
    s.y.push_back(std::log10(std::max(r.loss_trace[i], 1e-300)));
  }
  return s;
}

void write_entity(const Settings& s, const EntityData& d, const EntityOutcome& o,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string scores = "timestamp,score\n";
  for (std::size_t i = 0; i < o.result.scores.size(); ++i) {
    scores += d.test.timestamps[i].to_string() + "," + format_double(o.result.scores[i]) + "\n";
  }
  write_text(dir / "scores.csv", scores);
  write_text(dir / "metrics.json", metrics_json(s, o.eval));
  std::string report = "{\n  \"entity\": \"" + o.name + "\",\n  \"pretrain\": ";
  report += o.result.pretrain ? report_json(*o.result.pretrain) : std::string("null");
  report += ",\n  \"retrain\": " + report_json(o.result.retrain) + "\n}\n";
  write_text(dir / "train_report.json", report);
  if (o.result.pretrain) write_text(dir / "pretrain_loss.csv", loss_csv(*o.result.pretrain));
  write_text(dir / "retrain_loss.csv", loss_csv(o.result.retrain));
  write_text(dir / "config.resolved", s.serialize());

  if (!s.get_bool("plot")) return;
  svg::LinePlot sp;
  sp.title = "Anomaly score: " + o.name;
  sp.x_label = "test row";
  sp.y_label = "score";
  svg::Series series{"score", {}, o.result.scores};
  for (std::size_t i = 0; i < o.result.scores.size(); ++i) series.x.push_back(static_cast<double>(i));
  sp.series.push_back(std::move(series));
  if (d.test.labels) {
    for (const auto& seg : label_segments(*d.test.labels)) {
      sp.shaded.emplace_back(static_cast<double>(seg.begin), static_cast<double>(seg.end));
    }
  }
  if (o.eval && std::isfinite(o.eval->threshold)) sp.hline = o.eval->threshold;
  svg::write_line_plot(sp, dir / "scores.svg");

  svg::LinePlot lp;
  lp.title = "Training loss: " + o.name;
  lp.x_label = "epoch";
  lp.y_label = "log10 loss";
  std::size_t offset = 0;
  if (o.result.pretrain) {
    lp.series.push_back(loss_series("pretrain", *o.result.pretrain, 0));
    offset = o.result.pretrain->loss_trace.size();
  }
  lp.series.push_back(loss_series("retrain", o.result.retrain, offset));
  svg::write_line_plot(lp, dir / "loss.svg");
}

void write_aggregate(const Settings& s, const std::vector<EntityOutcome>& outcomes,
                     const std::filesystem::path& dir) {
  double p = 0.0, r = 0.0, f = 0.0;
  std::size_t n = 0;
  std::string entities;
  for (const auto& o : outcomes) {
    if (!entities.empty()) entities += ",\n";
    entities += "    {\"entity\": \"" + o.name + "\"";
    if (o.eval) {
      p += o.eval->precision;
      r += o.eval->recall;
      f += o.eval->f1;
      ++n;
      entities += ", \"precision\": " + format_double(o.eval->precision) +
                  ", \"recall\": " + format_double(o.eval->recall) +
                  ", \"f1\": " + format_double(o.eval->f1);
    }
    entities += "}";
  }
  auto mean = [&](double v) {
    return n ? format_double(v / static_cast<double>(n)) : std::string("null");
  };
  std::string out = "{\n";
  out += "  \"precision\": " + mean(p) + ",\n";
  out += "  \"recall\": " + mean(r) + ",\n";
  out += "  \"f1\": " + mean(f) + ",\n";
  out += "  \"mode\": \"" + s.get("mode") + "\",\n";
  out += "  \"encoder\": \"" + s.get("encoder") + "\",\n";
  out += "  \"entities\": [\n" + entities + "\n  ]\n}\n";
  std::filesystem::create_directories(dir);
  write_text(dir / "metrics.json", out);
  write_text(dir / "config.resolved", s.serialize());
}

}  // namespace

PipelineConfig pipeline_config(const Settings& s) {
  PipelineConfig c;
  c.mode = parse_mode(s.get("mode"));
  c.encoder = parse_encoder(s.get("encoder"));
  c.active_fields = parse_fields(s.get_list("fields"));
  c.siren.hidden_dim = s.get_count("hidden_dim");
  c.siren.n_hidden_layers = s.get_count("n_layers");
  c.siren.omega0_first = s.get_double("omega0_first");
  c.siren.omega0_hidden = s.get_double("omega0_hidden");
  c.siren.seed = static_cast<std::uint64_t>(s.get_count("seed"));
  TrainConfig t;
  t.lr = s.get_double("lr");
  t.beta1 = s.get_double("beta1");
  t.beta2 = s.get_double("beta2");
  t.epsilon = s.get_double("epsilon");
  t.patience = s.get_count("patience");
  t.max_epochs = s.get_count("max_epochs");
  t.min_rel_improvement = s.get_double("min_rel_improvement");
  t.batch_size = s.get_count("batch_size");
  t.seed = c.siren.seed;
  t.validate();
  c.pretrain = t;
  c.retrain = t;
  return c;
}

SynthSpec synth_spec(const Settings& s) {
  SynthSpec spec;
  spec.length_train = s.get_count("synth_train");
  spec.length_test = s.get_count("synth_test");
  spec.d = s.get_count("synth_d");
  spec.noise_sigma = s.get_double("synth_noise");
  spec.magnitude = s.get_double("synth_magnitude");
  spec.n_segments = s.get_count("synth_segments");
  spec.min_segment_length = s.get_count("synth_min_len");
  spec.max_segment_length = s.get_count("synth_max_len");
  spec.seed = static_cast<std::uint64_t>(s.get_count("synth_seed"));
  spec.start = parse_timestamp(s.get("start"));
  spec.interval_seconds = s.get_int("interval");
  spec.validate();
  return spec;
}

std::vector<EntityData> load_datasets(const Settings& s) {
  const CsvOptions opt = csv_options(s);
  std::vector<EntityData> out;
  if (s.has_value("test")) {
    const std::filesystem::path test = s.get("test");
    std::optional<std::filesystem::path> labels;
    if (s.has_value("labels")) labels = s.get("labels");
    const std::string name = test.parent_path().filename().string().empty()
                                 ? test.stem().string()
                                 : test.parent_path().filename().string();
    if (s.has_value("train")) {
      auto b = load_csv(s.get("train"), test, labels, opt);
      out.push_back({name, std::move(b.train), std::move(b.test)});
    } else {
      TimeSeries t = load_series_csv(test, opt, opt.synthetic_start);
      if (labels) t.labels = load_labels(*labels);
      t.validate();
      out.push_back({name, std::nullopt, std::move(t)});
    }
  } else if (s.has_value("train")) {
    throw ConfigError("train is set without test");
  } else if (s.has_value("root")) {
    const std::filesystem::path root = s.get("root");
    const auto names = list_entities(root);
    if (names.empty()) {
      throw EmptyInputError("no entity directories with train.csv and test.csv under " +
                            root.string());
    }
    for (const auto& n : names) {
      auto b = load_entity(root, n, opt);
      out.push_back({n, std::move(b.train), std::move(b.test)});
    }
  } else {
    auto data = generate_synthetic(synth_spec(s));
    out.push_back({"synthetic", std::move(data.bundle.train), std::move(data.bundle.test)});
  }
  for (auto& e : out) {
    if (e.train) e.train->entity_id = e.name;
    e.test.entity_id = e.name;
  }
  return out;
}

std::vector<EntityOutcome> run_entities(const Settings& s, const std::vector<EntityData>& data) {
  const PipelineConfig cfg = pipeline_config(s);
  const int jobs = static_cast<int>(std::max<std::size_t>(1, s.get_count("jobs")));
  if (data.size() == 1) {
    // One entity: the worker budget goes to the kernels instead.
    kernels::set_num_threads(jobs);
    return {run_one(s, cfg, data[0])};
  }
  std::vector<std::optional<EntityOutcome>> slots(data.size());
  std::vector<std::exception_ptr> errors(data.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    kernels::set_num_threads(1);
    for (std::size_t i = next++; i < data.size(); i = next++) {
      try {
        slots[i] = run_one(s, cfg, data[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), data.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  // Report the first failing entity in name order, independent of scheduling.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<EntityOutcome> out;
  for (auto& o : slots) out.push_back(std::move(*o));
  return out;
}

std::vector<BenchRow> encoder_bench(const Settings& s, const EntityData& data) {
  PipelineConfig base = pipeline_config(s);
  for (TrainConfig* t : {&base.pretrain, &base.retrain}) {
    t->target_loss = s.get_double("bench_target_loss");
    t->stop_at_target = true;
    t->max_epochs = s.get_count("bench_max_epochs");
    t->validate();
  }
  std::vector<BenchRow> rows;
  for (EncoderKind kind : {EncoderKind::kTemporal, EncoderKind::kVanilla, EncoderKind::kVanillaStar}) {
    PipelineConfig cfg = base;
    cfg.encoder = kind;
    const auto r = detect_pipeline(data.train ? &*data.train : nullptr, data.test, cfg);
    BenchRow row;
    row.encoder = kind;
    bool converged = r.retrain.epochs_to_target.has_value();
    row.retrain_epochs = r.retrain.epochs_to_target.value_or(r.retrain.stopping_epoch);
    row.retrain_loss = r.retrain.best_loss;
    row.seconds = r.retrain.seconds_to_target.value_or(r.retrain.total_seconds);
    if (r.pretrain) {
      converged = converged && r.pretrain->epochs_to_target.has_value();
      row.pretrain_epochs = r.pretrain->epochs_to_target.value_or(r.pretrain->stopping_epoch);
      row.pretrain_loss = r.pretrain->best_loss;
      row.seconds += r.pretrain->seconds_to_target.value_or(r.pretrain->total_seconds);
    }
    row.total_epochs = row.pretrain_epochs + row.retrain_epochs;
    row.converged = converged;
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> default_grid(const std::string& param) {
  if (param == "patience") return {"30", "60", "90", "120", "150"};
  if (param == "hidden_dim") return {"32", "64", "128", "256", "512"};
  if (param == "omega0_first") return {"30", "300", "3000", "30000", "300000"};
  if (param == "n_layers") return {"1", "2", "3", "4", "5"};
  throw ConfigError("cannot sweep '" + param + "'; choose patience, hidden_dim, omega0_first or n_layers");
}

std::vector<SweepRow> sweep(const Settings& s, const EntityData& data) {
  if (!data.test.labels) throw ConfigError("sweep needs test labels");
  const auto params = s.get_list("sweep_param");
  if (params.empty()) throw ConfigError("setting sweep_param is empty");
  const auto values = s.get_list("sweep_values");
  if (!values.empty() && params.size() != 1) {
    throw ConfigError("sweep_values needs exactly one sweep_param");
  }
  std::map<std::string, SweepRow> cache;
  std::vector<SweepRow> rows;
  for (const auto& param : params) {
    if (std::find(kSweepParams.begin(), kSweepParams.end(), param) == kSweepParams.end()) {
      throw ConfigError("cannot sweep '" + param +
                        "'; choose patience, hidden_dim, omega0_first or n_layers");
    }
    const auto grid = values.empty() ? default_grid(param) : values;
    for (const auto& v : grid) {
      Settings point = s;
      point.set(param, v);
      point.set("sweep_param", "");
      point.set("sweep_values", "");
      const std::string key = point.serialize();
      auto it = cache.find(key);
      if (it == cache.end()) {
        const auto o = run_one(point, pipeline_config(point), data);
        SweepRow row;
        row.eval = *o.eval;
        row.pretrain_epochs = o.result.pretrain ? o.result.pretrain->stopping_epoch : 0;
        row.retrain_epochs = o.result.retrain.stopping_epoch;
        it = cache.emplace(key, row).first;
      }
      SweepRow row = it->second;
      row.param = param;
      row.value = v;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

int write_run(const Settings& s, std::ostream& out) {
  const auto data = load_datasets(s);
  const auto outcomes = run_entities(s, data);
  const std::filesystem::path dir = s.get("out");
  // Entity roots always get one sub-directory per entity plus the aggregate.
  const bool nested = !s.has_value("test") && s.has_value("root");
  if (!nested) {
    write_entity(s, data[0], outcomes[0], dir);
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) write_entity(s, data[i], outcomes[i], dir / data[i].name);
    write_aggregate(s, outcomes, dir);
  }
  for (const auto& o : outcomes) {
    out << o.name << ": ";
    if (o.eval) {
      out << "f1 " << format_double(o.eval->f1) << " precision " << format_double(o.eval->precision)
          << " recall " << format_double(o.eval->recall);
    } else {
      out << "scored " << o.result.scores.size() << " rows (no labels)";
    }
    out << "\n";
  }
  out << "wrote " << dir.string() << "\n";
  return kExitOk;
}

int write_bench(const Settings& s, std::ostream& out) {
  const auto data = load_datasets(s);
  if (data.size() != 1) throw ConfigError("encoder-bench runs on exactly one entity");
  kernels::set_num_threads(static_cast<int>(std::max<std::size_t>(1, s.get_count("jobs"))));
  const auto rows = encoder_bench(s, data[0]);
  const std::filesystem::path dir = s.get("out");
  std::filesystem::create_directories(dir);
  std::string csv =
      "encoder,pretrain_epochs,retrain_epochs,total_epochs,seconds,pretrain_loss,retrain_loss,"
      "converged\n";
  std::vector<std::string> labels;
  std::vector<double> seconds;
  for (const auto& r : rows) {
    const std::string name(encoder_name(r.encoder));
    csv += name + "," + std::to_string(r.pretrain_epochs) + "," + std::to_string(r.retrain_epochs) +
           "," + std::to_string(r.total_epochs) + "," + format_double(r.seconds) + "," +
           format_double(r.pretrain_loss) + "," + format_double(r.retrain_loss) + "," +
           (r.converged ? "true" : "false") + "\n";
    out << name << ": " << r.total_epochs << " epochs, " << format_double(r.seconds) << " s"
        << (r.converged ? "" : " (target not reached)") << "\n";
    labels.push_back(name);
    seconds.push_back(r.seconds);
  }
  write_text(dir / "encoder_bench.csv", csv);
  write_text(dir / "config.resolved", s.serialize());
  if (s.get_bool("plot")) {
    svg::write_bar_plot("Convergence time by encoder", "seconds", labels, seconds,
                        dir / "encoder_bench.svg");
  }
  return kExitOk;
}

int write_sweep(const Settings& s, std::ostream& out) {
  const auto data = load_datasets(s);
  if (data.size() != 1) throw ConfigError("sweep runs on exactly one entity");
  kernels::set_num_threads(static_cast<int>(std::max<std::size_t>(1, s.get_count("jobs"))));
  const auto rows = sweep(s, data[0]);
  const std::filesystem::path dir = s.get("out");
  std::filesystem::create_directories(dir);
  std::string csv = "param,value,f1,precision,recall,threshold,pretrain_epochs,retrain_epochs\n";
  for (const auto& r : rows) {
    csv += r.param + "," + r.value + "," + format_double(r.eval.f1) + "," +
           format_double(r.eval.precision) + "," + format_double(r.eval.recall) + "," +
           threshold_text(r.eval.threshold) + "," + std::to_string(r.pretrain_epochs) + "," +
           std::to_string(r.retrain_epochs) + "\n";
    out << r.param << " = " << r.value << ": f1 " << format_double(r.eval.f1) << "\n";
  }
  write_text(dir / "sweep.csv", csv);
  write_text(dir / "config.resolved", s.serialize());
  if (s.get_bool("plot")) {
    for (const auto& param : s.get_list("sweep_param")) {
      std::vector<std::string> labels;
      std::vector<double> f1;
      for (const auto& r : rows) {
        if (r.param != param) continue;
        labels.push_back(r.value);
        f1.push_back(r.eval.f1);
      }
      svg::write_bar_plot("Best F1 by " + param, "F1", labels, f1, dir / ("sweep_" + param + ".svg"));
    }
  }
  return kExitOk;
}

int write_synth(const Settings& s, std::ostream& out) {
  const auto data = generate_synthetic(synth_spec(s));
  const std::filesystem::path dir = s.get("out");
  save_dataset(data, dir);
  write_text(dir / "config.resolved", s.serialize());
  out << "wrote " << data.anomalies.size() << " anomaly segments to " << dir.string() << "\n";
  return kExitOk;
}

int write_stats(const Settings& s, std::ostream& out) {
  const auto data = load_datasets(s);
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %8s %8s %4s %10s %10s %8s\n", "entity", "train", "test",
                "d", "anomalies", "anomaly%", "segments");
  out << line;
  for (const auto& e : data) {
    DatasetBundle b;
    if (e.train) b.train = *e.train;
    b.test = e.test;
    const auto st = dataset_stats(b);
    std::snprintf(line, sizeof line, "%-20s %8zu %8zu %4zu %10zu %10.2f %8zu\n", e.name.c_str(),
                  st.train_length, st.test_length, st.d, st.anomalies, st.anomaly_percent,
                  st.segments);
    out << line;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-series anomaly detection with sine-activated implicit representations"};
  app.require_subcommand(1);
  struct Command {
    CLI::App* app;
    int (*body)(const Settings&, std::ostream&);
  };
  const std::pair<const char*, const char*> names[] = {
      {"run", "train, score and evaluate every entity"},
      {"encoder-bench", "compare convergence of the three encoders"},
      {"sweep", "best F1 over a hyperparameter grid"},
      {"synth", "write a synthetic dataset"},
      {"stats", "summarize a dataset"},
  };
  int (*const bodies[])(const Settings&, std::ostream&) = {write_run, write_bench, write_sweep,
                                                           write_synth, write_stats};
  const auto& table = keys();
  std::vector<std::string> values(table.size());
  bool plot = false;
  std::string config;
  std::vector<Command> commands;
  std::vector<std::vector<CLI::Option*>> options;
  for (std::size_t c = 0; c < std::size(names); ++c) {
    CLI::App* sub = app.add_subcommand(names[c].first, names[c].second);
    sub->add_option("--config", config, "flat key = value settings file");
    std::vector<CLI::Option*> opts;
    for (std::size_t k = 0; k < table.size(); ++k) {
      std::string flag = "--" + table[k].name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      const std::string help = table[k].help + " (default: " +
                               (table[k].default_value.empty() ? "unset" : table[k].default_value) + ")";
      opts.push_back(table[k].name == "plot" ? sub->add_flag(flag, plot, help)
                                             : sub->add_option(flag, values[k], help));
    }
    commands.push_back({sub, bodies[c]});
    options.push_back(std::move(opts));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (std::size_t c = 0; c < commands.size(); ++c) {
    if (!commands[c].app->parsed()) continue;
    try {
      std::map<std::string, std::string> flags;
      for (std::size_t k = 0; k < table.size(); ++k) {
        if (options[c][k]->count() == 0) continue;
        flags[table[k].name] = table[k].name == "plot" ? (plot ? "true" : "false") : values[k];
      }
      const Settings s = resolve_settings(
          config.empty() ? std::nullopt : std::optional<std::filesystem::path>(config), flags);
      return commands[c].body(s, out);
    } catch (const TrainingError& e) {
      err << "error: training failed: " << e.what() << "\n";
      return kExitNumeric;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      switch (e.error_class()) {
        case ErrorClass::kInput: return kExitInput;
        case ErrorClass::kNumeric: return kExitNumeric;
        case ErrorClass::kContract: return kExitInternal;
      }
      return kExitInternal;
    } catch (const std::filesystem::filesystem_error& e) {
      err << "error: " << e.what() << "\n";
      return kExitInput;
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << "\n";
      return kExitInternal;
    }
  }
  return kExitUsage;
}
}  // namespace inrad::cli
