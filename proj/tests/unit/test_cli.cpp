#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "inrad/errors.hpp"

using namespace inrad;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("inrad_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "inrad");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Small enough to train in well under a second.
std::vector<std::string> small(std::vector<std::string> args) {
  for (const char* a : {"--synth-train", "300", "--synth-test", "300", "--synth-min-len", "5",
                        "--synth-max-len", "10", "--hidden-dim", "32", "--max-epochs", "60",
                        "--omega0-first", "300"}) {
    args.emplace_back(a);
  }
  return args;
}

}  // namespace

TEST_CASE("run writes every output and is byte-deterministic") {
  TempDir dir("determinism");
  const auto a = invoke(small({"run", "--out", (dir.path / "a").string(), "--plot"}));
  REQUIRE_MESSAGE(a.code == cli::kExitOk, a.err);
  const auto b = invoke(small({"run", "--out", (dir.path / "b").string()}));
  REQUIRE(b.code == cli::kExitOk);
  for (const char* f : {"scores.csv", "metrics.json", "train_report.json", "config.resolved",
                        "pretrain_loss.csv", "retrain_loss.csv", "scores.svg", "loss.svg"}) {
    CHECK_MESSAGE(fs::exists(dir.path / "a" / f), f);
  }
  CHECK(slurp(dir.path / "a" / "metrics.json") == slurp(dir.path / "b" / "metrics.json"));
  CHECK(slurp(dir.path / "a" / "scores.csv") == slurp(dir.path / "b" / "scores.csv"));
  CHECK(slurp(dir.path / "a" / "scores.csv").rfind("timestamp,score\n", 0) == 0);

  // The resolved config alone reproduces the run.
  const auto c = invoke({"run", "--config", (dir.path / "b" / "config.resolved").string(), "--out",
                      (dir.path / "c").string()});
  REQUIRE(c.code == cli::kExitOk);
  CHECK(slurp(dir.path / "c" / "metrics.json") == slurp(dir.path / "b" / "metrics.json"));
}

TEST_CASE("defaults carry the reference hyperparameters") {
  const auto s = cli::Settings::defaults();
  const auto cfg = cli::pipeline_config(s);
  CHECK(cfg.mode == DetectMode::kWarmStart);
  CHECK(cfg.encoder == EncoderKind::kTemporal);
  CHECK(cfg.siren.n_hidden_layers == 3);
  CHECK(cfg.siren.hidden_dim == 256);
  CHECK(cfg.siren.omega0_first == 3000.0);
  CHECK(cfg.siren.omega0_hidden == 30.0);
  CHECK(cfg.pretrain.lr == 1e-4);
  CHECK(cfg.pretrain.beta1 == 0.9);
  CHECK(cfg.pretrain.beta2 == 0.99);
  CHECK(cfg.pretrain.patience == 30);
  CHECK(cfg.retrain.patience == 30);

  auto cold = s;
  cold.set("mode", "cold_start");
  cold.set("encoder", "vanilla");
  const auto cc = cli::pipeline_config(cold);
  CHECK(cc.mode == DetectMode::kColdStart);
  CHECK(cc.encoder == EncoderKind::kVanilla);

  auto bad = s;
  bad.set("fields", "year,week");
  CHECK_THROWS_AS(cli::pipeline_config(bad), ConfigError);
  bad = s;
  bad.set("hidden_dim", "-3");
  CHECK_THROWS_AS(cli::pipeline_config(bad), ConfigError);
  CHECK_THROWS_AS(bad.set("nonsense", "1"), ConfigError);
}

TEST_CASE("settings precedence: defaults, INRAD_SEED, config file, flags") {
  TempDir dir("precedence");
  const fs::path cfg = dir.path / "c.conf";
  std::ofstream(cfg) << "# comment\nseed = 3\nhidden_dim = 64   # trailing comment\n\n";

  ::unsetenv("INRAD_SEED");
  CHECK(cli::resolve_settings(std::nullopt, {}).get("seed") == "0");
  ::setenv("INRAD_SEED", "7", 1);
  CHECK(cli::resolve_settings(std::nullopt, {}).get("seed") == "7");
  const auto from_file = cli::resolve_settings(cfg, {});
  CHECK(from_file.get("seed") == "3");
  CHECK(from_file.get("hidden_dim") == "64");
  const auto from_flag = cli::resolve_settings(cfg, {{"seed", "5"}});
  CHECK(from_flag.get("seed") == "5");
  CHECK(from_flag.get("hidden_dim") == "64");
  ::unsetenv("INRAD_SEED");

  // Serialized settings parse back to themselves.
  auto round = cli::Settings::defaults();
  cli::apply_config_text(round, from_flag.serialize(), "serialized");
  CHECK(round.serialize() == from_flag.serialize());

  std::ofstream(dir.path / "bad.conf") << "seed = 1\nwidth = 3\n";
  try {
    cli::resolve_settings(dir.path / "bad.conf", {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.conf:2") != std::string::npos);
  }
  std::ofstream(dir.path / "noeq.conf") << "seed 1\n";
  CHECK_THROWS_AS(cli::resolve_settings(dir.path / "noeq.conf", {}), ConfigError);
}

TEST_CASE("exit codes separate usage, input and numeric failures") {
  TempDir dir("codes");
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"run", "--bogus"}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
  CHECK(invoke({"run", "--test", (dir.path / "missing.csv").string()}).code == cli::kExitInput);
  CHECK(invoke({"run", "--mode", "lukewarm"}).code == cli::kExitInput);
  CHECK(invoke({"run", "--config", (dir.path / "none.conf").string()}).code == cli::kExitInput);
  CHECK(invoke({"run", "--seed", "abc"}).code == cli::kExitInput);
  const auto diverged = invoke(small({"run", "--lr", "1e308", "--out", (dir.path / "x").string()}));
  CHECK(diverged.code == cli::kExitNumeric);
  CHECK(diverged.err.find("training failed") != std::string::npos);
}

TEST_CASE("synth output feeds run without edits") {
  TempDir dir("roundtrip");
  const fs::path ds = dir.path / "root" / "machine-1";
  REQUIRE(invoke(small({"synth", "--out", ds.string()})).code == cli::kExitOk);
  for (const char* f : {"train.csv", "test.csv", "test_label.csv", "anomalies.csv"}) {
    CHECK(fs::exists(ds / f));
  }

  REQUIRE(invoke(small({"run", "--out", (dir.path / "mem").string()})).code == cli::kExitOk);
  const auto files = invoke(small({"run", "--train", (ds / "train.csv").string(), "--test",
                                (ds / "test.csv").string(), "--labels",
                                (ds / "test_label.csv").string(), "--out",
                                (dir.path / "files").string()}));
  REQUIRE_MESSAGE(files.code == cli::kExitOk, files.err);
  CHECK(slurp(dir.path / "files" / "metrics.json") == slurp(dir.path / "mem" / "metrics.json"));
  CHECK(slurp(dir.path / "files" / "scores.csv") == slurp(dir.path / "mem" / "scores.csv"));

  const auto root = invoke(small({"run", "--root", (dir.path / "root").string(), "--out",
                               (dir.path / "rootrun").string()}));
  REQUIRE_MESSAGE(root.code == cli::kExitOk, root.err);
  CHECK(slurp(dir.path / "rootrun" / "machine-1" / "scores.csv") ==
        slurp(dir.path / "mem" / "scores.csv"));
  CHECK(fs::exists(dir.path / "rootrun" / "metrics.json"));

  // Cold start reads only the test split.
  const auto cold = invoke(small({"run", "--mode", "cold_start", "--encoder", "vanilla", "--test",
                               (ds / "test.csv").string(), "--labels",
                               (ds / "test_label.csv").string(), "--out",
                               (dir.path / "cold").string()}));
  REQUIRE_MESSAGE(cold.code == cli::kExitOk, cold.err);
  CHECK_FALSE(fs::exists(dir.path / "cold" / "pretrain_loss.csv"));
  CHECK(slurp(dir.path / "cold" / "metrics.json").find("\"mode\": \"cold_start\"") !=
        std::string::npos);
}

TEST_CASE("entity workers do not change results") {
  TempDir dir("jobs");
  for (const char* e : {"a", "b", "c"}) {
    const auto r = invoke(small({"synth", "--out", (dir.path / "root" / e).string(),
                                 "--synth-seed", std::to_string(e[0])}));
    REQUIRE(r.code == cli::kExitOk);
  }
  const auto one = invoke(small({"run", "--root", (dir.path / "root").string(), "--jobs", "1",
                              "--out", (dir.path / "j1").string()}));
  const auto three = invoke(small({"run", "--root", (dir.path / "root").string(), "--jobs", "3",
                                "--out", (dir.path / "j3").string()}));
  REQUIRE(one.code == cli::kExitOk);
  REQUIRE(three.code == cli::kExitOk);
  for (const char* e : {"a", "b", "c"}) {
    CHECK(slurp(dir.path / "j1" / e / "scores.csv") == slurp(dir.path / "j3" / e / "scores.csv"));
  }
  CHECK(slurp(dir.path / "j1" / "metrics.json") == slurp(dir.path / "j3" / "metrics.json"));
}

TEST_CASE("stats") {
  TempDir dir("stats");
  const auto st = invoke({"stats", "--synth-min-len", "20", "--synth-max-len", "20"});
  REQUIRE(st.code == cli::kExitOk);
  // Three segments of 20 rows in 2000 test rows.
  CHECK(st.out.find("synthetic") != std::string::npos);
  CHECK(st.out.find(" 60 ") != std::string::npos);
  CHECK(st.out.find("3.00") != std::string::npos);

  const auto empty = invoke({"stats", "--root", dir.path.string()});
  CHECK(empty.code == cli::kExitInput);
  CHECK(empty.err.find("no entity directories") != std::string::npos);
}

TEST_CASE("encoder bench reports one row per encoder") {
  TempDir dir("bench");
  const auto r = invoke(small({"encoder-bench", "--bench-target-loss", "0.05", "--bench-max-epochs",
                            "40", "--out", dir.path.string(), "--plot"}));
  REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
  std::istringstream csv(slurp(dir.path / "encoder_bench.csv"));
  std::string line;
  std::vector<std::string> rows;
  std::getline(csv, line);
  while (std::getline(csv, line)) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("temporal,", 0) == 0);
  CHECK(rows[1].rfind("vanilla,", 0) == 0);
  CHECK(rows[2].rfind("vanilla_star,", 0) == 0);
  CHECK(fs::exists(dir.path / "encoder_bench.svg"));

  // Each row either reached the target or says it did not.
  const auto data = cli::load_datasets([] {
    auto s = cli::Settings::defaults();
    for (auto [k, v] : {std::pair{"synth_train", "300"}, {"synth_test", "300"},
                        {"synth_min_len", "5"}, {"synth_max_len", "10"}}) {
      s.set(k, v);
    }
    return s;
  }());
  auto s = cli::Settings::defaults();
  s.set("hidden_dim", "32");
  s.set("omega0_first", "300");
  s.set("bench_target_loss", "0.05");
  s.set("bench_max_epochs", "40");
  for (const auto& row : cli::encoder_bench(s, data[0])) {
    CHECK(row.total_epochs == row.pretrain_epochs + row.retrain_epochs);
    if (row.converged) {
      CHECK(row.pretrain_loss <= 0.05);
      CHECK(row.retrain_loss <= 0.05);
    } else {
      CHECK(row.total_epochs <= 80);
    }
  }
}

TEST_CASE("sweep") {
  TempDir dir("sweep");
  CHECK(cli::default_grid("patience") == std::vector<std::string>{"30", "60", "90", "120", "150"});
  CHECK(cli::default_grid("hidden_dim") ==
        std::vector<std::string>{"32", "64", "128", "256", "512"});
  CHECK(cli::default_grid("omega0_first") ==
        std::vector<std::string>{"30", "300", "3000", "30000", "300000"});
  CHECK(cli::default_grid("n_layers") == std::vector<std::string>{"1", "2", "3", "4", "5"});
  CHECK_THROWS_AS(cli::default_grid("lr"), ConfigError);

  // A one-point grid is the plain run.
  const auto one = invoke(small({"sweep", "--sweep-param", "patience", "--sweep-values", "30", "--out",
                              (dir.path / "one").string()}));
  REQUIRE_MESSAGE(one.code == cli::kExitOk, one.err);
  REQUIRE(invoke(small({"run", "--out", (dir.path / "run").string()})).code == cli::kExitOk);
  const std::string metrics = slurp(dir.path / "run" / "metrics.json");
  std::istringstream csv(slurp(dir.path / "one" / "sweep.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  const auto f1_field = row.substr(12, row.find(',', 12) - 12);  // after "patience,30,"
  CHECK(metrics.find("\"f1\": " + f1_field + ",") != std::string::npos);

  const auto grid = invoke(small({"sweep", "--sweep-param", "n_layers", "--sweep-values", "1,2,2",
                               "--out", (dir.path / "grid").string(), "--plot"}));
  REQUIRE_MESSAGE(grid.code == cli::kExitOk, grid.err);
  std::istringstream g(slurp(dir.path / "grid" / "sweep.csv"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(g, l);) lines.push_back(l);
  CHECK(lines.size() == 4);
  CHECK(lines[2] == lines[3]);
  CHECK(fs::exists(dir.path / "grid" / "sweep_n_layers.svg"));

  CHECK(invoke(small({"sweep", "--sweep-param", "lr", "--out", dir.path.string()})).code ==
        cli::kExitInput);
}
