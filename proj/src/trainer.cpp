#include "inrad/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

#include "inrad/errors.hpp"

namespace inrad {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(m.row(rows[i]).begin(), m.row(rows[i]).end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (min_rel_improvement < 0.0) throw ConfigError("min_rel_improvement must be non-negative");
}

bool EarlyStopping::observe(double loss) {
  if (!seen_ || loss < best_ * (1.0 - min_rel_)) {
    seen_ = true;
    best_ = loss;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

TrainReport fit(SirenModel& model, const EncodedCoords& coords, const Matrix& targets,
                const TrainConfig& cfg) {
  cfg.validate();
  if (coords.n() != targets.rows()) {
    throw ShapeError("fit: " + std::to_string(coords.n()) + " coordinates vs " +
                     std::to_string(targets.rows()) + " target rows");
  }
  if (coords.n() == 0) throw EmptyInputError("fit: no timestamps to fit");

  const auto t0 = Clock::now();
  AdamState adam(cfg.adam(), model.parameters().sizes());
  EarlyStopping stopper(cfg.patience, cfg.min_rel_improvement);
  ParameterSet best_params = model.parameters();
  TrainReport report;

  const bool minibatch = cfg.batch_size > 0 && cfg.batch_size < coords.n();
  Rng shuffle_rng(cfg.seed);
  std::vector<std::size_t> order(coords.n());
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Records an epoch's loss; returns true when training should stop before
  // the parameters move again.
  auto record = [&](std::size_t epoch, double loss) {
    report.loss_trace.push_back(loss);
    if (stopper.observe(loss)) {
      best_params = model.parameters();
      report.best_epoch = epoch;
    }
    const bool at_target = cfg.target_loss && loss <= *cfg.target_loss;
    if (at_target && !report.epochs_to_target) {
      report.epochs_to_target = epoch;
      report.seconds_to_target = seconds_since(t0);
    }
    if (stopper.should_stop() || (at_target && cfg.stop_at_target)) {
      report.stopping_epoch = epoch;
      return true;
    }
    return false;
  };
  auto evaluate = [&](const EncodedCoords& c, const Matrix& t, std::size_t epoch) {
    try {
      return loss_and_grads(model, c, t);
    } catch (const NumericError& e) {
      throw TrainingError(std::string("training diverged: ") + e.what(), epoch - 1);
    }
  };

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (!minibatch) {
      const LossAndGrads lg = evaluate(coords, targets, epoch);
      if (record(epoch, lg.loss)) break;
      adam.update(model.parameters().views(), lg.grads.views());
    } else {
      // Epoch loss is the mean of the batch losses seen before each step, so
      // the best snapshot is the parameters at the end of that epoch.
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(
                                    shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
      }
      double weighted = 0.0;
      for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
        const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
        const std::span<const std::size_t> rows(order.data() + begin, end - begin);
        const LossAndGrads lg =
            evaluate(EncodedCoords{gather_rows(coords.values, rows)}, gather_rows(targets, rows), epoch);
        weighted += lg.loss * static_cast<double>(rows.size());
        adam.update(model.parameters().views(), lg.grads.views());
      }
      if (record(epoch, weighted / static_cast<double>(order.size()))) break;
    }
    if (epoch == cfg.max_epochs) {
      report.stopping_epoch = epoch;
      report.hit_max_epochs = true;
    }
    if (!model.parameters().weights.empty() &&
        !std::all_of(model.parameters().weights.begin(), model.parameters().weights.end(),
                     [](const Matrix& w) { return w.all_finite(); })) {
      throw TrainingError("training diverged: parameters became non-finite", epoch);
    }
  }

  model.parameters() = std::move(best_params);
  report.best_loss = *std::min_element(report.loss_trace.begin(), report.loss_trace.end());
  report.total_seconds = seconds_since(t0);
  report.seconds_per_epoch =
      report.total_seconds / static_cast<double>(std::max<std::size_t>(1, report.stopping_epoch));
  return report;
}

std::string mode_name(DetectMode mode) {
  return mode == DetectMode::kWarmStart ? "warm_start" : "cold_start";
}

DetectMode parse_mode(std::string_view name) {
  if (name == "warm_start" || name == "warm") return DetectMode::kWarmStart;
  if (name == "cold_start" || name == "cold") return DetectMode::kColdStart;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected warm_start or cold_start)");
}

PipelineResult detect_pipeline(const TimeSeries* train, const TimeSeries& test,
                               const PipelineConfig& cfg) {
  if (test.length() == 0) throw EmptyInputError("test series is empty");
  const bool warm = cfg.mode == DetectMode::kWarmStart;
  if (warm && (train == nullptr || train->length() == 0)) {
    throw EmptyInputError("warm start requires a non-empty train series");
  }
  if (warm && train->dim() != test.dim()) {
    throw SchemaError("train and test feature counts differ");
  }

  PipelineResult result;
  if (warm) {
    result.coords = encode_split(cfg.encoder, std::span<const Timestamp>(train->timestamps),
                                 test.timestamps, cfg.active_fields);
    result.stats = ScalingStats::compute(train->values);
  } else {
    result.coords = encode_split(cfg.encoder, std::nullopt, test.timestamps, cfg.active_fields);
    result.stats = ScalingStats::compute(test.values);
  }

  SirenConfig siren = cfg.siren;
  siren.input_dim = result.coords.test.dim();
  siren.output_dim = test.dim();
  result.model = SirenModel::init(siren);

  const Matrix test_scaled = scale(test.values, result.stats);
  if (warm) {
    const Matrix train_scaled = scale(train->values, result.stats);
    result.pretrain = fit(result.model, result.coords.train, train_scaled, cfg.pretrain);
  }
  result.retrain = fit(result.model, result.coords.test, test_scaled, cfg.retrain);
  result.scores = score(result.model, result.coords.test, test_scaled);
  return result;
}

}  // namespace inrad
