#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inrad/adam.hpp"
#include "inrad/data_io.hpp"
#include "inrad/detector.hpp"
#include "inrad/encodings.hpp"
#include "inrad/siren.hpp"

namespace inrad {

struct TrainConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  std::size_t patience = 30;
  std::size_t max_epochs = 10000;
  double min_rel_improvement = 1e-6;
  // 0 trains full-batch: one Adam step per epoch over every timestamp.
  std::size_t batch_size = 0;
  // When set, the report records the first epoch whose loss reaches it.
  std::optional<double> target_loss;
  bool stop_at_target = false;
  std::uint64_t seed = 0;

  void validate() const;
  AdamConfig adam() const { return {lr, beta1, beta2, epsilon}; }
};

// Patience counter on a monitored loss. An epoch improves when its loss is
// below best * (1 - min_rel_improvement); the first epoch always improves.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t patience, double min_rel_improvement)
      : patience_(patience), min_rel_(min_rel_improvement) {}

  // Returns true when this loss became the new best.
  bool observe(double loss);
  bool should_stop() const noexcept { return stale_ >= patience_; }
  double best() const noexcept { return best_; }
  std::size_t stale_epochs() const noexcept { return stale_; }

 private:
  std::size_t patience_;
  double min_rel_;
  double best_ = 0.0;
  bool seen_ = false;
  std::size_t stale_ = 0;
};

struct TrainReport {
  std::vector<double> loss_trace;
  std::size_t stopping_epoch = 0;
  std::size_t best_epoch = 0;  // 1-based
  double best_loss = 0.0;
  bool hit_max_epochs = false;
  std::optional<std::size_t> epochs_to_target;
  std::optional<double> seconds_to_target;
  double seconds_per_epoch = 0.0;
  double total_seconds = 0.0;
};

// Adam epochs on the representation loss with early stopping. The model is
// left at the parameters of the best epoch. Throws TrainingError if the loss
// stops being finite.
TrainReport fit(SirenModel& model, const EncodedCoords& coords, const Matrix& targets,
                const TrainConfig& cfg);

enum class DetectMode { kWarmStart, kColdStart };
std::string mode_name(DetectMode mode);
DetectMode parse_mode(std::string_view name);

struct PipelineConfig {
  DetectMode mode = DetectMode::kWarmStart;
  EncoderKind encoder = EncoderKind::kTemporal;
  std::array<bool, kTimeFieldCount> active_fields{true, true, true, true, true, true};
  SirenConfig siren;  // input/output dims are filled in from the data
  TrainConfig pretrain;
  TrainConfig retrain;
};

struct PipelineResult {
  SirenModel model;
  ScoreSeries scores;
  ScalingStats stats;
  std::optional<TrainReport> pretrain;
  TrainReport retrain;
  SplitCoords coords;
};

// warm start: fit on the scaled train split, then keep fitting the same
// parameters on the test split with a fresh optimizer. cold start: fit
// directly on the test split; the train split is not read. Scores are l1
// residuals on the test split in scaled units.
PipelineResult detect_pipeline(const TimeSeries* train, const TimeSeries& test,
                               const PipelineConfig& cfg);

}  // namespace inrad
