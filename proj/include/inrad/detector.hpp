#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "inrad/encodings.hpp"
#include "inrad/matrix.hpp"
#include "inrad/siren.hpp"

namespace inrad {

// One 0/1 entry per timestamp; 1 marks an anomaly.
using Labels = std::vector<std::uint8_t>;
// Per-timestamp anomaly scores aligned to the test rows.
using ScoreSeries = std::vector<double>;

// l1 norm of each row of (values - predictions).
ScoreSeries residual_scores(const Matrix& predictions, const Matrix& values);
ScoreSeries score(const SirenModel& model, const EncodedCoords& coords, const Matrix& values);

// 1 where score > tau.
Labels threshold_detect(std::span<const double> scores, double tau);

// Every maximal run of label 1 that contains a detection is filled with 1s.
Labels point_adjust(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// Pointwise counts. P = 0 without positive predictions, R = 0 without positive
// labels, F1 = 0 when P + R = 0.
Prf1 prf1(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels);

struct EvalResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;  // -infinity when flagging everything is best
  Labels predictions;      // point-adjusted
};

struct BestF1Options {
  // 0 evaluates every distinct score. Otherwise at most this many evenly
  // ranked distinct scores (plus -infinity) are tried.
  std::size_t max_candidates = 0;
};

// Tries -infinity and every distinct score as tau, applying threshold_detect,
// point_adjust and prf1, and keeps the best F1. Ties go to the smaller tau.
EvalResult best_f1_search(std::span<const double> scores, std::span<const std::uint8_t> labels,
                          const BestF1Options& options = {});

// Maximal runs of label 1 as [begin, end) index pairs.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const noexcept { return end - begin; }
  bool operator==(const Segment&) const = default;
};
std::vector<Segment> label_segments(std::span<const std::uint8_t> labels);

}  // namespace inrad
