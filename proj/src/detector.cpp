#include "inrad/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "inrad/errors.hpp"

namespace inrad {
namespace {

void check_lengths(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw ShapeError(std::string(op) + ": length mismatch " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

void check_binary(std::span<const std::uint8_t> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 1) throw FormatError(std::string(what) + " must be 0/1 (index " + std::to_string(i) + ")");
  }
}

// F1 = 2 tp / (2 tp + fp + fn) as an exact fraction for tie-safe comparison.
struct F1Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static F1Fraction of(std::size_t tp, std::size_t fp, std::size_t fn) {
    const std::uint64_t den = 2 * tp + fp + fn;
    if (tp == 0 || den == 0) return {0, 1};
    return {2 * static_cast<std::uint64_t>(tp), den};
  }
  bool greater_than(const F1Fraction& o) const {
    return static_cast<unsigned __int128>(num) * o.den >
           static_cast<unsigned __int128>(o.num) * den;
  }
  bool equals(const F1Fraction& o) const {
    return static_cast<unsigned __int128>(num) * o.den ==
           static_cast<unsigned __int128>(o.num) * den;
  }
};

}  // namespace

ScoreSeries residual_scores(const Matrix& predictions, const Matrix& values) {
  if (predictions.rows() != values.rows() || predictions.cols() != values.cols()) {
    throw ShapeError("score: predictions " + predictions.shape_string() + " vs values " +
                     values.shape_string());
  }
  ScoreSeries out(values.rows(), 0.0);
  for (std::size_t i = 0; i < values.rows(); ++i) {
    const auto x = values.row(i);
    const auto f = predictions.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += std::abs(x[j] - f[j]);
    out[i] = s;
  }
  require_finite(out, "anomaly scores");
  return out;
}

ScoreSeries score(const SirenModel& model, const EncodedCoords& coords, const Matrix& values) {
  if (coords.n() != values.rows()) {
    throw ShapeError("score: " + std::to_string(coords.n()) + " coordinates vs " +
                     std::to_string(values.rows()) + " value rows");
  }
  return residual_scores(model.forward(coords), values);
}

Labels threshold_detect(std::span<const double> scores, double tau) {
  Labels out(scores.size(), 0);
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > tau ? 1 : 0;
  return out;
}

std::vector<Segment> label_segments(std::span<const std::uint8_t> labels) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == 0) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < labels.size() && labels[i] != 0) ++i;
    out.push_back({begin, i});
  }
  return out;
}

Labels point_adjust(std::span<const std::uint8_t> predictions,
                    std::span<const std::uint8_t> labels) {
  check_lengths(predictions.size(), labels.size(), "point_adjust");
  check_binary(labels, "labels");
  Labels out(predictions.begin(), predictions.end());
  for (const auto& seg : label_segments(labels)) {
    const bool hit = std::any_of(predictions.begin() + static_cast<std::ptrdiff_t>(seg.begin),
                                 predictions.begin() + static_cast<std::ptrdiff_t>(seg.end),
                                 [](std::uint8_t p) { return p != 0; });
    if (hit) std::fill(out.begin() + static_cast<std::ptrdiff_t>(seg.begin),
                       out.begin() + static_cast<std::ptrdiff_t>(seg.end), 1);
  }
  return out;
}

Prf1 prf1(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels) {
  check_lengths(predictions.size(), labels.size(), "prf1");
  Prf1 r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool y = labels[i] != 0;
    if (p && y) ++r.tp;
    else if (p) ++r.fp;
    else if (y) ++r.fn;
  }
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

EvalResult best_f1_search(std::span<const double> scores, std::span<const std::uint8_t> labels,
                          const BestF1Options& options) {
  if (scores.empty()) throw EmptyInputError("best_f1_search: empty score series");
  check_lengths(scores.size(), labels.size(), "best_f1_search");
  check_binary(labels, "labels");
  require_finite(scores, "anomaly scores");

  const std::size_t n = scores.size();
  const auto segments = label_segments(labels);
  std::vector<std::ptrdiff_t> segment_of(n, -1);
  std::size_t positives = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    positives += segments[s].length();
    for (std::size_t i = segments[s].begin; i < segments[s].end; ++i) {
      segment_of[i] = static_cast<std::ptrdiff_t>(s);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Distinct scores in descending order.
  std::vector<double> distinct;
  for (std::size_t idx : order) {
    if (distinct.empty() || scores[idx] != distinct.back()) distinct.push_back(scores[idx]);
  }
  const std::size_t u = distinct.size();
  std::vector<bool> evaluate(u, true);
  if (options.max_candidates > 0 && u > options.max_candidates) {
    std::fill(evaluate.begin(), evaluate.end(), false);
    const std::size_t m = std::max<std::size_t>(options.max_candidates, 2);
    for (std::size_t k = 0; k < m; ++k) evaluate[k * (u - 1) / (m - 1)] = true;
  }

  // Sweep tau from the largest distinct score downwards. At tau = distinct[k]
  // the flagged set is every point scoring above it.
  std::vector<bool> detected(segments.size(), false);
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t cursor = 0;
  F1Fraction best{};
  double best_tau = distinct.front();
  bool have_best = false;

  auto consider = [&](double tau) {
    const F1Fraction f = F1Fraction::of(tp, fp, positives - tp);
    // Thresholds arrive in decreasing order, so ties prefer the newcomer.
    if (!have_best || f.greater_than(best) || f.equals(best)) {
      best = f;
      best_tau = tau;
      have_best = true;
    }
  };
  auto flag_group = [&](double value) {
    while (cursor < n && scores[order[cursor]] == value) {
      const std::ptrdiff_t s = segment_of[order[cursor]];
      if (s < 0) {
        ++fp;
      } else if (!detected[static_cast<std::size_t>(s)]) {
        detected[static_cast<std::size_t>(s)] = true;
        tp += segments[static_cast<std::size_t>(s)].length();
      }
      ++cursor;
    }
  };

  for (std::size_t k = 0; k < u; ++k) {
    if (k > 0) flag_group(distinct[k - 1]);
    if (evaluate[k]) consider(distinct[k]);
  }
  flag_group(distinct[u - 1]);
  consider(-std::numeric_limits<double>::infinity());

  EvalResult result;
  result.threshold = best_tau;
  result.predictions = point_adjust(threshold_detect(scores, best_tau), labels);
  const Prf1 m = prf1(result.predictions, labels);
  result.precision = m.precision;
  result.recall = m.recall;
  result.f1 = m.f1;
  return result;
}

}  // namespace inrad
