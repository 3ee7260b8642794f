#pragma once

#include <span>
#include <vector>

#include "inrad/matrix.hpp"

namespace inrad {

// Batch convention: rows are samples. Weights are (out x in), so a layer
// computes z = input * W^T + b.

struct AffineCache {
  Matrix input;
  Matrix weights;
  bool valid = false;
};

struct SineCache {
  AffineCache affine;
  Matrix preactivation;  // z, before the sine
  double omega0 = 0.0;
};

struct LayerGrads {
  Matrix input;  // empty when not requested
  Matrix weights;
  std::vector<double> bias;
};

struct SineForward {
  Matrix output;
  SineCache cache;
};

struct LinearForward {
  Matrix output;
  AffineCache cache;
};

// output = sin(omega0 * (input * W^T + b))
SineForward sine_layer_forward(Matrix input, const Matrix& weights, std::span<const double> bias,
                               double omega0);
LayerGrads sine_layer_backward(const SineCache& cache, const Matrix& upstream_grad,
                               bool want_input_grad = true);

// output = input * W^T + b
LinearForward linear_layer_forward(Matrix input, const Matrix& weights,
                                   std::span<const double> bias);
LayerGrads linear_layer_backward(const AffineCache& cache, const Matrix& upstream_grad,
                                 bool want_input_grad = true);

}  // namespace inrad
