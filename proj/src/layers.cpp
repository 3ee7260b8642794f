#include "inrad/layers.hpp"

#include <cmath>
#include <string>

#include "inrad/errors.hpp"
#include "inrad/kernels.hpp"

namespace inrad {
namespace {

Matrix affine(const Matrix& input, const Matrix& weights, std::span<const double> bias,
              const char* op) {
  if (weights.cols() != input.cols()) {
    throw ShapeError(std::string(op) + ": input " + input.shape_string() +
                     " does not match weights " + weights.shape_string());
  }
  if (bias.size() != weights.rows()) {
    throw ShapeError(std::string(op) + ": bias length " + std::to_string(bias.size()) +
                     " does not match weights " + weights.shape_string());
  }
  Matrix z = kernels::matmul_nt(input, weights);
  kernels::add_row_vector(z, bias);
  return z;
}

void check_cache(const AffineCache& cache, const Matrix& upstream, const char* op) {
  if (!cache.valid) throw ContractError(std::string(op) + ": cache is empty or already consumed");
  if (upstream.rows() != cache.input.rows() || upstream.cols() != cache.weights.rows()) {
    throw ContractError(std::string(op) + ": upstream gradient " + upstream.shape_string() +
                        " does not match cached output " +
                        shape_string(cache.input.rows(), cache.weights.rows()));
  }
}

LayerGrads affine_backward(const AffineCache& cache, const Matrix& grad_z, bool want_input) {
  LayerGrads g;
  g.weights = kernels::matmul_tn(grad_z, cache.input);
  g.bias = kernels::column_sums(grad_z);
  require_finite(g.bias, "bias gradient");
  if (want_input) g.input = kernels::matmul(grad_z, cache.weights);
  return g;
}

}  // namespace

SineForward sine_layer_forward(Matrix input, const Matrix& weights, std::span<const double> bias,
                               double omega0) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw ContractError("sine_layer_forward: omega0 must be positive and finite");
  }
  SineForward out;
  out.cache.preactivation = affine(input, weights, bias, "sine_layer_forward");
  out.output = out.cache.preactivation;
  kernels::sin_scaled_inplace(out.output, omega0);
  out.cache.omega0 = omega0;
  out.cache.affine = AffineCache{std::move(input), weights, true};
  return out;
}

LayerGrads sine_layer_backward(const SineCache& cache, const Matrix& upstream_grad,
                               bool want_input_grad) {
  check_cache(cache.affine, upstream_grad, "sine_layer_backward");
  require_finite(upstream_grad, "upstream gradient");
  // d sin(w0 z)/dz = w0 cos(w0 z)
  const Matrix grad_z =
      kernels::sine_local_grad(upstream_grad, cache.preactivation, cache.omega0);
  require_finite(grad_z, "sine layer gradient");
  return affine_backward(cache.affine, grad_z, want_input_grad);
}

LinearForward linear_layer_forward(Matrix input, const Matrix& weights,
                                   std::span<const double> bias) {
  LinearForward out;
  out.output = affine(input, weights, bias, "linear_layer_forward");
  out.cache = AffineCache{std::move(input), weights, true};
  return out;
}

LayerGrads linear_layer_backward(const AffineCache& cache, const Matrix& upstream_grad,
                                 bool want_input_grad) {
  check_cache(cache, upstream_grad, "linear_layer_backward");
  require_finite(upstream_grad, "upstream gradient");
  return affine_backward(cache, upstream_grad, want_input_grad);
}

}  // namespace inrad
