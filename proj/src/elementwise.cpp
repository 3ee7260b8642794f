// Transcendental elementwise kernels. This file is built with -ffast-math so
// the loops map onto glibc's vector math routines; it must not hold
// reductions or finiteness checks.
#include <cmath>
#include <cstddef>
#include <string>

#include "inrad/errors.hpp"
#include "inrad/kernels.hpp"

namespace inrad::kernels {
namespace {

// Work is split into fixed 64-element blocks plus one scalar tail, so each
// element takes the same vector or scalar path whatever the thread count.
constexpr std::size_t kBlock = 64;

inline void sin_block(double* __restrict p, std::size_t count, double scale) {
  for (std::size_t i = 0; i < count; ++i) p[i] = std::sin(scale * p[i]);
}

inline void grad_block(const double* __restrict up, const double* __restrict z,
                       double* __restrict out, std::size_t count, double scale) {
  for (std::size_t i = 0; i < count; ++i) out[i] = up[i] * scale * std::cos(scale * z[i]);
}

void check_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("sine_local_grad: " + a.shape_string() + " vs " + b.shape_string());
  }
}

}  // namespace

void sin_scaled_inplace(Matrix& m, double scale) {
  double* p = m.data();
  const std::size_t n = m.size();
  const auto blocks = static_cast<std::ptrdiff_t>(n / kBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) sin_block(p + b * kBlock, kBlock, scale);
  const std::size_t done = static_cast<std::size_t>(blocks) * kBlock;
  sin_block(p + done, n - done, scale);
}

Matrix sine_local_grad(const Matrix& upstream, const Matrix& z, double scale) {
  check_same_shape(upstream, z);
  Matrix out(z.rows(), z.cols());
  const std::size_t n = z.size();
  const auto blocks = static_cast<std::ptrdiff_t>(n / kBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    grad_block(upstream.data() + b * kBlock, z.data() + b * kBlock, out.data() + b * kBlock,
               kBlock, scale);
  }
  const std::size_t done = static_cast<std::size_t>(blocks) * kBlock;
  grad_block(upstream.data() + done, z.data() + done, out.data() + done, n - done, scale);
  return out;
}

namespace serial {

void sin_scaled_inplace(Matrix& m, double scale) {
  const std::size_t n = m.size();
  std::size_t done = 0;
  for (; done + kBlock <= n; done += kBlock) sin_block(m.data() + done, kBlock, scale);
  sin_block(m.data() + done, n - done, scale);
}

Matrix sine_local_grad(const Matrix& upstream, const Matrix& z, double scale) {
  check_same_shape(upstream, z);
  Matrix out(z.rows(), z.cols());
  const std::size_t n = z.size();
  std::size_t done = 0;
  for (; done + kBlock <= n; done += kBlock) {
    grad_block(upstream.data() + done, z.data() + done, out.data() + done, kBlock, scale);
  }
  grad_block(upstream.data() + done, z.data() + done, out.data() + done, n - done, scale);
  return out;
}

}  // namespace serial

}  // namespace inrad::kernels
