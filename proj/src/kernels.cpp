#include "inrad/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "inrad/errors.hpp"

namespace inrad::kernels {
namespace {

void check_inner(std::size_t lhs, std::size_t rhs, const Matrix& a, const Matrix& b,
                 const char* op) {
  if (lhs != rhs) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                     b.shape_string());
  }
}

constexpr std::size_t kRowBlock = 8;
constexpr std::size_t kColBlock = 24;

constexpr std::size_t kDepthBlock = 256;

// One tile of c = a * b over depth [p0, p1). Full tiles have compile-time
// extents so the accumulators stay in vector registers; edge tiles reuse the
// loop with runtime bounds. Accumulators resume from c after the first depth
// block, so each element remains one fma chain over ascending p from 0.
template <bool kFull>
inline void gemm_tile(const double* __restrict a, const double* __restrict b,
                      double* __restrict c, std::size_t i0, std::size_t j0, std::size_t mr,
                      std::size_t nr, std::size_t p0, std::size_t p1, std::size_t k,
                      std::size_t n) {
  const std::size_t rows = kFull ? kRowBlock : mr;
  const std::size_t cols = kFull ? kColBlock : nr;
  double acc[kRowBlock][kColBlock] = {};
  if (p0 > 0) {
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(c + (i0 + r) * n + j0, cols, acc[r]);
  }
  for (std::size_t p = p0; p < p1; ++p) {
    const double* brow = b + p * n + j0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double av = a[(i0 + r) * k + p];
#pragma omp simd
      for (std::size_t q = 0; q < cols; ++q) acc[r][q] = std::fma(av, brow[q], acc[r][q]);
    }
  }
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(acc[r], cols, c + (i0 + r) * n + j0);
}

// c = a(m x k) * b(k x n), all row-major. Depth is blocked so a b panel stays
// in cache across row blocks.
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  const auto row_blocks = static_cast<std::ptrdiff_t>((m + kRowBlock - 1) / kRowBlock);
  for (std::size_t p0 = 0; p0 < k; p0 += kDepthBlock) {
    const std::size_t p1 = std::min(k, p0 + kDepthBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ib = 0; ib < row_blocks; ++ib) {
      const std::size_t i0 = static_cast<std::size_t>(ib) * kRowBlock;
      const std::size_t mr = std::min(kRowBlock, m - i0);
      for (std::size_t j0 = 0; j0 < n; j0 += kColBlock) {
        const std::size_t nr = std::min(kColBlock, n - j0);
        if (mr == kRowBlock && nr == kColBlock) {
          gemm_tile<true>(a, b, c, i0, j0, mr, nr, p0, p1, k, n);
        } else {
          gemm_tile<false>(a, b, c, i0, j0, mr, nr, p0, p1, k, n);
        }
      }
    }
  }
}

Matrix transpose_parallel(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  const auto rows = static_cast<std::ptrdiff_t>(m.rows());
  const std::size_t cols = m.cols();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t(c, static_cast<std::size_t>(r)) = m(r, c);
  return t;
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.rows(), a, b, "matmul");
  Matrix c(a.rows(), b.cols());
  if (a.cols() == 0) return c;
  gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  require_finite(c, "matmul result");
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_inner(a.rows(), b.rows(), a, b, "matmul_tn");
  const Matrix at = transpose_parallel(a);
  Matrix c(a.cols(), b.cols());
  if (a.rows() == 0) return c;
  gemm_nn(at.data(), b.data(), c.data(), at.rows(), at.cols(), b.cols());
  require_finite(c, "matmul_tn result");
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.cols(), a, b, "matmul_nt");
  const Matrix bt = transpose_parallel(b);
  Matrix c(a.rows(), b.rows());
  if (a.cols() == 0) return c;
  gemm_nn(a.data(), bt.data(), c.data(), a.rows(), a.cols(), bt.cols());
  require_finite(c, "matmul_nt result");
  return c;
}

void add_row_vector(Matrix& m, std::span<const double> bias) {
  if (bias.size() != m.cols()) {
    throw ShapeError("bias length " + std::to_string(bias.size()) + " does not match " +
                     m.shape_string());
  }
  const auto rows = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    auto row = m.row(static_cast<std::size_t>(r));
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
  }
}

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> sums(m.cols(), 0.0);
  const std::size_t cols = m.cols();
  const std::size_t rows = m.rows();
  constexpr std::size_t kStrip = 64;
  const auto strips = static_cast<std::ptrdiff_t>((cols + kStrip - 1) / kStrip);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < strips; ++s) {
    const std::size_t c0 = static_cast<std::size_t>(s) * kStrip;
    const std::size_t c1 = std::min(cols, c0 + kStrip);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = m.data() + r * cols;
      for (std::size_t c = c0; c < c1; ++c) sums[c] += row[c];
    }
  }
  return sums;
}

void set_num_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.rows(), a, b, "matmul");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s = std::fma(a(i, p), b(p, j), s);
      c(i, j) = s;
    }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_inner(a.rows(), b.rows(), a, b, "matmul_tn");
  Matrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.rows(); ++p) s = std::fma(a(p, i), b(p, j), s);
      c(i, j) = s;
    }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_inner(a.cols(), b.cols(), a, b, "matmul_nt");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s = std::fma(a(i, p), b(j, p), s);
      c(i, j) = s;
    }
  return c;
}

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> sums(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) sums[c] += m(r, c);
  return sums;
}

}  // namespace serial

}  // namespace inrad::kernels
