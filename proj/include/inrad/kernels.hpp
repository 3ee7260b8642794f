#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "inrad/matrix.hpp"

// Dense kernels behind the model. The default entry points are OpenMP
// parallel; kernels::serial holds plain loop versions kept as the reference
// the parallel ones are tested and benchmarked against.
//
// Every output element is accumulated by a single thread as an fma chain in
// ascending index order, so results do not depend on the thread count and
// match the serial loops bit for bit.
namespace inrad::kernels {

// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// transpose(a) * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a * transpose(b)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// out(r, c) = m(r, c) + bias[c]
void add_row_vector(Matrix& m, std::span<const double> bias);
// Column sums, accumulated over rows in order.
std::vector<double> column_sums(const Matrix& m);

// m = sin(scale * m)
void sin_scaled_inplace(Matrix& m, double scale);
// out = upstream * scale * cos(scale * z), the sine layer's local gradient.
Matrix sine_local_grad(const Matrix& upstream, const Matrix& z, double scale);

// Thread count used by the parallel kernels; 0 restores the runtime default.
void set_num_threads(int n);
int max_threads();

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
std::vector<double> column_sums(const Matrix& m);
void sin_scaled_inplace(Matrix& m, double scale);
Matrix sine_local_grad(const Matrix& upstream, const Matrix& z, double scale);

}  // namespace serial

}  // namespace inrad::kernels

namespace inrad {

// Shape-checked product; shape errors name both operands.
inline Matrix matmul(const Matrix& a, const Matrix& b) { return kernels::matmul(a, b); }

}  // namespace inrad
