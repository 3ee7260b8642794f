#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "inrad/adam.hpp"
#include "inrad/errors.hpp"
#include "inrad/kernels.hpp"
#include "inrad/layers.hpp"
#include "inrad/matrix.hpp"
#include "inrad/rng.hpp"
#include "support/oracles.hpp"

using namespace inrad;

namespace {

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

// <upstream, f(input)> as a scalar objective for finite differences.
double weighted_sum(const Matrix& out, const Matrix& upstream) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out.values()[i] * upstream.values()[i];
  return s;
}

}  // namespace

TEST_CASE("matrix construction validates length and finiteness") {
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(Matrix(1, 2, std::vector<double>{1, NAN}), NumericError);
  CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), ShapeError);
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6.0);
  CHECK(m.transposed() == Matrix{{1, 4}, {2, 5}, {3, 6}});
}

TEST_CASE("matmul examples") {
  const Matrix m{{0.5, -2.0}, {3.25, 7.0}};
  CHECK(matmul(Matrix::identity(2), m) == m);
  CHECK(matmul(Matrix{{1, 2}, {3, 4}}, Matrix{{1}, {1}}) == Matrix{{3}, {7}});
  CHECK(matmul(Matrix(2, 2), m) == Matrix(2, 2));
}

TEST_CASE("matmul shape mismatch names both shapes") {
  try {
    matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("2x3") != std::string::npos);
    CHECK(what.find("2x3", what.find("2x3") + 1) != std::string::npos);
  }
}

TEST_CASE("matmul agrees exactly with the triple loop up to 16x16") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 16));
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, 16));
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 16));
    const Matrix a = oracle::random_matrix(m, k, rng);
    const Matrix b = oracle::random_matrix(k, n, rng);
    const Matrix want = oracle::naive_matmul(a, b);
    REQUIRE(kernels::matmul(a, b) == want);
    REQUIRE(kernels::serial::matmul(a, b) == want);
    REQUIRE(kernels::matmul_tn(a.transposed(), b) == want);
    REQUIRE(kernels::matmul_nt(a, b.transposed()) == want);
  }
}

TEST_CASE("parallel kernels match serial kernels bit for bit at any thread count") {
  Rng rng(11);
  // Sizes straddle the register tile and depth block.
  const Matrix a = oracle::random_matrix(203, 300, rng);
  const Matrix b = oracle::random_matrix(300, 77, rng);
  const Matrix c = oracle::random_matrix(203, 77, rng);
  const Matrix z = oracle::random_matrix(203, 77, rng, -3.0, 3.0);
  for (int threads : {1, 2, 3, 4}) {
    CAPTURE(threads);
    kernels::set_num_threads(threads);
    CHECK(kernels::matmul(a, b) == kernels::serial::matmul(a, b));
    CHECK(kernels::matmul_tn(a, c) == kernels::serial::matmul_tn(a, c));
    CHECK(kernels::matmul_nt(a, b.transposed()) == kernels::serial::matmul_nt(a, b.transposed()));
    CHECK(kernels::column_sums(a) == kernels::serial::column_sums(a));
    Matrix s1 = z;
    Matrix s2 = z;
    kernels::sin_scaled_inplace(s1, 30.0);
    kernels::serial::sin_scaled_inplace(s2, 30.0);
    CHECK(s1 == s2);
    CHECK(kernels::sine_local_grad(c, z, 30.0) == kernels::serial::sine_local_grad(c, z, 30.0));
  }
  kernels::set_num_threads(0);
}

TEST_CASE("elementwise sine stays within a few ulps of libm") {
  Rng rng(3);
  Matrix z = oracle::random_matrix(97, 13, rng, -50.0, 50.0);
  Matrix s = z;
  kernels::sin_scaled_inplace(s, 3000.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(std::abs(s.values()[i] - std::sin(3000.0 * z.values()[i])) < 1e-14);
  }
}

TEST_CASE("sine layer forward examples") {
  Rng rng(5);
  const Matrix x = oracle::random_matrix(4, 3, rng);
  const auto zero = sine_layer_forward(x, Matrix(2, 3), zeros(2), 30.0);
  CHECK(zero.output == Matrix(4, 2));

  for (double w0 : {1.0, 30.0, 3000.0}) {
    const Matrix in{{std::numbers::pi / (2.0 * w0)}};
    const auto one = sine_layer_forward(in, Matrix{{1.0}}, zeros(1), w0);
    CHECK(one.output(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sine layer forward matches the scalar oracle") {
  Rng rng(9);
  const Matrix x = oracle::random_matrix(6, 5, rng);
  const Matrix w = oracle::random_matrix(4, 5, rng);
  std::vector<double> b(4);
  for (double& v : b) v = rng.uniform(-1, 1);
  const auto fwd = sine_layer_forward(x, w, b, 30.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::vector<double> row(x.row(r).begin(), x.row(r).end());
    const auto want = oracle::sine_layer_scalar(row, w, b, 30.0);
    for (std::size_t o = 0; o < 4; ++o) CHECK(fwd.output(r, o) == doctest::Approx(want[o]).epsilon(1e-12));
  }
}

TEST_CASE("layer errors") {
  CHECK_THROWS_AS(sine_layer_forward(Matrix(2, 3), Matrix(2, 4), zeros(2), 30.0), ShapeError);
  CHECK_THROWS_AS(sine_layer_forward(Matrix(2, 3), Matrix(2, 3), zeros(3), 30.0), ShapeError);
  CHECK_THROWS_AS(sine_layer_forward(Matrix(2, 3), Matrix(2, 3), zeros(2), 0.0), ContractError);
  CHECK_THROWS_AS(linear_layer_forward(Matrix(2, 3), Matrix(1, 2), zeros(1)), ShapeError);

  CHECK_THROWS_AS(sine_layer_backward(SineCache{}, Matrix(2, 2)), ContractError);
  CHECK_THROWS_AS(linear_layer_backward(AffineCache{}, Matrix(2, 2)), ContractError);
  const auto fwd = sine_layer_forward(Matrix(2, 3), Matrix(4, 3), zeros(4), 30.0);
  CHECK_THROWS_AS(sine_layer_backward(fwd.cache, Matrix(2, 3)), ContractError);
  CHECK_THROWS_AS(sine_layer_backward(fwd.cache, Matrix(3, 4)), ContractError);
}

TEST_CASE("sine layer backward examples") {
  Rng rng(13);
  const Matrix x = oracle::random_matrix(4, 3, rng);
  const Matrix w = oracle::random_matrix(2, 3, rng);
  const auto fwd = sine_layer_forward(x, w, std::vector<double>{0.1, -0.2}, 30.0);
  const auto g = sine_layer_backward(fwd.cache, Matrix(4, 2));
  CHECK(g.input == Matrix(4, 3));
  CHECK(g.weights == Matrix(2, 3));
  CHECK(g.bias == zeros(2));

  const auto unit = sine_layer_forward(Matrix{{0.0}}, Matrix{{1.0}}, zeros(1), 1.0);
  const auto gu = sine_layer_backward(unit.cache, Matrix{{1.0}});
  CHECK(gu.input(0, 0) == 1.0);

  const auto no_input = sine_layer_backward(fwd.cache, Matrix(4, 2, 1.0), false);
  CHECK(no_input.input.empty());
}

TEST_CASE("layer gradients match central differences") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 8));
    const auto in = static_cast<std::size_t>(rng.uniform_int(1, 8));
    const auto out = static_cast<std::size_t>(rng.uniform_int(1, 8));
    const bool sine = trial % 3 != 2;
    const double w0 = trial % 3 == 1 ? 3000.0 : 30.0;
    // Keep w0 * z within a few periods so differences resolve the curvature.
    const double scale = sine ? 1.0 / (w0 * static_cast<double>(in)) : 1.0;
    Matrix x = oracle::random_matrix(n, in, rng);
    Matrix w = oracle::random_matrix(out, in, rng, -scale, scale);
    std::vector<double> b(out);
    for (double& v : b) v = rng.uniform(-scale, scale);
    const Matrix up = oracle::random_matrix(n, out, rng);

    auto objective = [&] {
      return sine ? weighted_sum(sine_layer_forward(x, w, b, w0).output, up)
                  : weighted_sum(linear_layer_forward(x, w, b).output, up);
    };
    const LayerGrads g = sine ? sine_layer_backward(sine_layer_forward(x, w, b, w0).cache, up)
                              : linear_layer_backward(linear_layer_forward(x, w, b).cache, up);
    const double step = sine && w0 > 1000.0 ? 1e-9 : 1e-6;

    std::vector<double> fd, an;
    for (std::size_t i = 0; i < w.size(); ++i) {
      fd.push_back(oracle::central_difference(objective, w.values()[i], step));
      an.push_back(g.weights.values()[i]);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      fd.push_back(oracle::central_difference(objective, b[i], step));
      an.push_back(g.bias[i]);
    }
    CAPTURE(trial);
    CHECK(oracle::vector_relative_error(an, fd) < 1e-5);

    std::vector<double> fdx, anx;
    for (std::size_t i = 0; i < x.size(); ++i) {
      fdx.push_back(oracle::central_difference(objective, x.values()[i], 1e-6));
      anx.push_back(g.input.values()[i]);
    }
    CHECK(oracle::vector_relative_error(anx, fdx) < 1e-5);
  }
}

TEST_CASE("linear layer examples") {
  Rng rng(19);
  const Matrix x = oracle::random_matrix(5, 3, rng);
  const auto fwd = linear_layer_forward(x, Matrix::identity(3), zeros(3));
  CHECK(fwd.output == x);
  const auto g = linear_layer_backward(fwd.cache, Matrix(5, 3));
  CHECK(g.weights == Matrix(3, 3));
  CHECK(g.bias == zeros(3));
}

TEST_CASE("adam single step from zero with unit gradient") {
  std::vector<double> p{0.0};
  const std::vector<double> g{1.0};
  const std::size_t sizes[] = {1};
  AdamState state(AdamConfig{}, sizes);
  const std::span<double> ps[] = {p};
  const std::span<const double> gs[] = {g};
  adam_step(ps, gs, state);
  CHECK(state.step() == 1);
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  CHECK(p[0] == doctest::Approx(-1e-4).epsilon(1e-9));
  CHECK(state.config().beta1 == 0.9);
  CHECK(state.config().beta2 == 0.99);
}

TEST_CASE("adam with zero gradients never moves parameters") {
  Rng rng(23);
  std::vector<double> p(10), q(4);
  for (double& v : p) v = rng.uniform(-1, 1);
  for (double& v : q) v = rng.uniform(-1, 1);
  const auto p0 = p;
  const auto q0 = q;
  const std::vector<double> gp(10, 0.0), gq(4, 0.0);
  const std::size_t sizes[] = {10, 4};
  AdamState state(AdamConfig{}, sizes);
  const std::span<double> ps[] = {p, q};
  const std::span<const double> gs[] = {gp, gq};
  for (int t = 1; t <= 50; ++t) {
    adam_step(ps, gs, state);
    REQUIRE(state.step() == static_cast<std::uint64_t>(t));
  }
  CHECK(p == p0);
  CHECK(q == q0);
}

TEST_CASE("adam follows the bias-corrected recurrence") {
  std::vector<double> p{0.3, -0.7};
  const std::size_t sizes[] = {2};
  AdamConfig cfg;
  cfg.lr = 1e-2;
  AdamState state(cfg, sizes);
  double m[2] = {0, 0}, v[2] = {0, 0}, ref[2] = {0.3, -0.7};
  Rng rng(29);
  for (int t = 1; t <= 20; ++t) {
    const std::vector<double> g{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::span<double> ps[] = {p};
    const std::span<const double> gs[] = {g};
    adam_step(ps, gs, state);
    for (int i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.99 * v[i] + 0.01 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.99, t));
      ref[i] -= 1e-2 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  CHECK(p[0] == doctest::Approx(ref[0]).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(ref[1]).epsilon(1e-12));
}

TEST_CASE("adam rejects bad input without writing") {
  std::vector<double> p{1.0, 2.0};
  const std::size_t sizes[] = {2};
  AdamState state(AdamConfig{}, sizes);
  const std::span<double> ps[] = {p};

  const std::vector<double> short_grad{1.0};
  const std::span<const double> bad_shape[] = {short_grad};
  CHECK_THROWS_AS(adam_step(ps, bad_shape, state), ShapeError);

  const std::vector<double> nan_grad{1.0, NAN};
  const std::span<const double> bad_value[] = {nan_grad};
  CHECK_THROWS_AS(adam_step(ps, bad_value, state), NumericError);

  CHECK(p == std::vector<double>{1.0, 2.0});
  CHECK(state.step() == 0);
}

TEST_CASE("rng determinism and ranges") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
  Rng c(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = c.uniform_int(-3, 3);
    REQUIRE(k >= -3);
    REQUIRE(k <= 3);
  }
  // mt19937_64 reference value for the default seed of the standard.
  Rng d(5489);
  CHECK(d.next_u64() == 14514284786278117030ull);
  CHECK(Rng(1).fork(0).next_u64() != Rng(1).fork(1).next_u64());
  CHECK(Rng(1).fork(3).next_u64() == Rng(1).fork(3).next_u64());
}
