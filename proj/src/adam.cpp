#include "inrad/adam.hpp"

#include <cmath>
#include <string>

#include "inrad/errors.hpp"
#include "inrad/matrix.hpp"

namespace inrad {

AdamState::AdamState(AdamConfig config, std::span<const std::size_t> sizes) : config_(config) {
  if (!(config_.lr > 0.0)) throw ConfigError("adam: learning rate must be positive");
  if (!(config_.beta1 > 0.0 && config_.beta1 < 1.0) ||
      !(config_.beta2 > 0.0 && config_.beta2 < 1.0)) {
    throw ConfigError("adam: betas must lie in (0, 1)");
  }
  if (!(config_.epsilon > 0.0)) throw ConfigError("adam: epsilon must be positive");
  m_.reserve(sizes.size());
  v_.reserve(sizes.size());
  for (std::size_t n : sizes) {
    m_.emplace_back(n, 0.0);
    v_.emplace_back(n, 0.0);
  }
}

void AdamState::update(std::span<const std::span<double>> params,
                       std::span<const std::span<const double>> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("adam: expected " + std::to_string(m_.size()) + " tensors, got " +
                     std::to_string(params.size()) + " params and " +
                     std::to_string(grads.size()) + " grads");
  }
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (params[i].size() != m_[i].size() || grads[i].size() != m_[i].size()) {
      throw ShapeError("adam: tensor " + std::to_string(i) + " has " +
                       std::to_string(params[i].size()) + " params and " +
                       std::to_string(grads[i].size()) + " grads, state holds " +
                       std::to_string(m_[i].size()));
    }
    require_finite(grads[i], "adam gradient");
  }

  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    auto p = params[i];
    auto g = grads[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p[j] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace inrad
