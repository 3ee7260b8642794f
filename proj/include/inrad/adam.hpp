#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace inrad {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
};

// Moment accumulators for a list of parameter tensors, each viewed flat.
class AdamState {
 public:
  AdamState() = default;
  AdamState(AdamConfig config, std::span<const std::size_t> sizes);

  const AdamConfig& config() const noexcept { return config_; }
  std::uint64_t step() const noexcept { return t_; }
  const std::vector<std::vector<double>>& first_moment() const noexcept { return m_; }
  const std::vector<std::vector<double>>& second_moment() const noexcept { return v_; }

  // One bias-corrected Adam update. Validates everything before writing.
  void update(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads);

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

inline void adam_step(std::span<const std::span<double>> params,
                      std::span<const std::span<const double>> grads, AdamState& state) {
  state.update(params, grads);
}

}  // namespace inrad
