#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "inrad/encodings.hpp"
#include "inrad/matrix.hpp"
#include "inrad/rng.hpp"

namespace inrad {

struct SirenConfig {
  std::size_t input_dim = 6;
  std::size_t hidden_dim = 256;
  std::size_t n_hidden_layers = 3;
  std::size_t output_dim = 1;
  double omega0_first = 3000.0;
  double omega0_hidden = 30.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SirenConfig&) const = default;
};

// Weights and biases of every layer in order; the last entry is the final
// linear map. Used both for model parameters and for their gradients.
struct ParameterSet {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::vector<std::span<double>> views();
  std::vector<std::span<const double>> views() const;
  std::vector<std::size_t> sizes() const;
  bool operator==(const ParameterSet&) const = default;
};

// sin(w0 * (W h + b)) layers followed by a linear head.
class SirenModel {
 public:
  SirenModel() = default;

  // First layer weights ~ U(-1/fan_in, 1/fan_in); later layers, including the
  // head, ~ U(-sqrt(6/fan_in)/w0_hidden, +sqrt(6/fan_in)/w0_hidden). Biases 0.
  static SirenModel init(const SirenConfig& cfg, Rng& rng);
  static SirenModel init(const SirenConfig& cfg);  // Rng(cfg.seed)
  // Assembles a model from explicit parameters; shapes are validated.
  static SirenModel from_parameters(const SirenConfig& cfg, ParameterSet params);

  const SirenConfig& config() const noexcept { return config_; }
  const ParameterSet& parameters() const noexcept { return params_; }
  ParameterSet& parameters() noexcept { return params_; }
  std::size_t sine_layer_count() const noexcept { return params_.weights.size() - 1; }
  double omega0(std::size_t layer) const noexcept;
  std::size_t parameter_count() const;

  // (n x output_dim); row i is the prediction for coordinate row i.
  Matrix forward(const EncodedCoords& coords) const;

  bool operator==(const SirenModel&) const = default;

 private:
  void check_shapes() const;

  SirenConfig config_;
  ParameterSet params_;
};

struct LossAndGrads {
  double loss = 0.0;
  ParameterSet grads;
};

// Mean over rows of the squared l2 residual, and its gradient.
double representation_loss(const SirenModel& model, const EncodedCoords& coords,
                           const Matrix& targets);
LossAndGrads loss_and_grads(const SirenModel& model, const EncodedCoords& coords,
                            const Matrix& targets);

// JSON checkpoint; doubles are written with round-trip precision.
void save_checkpoint(const SirenModel& model, const std::filesystem::path& path);
SirenModel load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_json(const SirenModel& model);
SirenModel checkpoint_from_json(const std::string& text);

}  // namespace inrad
