#include "inrad/siren.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "inrad/errors.hpp"
#include "inrad/layers.hpp"

namespace inrad {
namespace {

constexpr int kCheckpointVersion = 1;
constexpr const char* kCheckpointFormat = "inrad-siren";

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
}

void check_targets(const EncodedCoords& coords, const Matrix& targets, std::size_t out_dim) {
  if (targets.rows() != coords.n() || targets.cols() != out_dim) {
    throw ShapeError("targets " + targets.shape_string() + " do not match expected " +
                     shape_string(coords.n(), out_dim));
  }
  require_finite(targets, "targets");
}

}  // namespace

void SirenConfig::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || n_hidden_layers == 0 || output_dim == 0) {
    throw ConfigError("siren dimensions must all be at least 1");
  }
  if (!(omega0_first > 0.0) || !(omega0_hidden > 0.0) || !std::isfinite(omega0_first) ||
      !std::isfinite(omega0_hidden)) {
    throw ConfigError("siren omega0 values must be positive and finite");
  }
}

std::vector<std::span<double>> ParameterSet::views() {
  std::vector<std::span<double>> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.emplace_back(weights[l].values());
    out.emplace_back(biases[l]);
  }
  return out;
}

std::vector<std::span<const double>> ParameterSet::views() const {
  std::vector<std::span<const double>> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.emplace_back(weights[l].values());
    out.emplace_back(biases[l]);
  }
  return out;
}

std::vector<std::size_t> ParameterSet::sizes() const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.push_back(weights[l].size());
    out.push_back(biases[l].size());
  }
  return out;
}

SirenModel SirenModel::init(const SirenConfig& cfg, Rng& rng) {
  cfg.validate();
  SirenModel model;
  model.config_ = cfg;
  std::size_t fan_in = cfg.input_dim;
  for (std::size_t l = 0; l <= cfg.n_hidden_layers; ++l) {
    const bool head = l == cfg.n_hidden_layers;
    const std::size_t fan_out = head ? cfg.output_dim : cfg.hidden_dim;
    Matrix w(fan_out, fan_in);
    const double bound = l == 0 ? 1.0 / static_cast<double>(fan_in)
                                : std::sqrt(6.0 / static_cast<double>(fan_in)) / cfg.omega0_hidden;
    Rng layer_rng = rng.fork(l);
    fill_uniform(w, bound, layer_rng);
    model.params_.weights.push_back(std::move(w));
    model.params_.biases.emplace_back(fan_out, 0.0);
    fan_in = fan_out;
  }
  // Advance the caller's generator so consecutive inits differ.
  rng.next_u64();
  return model;
}

SirenModel SirenModel::init(const SirenConfig& cfg) {
  Rng rng(cfg.seed);
  return init(cfg, rng);
}

SirenModel SirenModel::from_parameters(const SirenConfig& cfg, ParameterSet params) {
  cfg.validate();
  SirenModel model;
  model.config_ = cfg;
  model.params_ = std::move(params);
  model.check_shapes();
  return model;
}

void SirenModel::check_shapes() const {
  const auto& p = params_;
  if (p.weights.size() != config_.n_hidden_layers + 1 || p.biases.size() != p.weights.size()) {
    throw ShapeError("siren parameter set has " + std::to_string(p.weights.size()) +
                     " layers, config expects " + std::to_string(config_.n_hidden_layers + 1));
  }
  std::size_t fan_in = config_.input_dim;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const bool head = l + 1 == p.weights.size();
    const std::size_t fan_out = head ? config_.output_dim : config_.hidden_dim;
    if (p.weights[l].rows() != fan_out || p.weights[l].cols() != fan_in ||
        p.biases[l].size() != fan_out) {
      throw ShapeError("layer " + std::to_string(l) + " weights " +
                       p.weights[l].shape_string() + " expected " +
                       shape_string(fan_out, fan_in));
    }
    require_finite(p.weights[l], "siren weights");
    require_finite(p.biases[l], "siren biases");
    fan_in = fan_out;
  }
}

double SirenModel::omega0(std::size_t layer) const noexcept {
  return layer == 0 ? config_.omega0_first : config_.omega0_hidden;
}

std::size_t SirenModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t s : params_.sizes()) n += s;
  return n;
}

Matrix SirenModel::forward(const EncodedCoords& coords) const {
  if (coords.dim() != config_.input_dim) {
    throw ShapeError("coordinates have dim " + std::to_string(coords.dim()) +
                     ", model expects " + std::to_string(config_.input_dim));
  }
  Matrix h = coords.values;
  for (std::size_t l = 0; l < sine_layer_count(); ++l) {
    h = sine_layer_forward(std::move(h), params_.weights[l], params_.biases[l], omega0(l)).output;
  }
  return linear_layer_forward(std::move(h), params_.weights.back(), params_.biases.back()).output;
}

double representation_loss(const SirenModel& model, const EncodedCoords& coords,
                           const Matrix& targets) {
  check_targets(coords, targets, model.config().output_dim);
  const Matrix pred = model.forward(coords);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred.data()[i] - targets.data()[i];
    sum += r * r;
  }
  return coords.n() == 0 ? 0.0 : sum / static_cast<double>(coords.n());
}

LossAndGrads loss_and_grads(const SirenModel& model, const EncodedCoords& coords,
                            const Matrix& targets) {
  check_targets(coords, targets, model.config().output_dim);
  if (coords.dim() != model.config().input_dim) {
    throw ShapeError("coordinates have dim " + std::to_string(coords.dim()) +
                     ", model expects " + std::to_string(model.config().input_dim));
  }
  if (coords.n() == 0) throw EmptyInputError("loss over zero timestamps");
  const auto& p = model.parameters();
  const std::size_t n_sine = model.sine_layer_count();

  std::vector<SineCache> caches;
  caches.reserve(n_sine);
  Matrix h = coords.values;
  for (std::size_t l = 0; l < n_sine; ++l) {
    auto fwd = sine_layer_forward(std::move(h), p.weights[l], p.biases[l], model.omega0(l));
    h = std::move(fwd.output);
    caches.push_back(std::move(fwd.cache));
  }
  auto head = linear_layer_forward(std::move(h), p.weights.back(), p.biases.back());

  LossAndGrads out;
  const double n = static_cast<double>(coords.n());
  Matrix upstream(head.output.rows(), head.output.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    const double r = head.output.data()[i] - targets.data()[i];
    sum += r * r;
    upstream.data()[i] = 2.0 * r / n;
  }
  out.loss = sum / n;
  if (!std::isfinite(out.loss)) throw NumericError("representation loss is not finite");

  out.grads.weights.resize(n_sine + 1);
  out.grads.biases.resize(n_sine + 1);
  auto g = linear_layer_backward(head.cache, upstream, true);
  out.grads.weights[n_sine] = std::move(g.weights);
  out.grads.biases[n_sine] = std::move(g.bias);
  upstream = std::move(g.input);
  for (std::size_t l = n_sine; l-- > 0;) {
    auto gl = sine_layer_backward(caches[l], upstream, l > 0);
    out.grads.weights[l] = std::move(gl.weights);
    out.grads.biases[l] = std::move(gl.bias);
    upstream = std::move(gl.input);
  }
  return out;
}

std::string checkpoint_json(const SirenModel& model) {
  using nlohmann::json;
  const auto& c = model.config();
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["config"] = {{"input_dim", c.input_dim},       {"hidden_dim", c.hidden_dim},
                 {"n_hidden_layers", c.n_hidden_layers}, {"output_dim", c.output_dim},
                 {"omega0_first", c.omega0_first}, {"omega0_hidden", c.omega0_hidden},
                 {"seed", c.seed}};
  json layers = json::array();
  const auto& p = model.parameters();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    layers.push_back({{"rows", p.weights[l].rows()},
                      {"cols", p.weights[l].cols()},
                      {"weights", std::vector<double>(p.weights[l].values().begin(),
                                                      p.weights[l].values().end())},
                      {"bias", p.biases[l]}});
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

SirenModel checkpoint_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw FormatError("not an inrad checkpoint");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw FormatError("unsupported checkpoint version " + j.at("version").dump());
    }
    const auto& jc = j.at("config");
    SirenConfig cfg;
    cfg.input_dim = jc.at("input_dim").get<std::size_t>();
    cfg.hidden_dim = jc.at("hidden_dim").get<std::size_t>();
    cfg.n_hidden_layers = jc.at("n_hidden_layers").get<std::size_t>();
    cfg.output_dim = jc.at("output_dim").get<std::size_t>();
    cfg.omega0_first = jc.at("omega0_first").get<double>();
    cfg.omega0_hidden = jc.at("omega0_hidden").get<double>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();
    ParameterSet params;
    for (const auto& jl : j.at("layers")) {
      params.weights.emplace_back(jl.at("rows").get<std::size_t>(), jl.at("cols").get<std::size_t>(),
                                  jl.at("weights").get<std::vector<double>>());
      params.biases.push_back(jl.at("bias").get<std::vector<double>>());
    }
    return SirenModel::from_parameters(cfg, std::move(params));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const SirenModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  out << checkpoint_json(model);
}

SirenModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace inrad
