#include "ruleclip/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ruleclip/error.hpp"

namespace ruleclip::nn {

Network::Network(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw UsageError("network needs at least one layer");
  std::size_t total = 0;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.inputs == 0 || l.outputs == 0) throw UsageError("layer " + std::to_string(k) + " has zero width");
    if (k > 0 && layers_[k - 1].outputs != l.inputs)
      throw UsageError("layer " + std::to_string(k) + " input width does not chain");
    offsets_.push_back(total);
    total += l.inputs * l.outputs + l.outputs;
  }
  params_.assign(total, 0.0);
}

Network Network::mlp(std::size_t inputs, std::span<const std::size_t> hidden, std::size_t outputs,
                     Activation hidden_activation, Activation output_activation, std::mt19937_64& rng) {
  std::vector<LayerSpec> specs;
  std::size_t width = inputs;
  for (std::size_t h : hidden) {
    specs.push_back({width, h, hidden_activation});
    width = h;
  }
  specs.push_back({width, outputs, output_activation});
  Network net(std::move(specs));
  for (std::size_t k = 0; k < net.layers_.size(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.layers_[k].inputs));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : net.weights(k)) w = dist(rng);
    for (double& b : net.bias(k)) b = dist(rng);
  }
  return net;
}

std::size_t Network::input_width() const { return layers_.empty() ? 0 : layers_.front().inputs; }
std::size_t Network::output_width() const { return layers_.empty() ? 0 : layers_.back().outputs; }

std::span<double> Network::weights(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return std::span<double>(params_).subspan(offsets_[layer], l.inputs * l.outputs);
}
std::span<const double> Network::weights(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return std::span<const double>(params_).subspan(offsets_[layer], l.inputs * l.outputs);
}
std::span<double> Network::bias(std::size_t layer) {
  return std::span<double>(params_).subspan(bias_offset(layer), layers_.at(layer).outputs);
}
std::span<const double> Network::bias(std::size_t layer) const {
  return std::span<const double>(params_).subspan(bias_offset(layer), layers_.at(layer).outputs);
}

bool Network::all_finite() const noexcept {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> Network::forward(std::span<const double> input) const {
  const Matrix out = forward(column(input));
  return {out.values().begin(), out.values().end()};
}

Matrix Network::forward(const Matrix& inputs) const {
  if (inputs.rows() != input_width())
    throw UsageError("forward: expected input width " + std::to_string(input_width()) + ", got " +
                     std::to_string(inputs.rows()));
  Matrix x = inputs, z;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    kernels::affine_forward(weights(k), bias(k), x, z);
    kernels::activate(layers_[k].activation, z, x);
  }
  return x;
}

Matrix Network::forward(const Matrix& inputs, ForwardTape& tape) const {
  if (inputs.rows() != input_width())
    throw UsageError("forward: expected input width " + std::to_string(input_width()) + ", got " +
                     std::to_string(inputs.rows()));
  tape.values.assign(layers_.size() + 1, Matrix{});
  tape.pre.assign(layers_.size(), Matrix{});
  tape.values[0] = inputs;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    kernels::affine_forward(weights(k), bias(k), tape.values[k], tape.pre[k]);
    kernels::activate(layers_[k].activation, tape.pre[k], tape.values[k + 1]);
  }
  return tape.values.back();
}

BackwardResult Network::backward(const ForwardTape& tape, const Matrix& cotangent, bool want_parameters) const {
  if (tape.values.size() != layers_.size() + 1) throw UsageError("backward: tape does not match network");
  const Matrix& out = tape.values.back();
  if (cotangent.rows() != out.rows() || cotangent.cols() != out.cols())
    throw UsageError("backward: cotangent shape mismatch");
  BackwardResult result;
  if (want_parameters) result.gradients = GradientBuffer(params_.size());
  Matrix delta = cotangent, next;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    kernels::activate_backward(layers_[k].activation, tape.pre[k], tape.values[k + 1], delta);
    if (want_parameters) {
      auto g = std::span<double>(result.gradients.values);
      const auto& l = layers_[k];
      kernels::affine_backward_params(delta, tape.values[k], g.subspan(offsets_[k], l.inputs * l.outputs),
                                      g.subspan(bias_offset(k), l.outputs));
    }
    kernels::affine_backward_input(weights(k), layers_[k].inputs, delta, next);
    std::swap(delta, next);
  }
  result.input_cotangent = std::move(delta);
  return result;
}

BackwardResult Network::backward(std::span<const double> input, std::span<const double> cotangent) const {
  if (cotangent.size() != output_width()) throw UsageError("backward: cotangent length mismatch");
  ForwardTape tape;
  forward(column(input), tape);
  return backward(tape, column(cotangent));
}

void polyak_update(Network& target, const Network& online, double tau) {
  if (!target.same_architecture(online)) throw UsageError("polyak_update: architecture mismatch");
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("polyak_update: tau must lie in [0, 1]");
  auto t = target.parameters();
  auto o = online.parameters();
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = tau * o[k] + (1.0 - tau) * t[k];
}

}  // namespace ruleclip::nn
