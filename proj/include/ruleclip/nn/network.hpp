#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ruleclip/nn/kernels.hpp"
#include "ruleclip/nn/matrix.hpp"

namespace ruleclip::nn {

struct LayerSpec {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  Activation activation = Activation::identity;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Per-parameter accumulators laid out exactly like Network::parameters().
struct GradientBuffer {
  std::vector<double> values;

  GradientBuffer() = default;
  explicit GradientBuffer(std::size_t count) : values(count, 0.0) {}
  void zero() { std::fill(values.begin(), values.end(), 0.0); }
  std::size_t size() const noexcept { return values.size(); }
};

// Intermediate values of a batched forward pass, needed by backward().
struct ForwardTape {
  std::vector<Matrix> values;  // values[0] = input, values[k + 1] = output of layer k
  std::vector<Matrix> pre;     // pre-activations of layer k
};

struct BackwardResult {
  GradientBuffer gradients;
  Matrix input_cotangent;  // inputs x batch
};

// Dense feed-forward network. Parameters are stored flat: for every layer in
// order, the out x in weight matrix row-major, then the bias vector.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<LayerSpec> layers);

  // Fully connected chain with uniform(+-1/sqrt(fan_in)) initialisation.
  static Network mlp(std::size_t inputs, std::span<const std::size_t> hidden, std::size_t outputs,
                     Activation hidden_activation, Activation output_activation, std::mt19937_64& rng);

  std::size_t input_width() const;
  std::size_t output_width() const;
  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;
  std::size_t weight_offset(std::size_t layer) const { return offsets_.at(layer); }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_.at(layer) + layers_[layer].inputs * layers_[layer].outputs;
  }

  bool same_architecture(const Network& other) const noexcept { return layers_ == other.layers_; }
  bool all_finite() const noexcept;

  std::vector<double> forward(std::span<const double> input) const;
  Matrix forward(const Matrix& inputs) const;
  Matrix forward(const Matrix& inputs, ForwardTape& tape) const;

  // Reverse-mode derivative of sum_n <output_n, cotangent_n> over the batch
  // recorded in tape. With want_parameters = false only the input cotangent
  // is produced (gradients stays empty).
  BackwardResult backward(const ForwardTape& tape, const Matrix& cotangent, bool want_parameters = true) const;

  // Single-sample convenience: forward + backward.
  BackwardResult backward(std::span<const double> input, std::span<const double> cotangent) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// target <- tau * online + (1 - tau) * target, parameterwise.
void polyak_update(Network& target, const Network& online, double tau);

}  // namespace ruleclip::nn
