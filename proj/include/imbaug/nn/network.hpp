#pragma once

#include <memory>
#include <vector>

#include "imbaug/nn/layers.hpp"

namespace imbaug::nn {

// Activations recorded by one forward pass. Keeping them outside the Network
// lets one set of weights run several forward passes (e.g. the two branches
// of a Siamese pair) and backpropagate each into the same accumulators.
class Tape {
 public:
  bool empty() const { return caches_.empty(); }
  void clear() { caches_.clear(); }

 private:
  friend class Network;
  std::vector<LayerCache> caches_;
};

class Network {
 public:
  Network() = default;
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  // Appends a layer; its in_dim must equal the current out_dim.
  Network& add(std::unique_ptr<Layer> layer);
  Network& dense(std::size_t in, std::size_t out, Rng& rng);
  Network& batchnorm(std::size_t dim);
  Network& layernorm(std::size_t dim);
  Network& activation(LayerKind kind, std::size_t dim);

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  Mode mode() const { return mode_; }
  void set_mode(Mode mode) { mode_ = mode; }

  // Forward in the current mode, recording into the built-in tape.
  Matrix forward(const Matrix& batch);
  Matrix forward(const Matrix& batch, Tape& tape);
  // Eval-mode forward with no recorded state; thread-safe on a shared Network.
  Matrix infer(const Matrix& batch) const;

  // Accumulates parameter gradients and returns d(loss)/d(input).
  // skip_last > 0 starts from below the last skip_last layers, e.g. to feed a
  // fused softmax/cross-entropy gradient in at the logits.
  Matrix backward(const Matrix& upstream, std::size_t skip_last = 0);
  Matrix backward(const Tape& tape, const Matrix& upstream, std::size_t skip_last = 0);

  // Replaces every BatchNorm layer's running statistics with the average of
  // the batch statistics seen over `batches` (train-mode propagation).
  void recalibrate_batchnorm(const std::vector<Matrix>& batches);

  void zero_grad();
  std::vector<ParamRef> params();
  std::size_t parameter_count();

 private:
  void check_batch(const Matrix& batch) const;

  std::vector<std::unique_ptr<Layer>> layers_;
  Mode mode_ = Mode::train;
  Tape tape_;
};

}  // namespace imbaug::nn
