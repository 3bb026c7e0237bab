#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "imbaug/matrix.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::nn {

enum class LayerKind : std::uint8_t {
  dense = 1,
  batchnorm = 2,
  layernorm = 3,
  leakyrelu = 4,
  relu = 5,
  sigmoid = 6,
  softmax = 7,
};

std::string_view to_string(LayerKind kind);

enum class Mode { train, eval };

inline constexpr double kLeakySlope = 0.01;
inline constexpr double kNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

// A trainable tensor and its gradient accumulator, same length.
struct ParamRef {
  std::span<double> value;
  std::span<double> grad;
};

// Per-layer state a forward pass leaves behind for backward.
struct LayerCache {
  Matrix input;
  Matrix output;
  Matrix normalized;            // norm layers: x-hat
  std::vector<double> inv_std;  // batchnorm: per feature, layernorm: per row
  Mode mode = Mode::train;
  bool valid = false;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual std::size_t in_dim() const = 0;
  virtual std::size_t out_dim() const = 0;

  // Train-mode forward may update running statistics.
  virtual Matrix forward(const Matrix& x, Mode mode, LayerCache& cache) = 0;
  // Side-effect free eval-mode forward; safe to call concurrently.
  virtual Matrix infer(const Matrix& x) const = 0;
  // Adds parameter gradients into the accumulators, returns d(loss)/d(input).
  virtual Matrix backward(const Matrix& grad_out, const LayerCache& cache) = 0;

  virtual std::vector<ParamRef> params() { return {}; }
  void zero_grad();

  virtual std::unique_ptr<Layer> clone() const = 0;
};

class Dense final : public Layer {
 public:
  // Weights uniform in +-sqrt(6 / (in + out)), biases zero.
  Dense(std::size_t in, std::size_t out, Rng& rng);
  Dense(Matrix weight, std::vector<double> bias);

  LayerKind kind() const override { return LayerKind::dense; }
  std::size_t in_dim() const override { return weight_.rows(); }
  std::size_t out_dim() const override { return weight_.cols(); }

  Matrix forward(const Matrix& x, Mode mode, LayerCache& cache) override;
  Matrix infer(const Matrix& x) const override;
  Matrix backward(const Matrix& grad_out, const LayerCache& cache) override;
  std::vector<ParamRef> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  const Matrix& weight() const { return weight_; }
  const std::vector<double>& bias() const { return bias_; }

 private:
  Matrix weight_;  // in x out
  std::vector<double> bias_;
  Matrix grad_weight_;
  std::vector<double> grad_bias_;
};

// Normalizes each feature over the batch (train) or with running statistics (eval).
class BatchNorm final : public Layer {
 public:
  explicit BatchNorm(std::size_t dim, double eps = kNormEpsilon,
                     double momentum = kBatchNormMomentum);

  LayerKind kind() const override { return LayerKind::batchnorm; }
  std::size_t in_dim() const override { return gamma_.size(); }
  std::size_t out_dim() const override { return gamma_.size(); }

  Matrix forward(const Matrix& x, Mode mode, LayerCache& cache) override;
  Matrix infer(const Matrix& x) const override;
  Matrix backward(const Matrix& grad_out, const LayerCache& cache) override;
  std::vector<ParamRef> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<BatchNorm>(*this); }

  double eps() const { return eps_; }
  double momentum() const { return momentum_; }
  std::vector<double>& gamma() { return gamma_; }
  std::vector<double>& beta() { return beta_; }
  std::vector<double>& running_mean() { return running_mean_; }
  std::vector<double>& running_var() { return running_var_; }
  const std::vector<double>& running_mean() const { return running_mean_; }
  const std::vector<double>& running_var() const { return running_var_; }

 private:
  double eps_;
  double momentum_;
  std::vector<double> gamma_, beta_;
  std::vector<double> running_mean_, running_var_;
  std::vector<double> grad_gamma_, grad_beta_;
};

// Normalizes each row over its features; identical in train and eval.
class LayerNorm final : public Layer {
 public:
  explicit LayerNorm(std::size_t dim, double eps = kNormEpsilon);

  LayerKind kind() const override { return LayerKind::layernorm; }
  std::size_t in_dim() const override { return gamma_.size(); }
  std::size_t out_dim() const override { return gamma_.size(); }

  Matrix forward(const Matrix& x, Mode mode, LayerCache& cache) override;
  Matrix infer(const Matrix& x) const override;
  Matrix backward(const Matrix& grad_out, const LayerCache& cache) override;
  std::vector<ParamRef> params() override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<LayerNorm>(*this); }

  double eps() const { return eps_; }
  std::vector<double>& gamma() { return gamma_; }
  std::vector<double>& beta() { return beta_; }

 private:
  Matrix normalize(const Matrix& x, std::vector<double>* inv_std, Matrix* xhat) const;

  double eps_;
  std::vector<double> gamma_, beta_;
  std::vector<double> grad_gamma_, grad_beta_;
};

// Parameter-free element-wise and row-wise activations.
class Activation final : public Layer {
 public:
  Activation(LayerKind kind, std::size_t dim, double slope = kLeakySlope);

  LayerKind kind() const override { return kind_; }
  std::size_t in_dim() const override { return dim_; }
  std::size_t out_dim() const override { return dim_; }
  double slope() const { return slope_; }

  Matrix forward(const Matrix& x, Mode mode, LayerCache& cache) override;
  Matrix infer(const Matrix& x) const override;
  Matrix backward(const Matrix& grad_out, const LayerCache& cache) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Activation>(*this); }

 private:
  LayerKind kind_;
  std::size_t dim_;
  double slope_;
};

Matrix softmax_rows(const Matrix& logits);
double sigmoid(double x);

}  // namespace imbaug::nn
