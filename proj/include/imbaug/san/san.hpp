#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "imbaug/nn/checkpoint.hpp"
#include "imbaug/nn/network.hpp"

namespace imbaug::san {

struct SanConfig {
  double margin = 1.0;
  double alpha = 1.0;  // weight of the contrastive term
  std::size_t epochs = 50;
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t pairs_per_epoch = 0;  // 0: one pair per training row (at least one batch)
  double dissimilar_fraction = 0.5;
  std::size_t code_dim = 16;
  std::vector<std::size_t> hidden{64, 32};  // encoder widths before the code; decoder mirrors
  std::uint64_t seed = 0;

  void validate() const;
};

// One encoder and one decoder. Both branches of the Siamese pair run through
// these same two networks, so the twins share a single parameter set.
struct SanModel {
  nn::Network encoder;
  nn::Network decoder;
  double margin = 1.0;
  double alpha = 1.0;

  std::size_t input_dim() const { return encoder.in_dim(); }
  std::size_t code_dim() const { return encoder.out_dim(); }
  void set_mode(nn::Mode mode);

  nn::Checkpoint to_checkpoint() const;
  static SanModel from_checkpoint(const nn::Checkpoint& ckpt);
};

// Encoder: Dense -> BatchNorm -> LeakyReLU per hidden width and for the code.
// Decoder mirrors it and ends in Dense -> Sigmoid.
SanModel make_san(std::size_t input_dim, const SanConfig& config);

struct PairBatch {
  Matrix first;
  Matrix second;
  std::vector<int> dissimilar;  // 0 similar, 1 dissimilar
  std::vector<std::pair<std::size_t, std::size_t>> rows;

  std::size_t size() const { return dissimilar.size(); }
  PairBatch slice(std::size_t begin, std::size_t end) const;
};

// round(pair_count * dissimilar_fraction) dissimilar pairs (two distinct
// classes drawn uniformly, then one row of each); the rest similar (a class
// with >= 2 rows drawn uniformly, then two distinct rows). Pair order is
// shuffled. Single-class data yields only similar pairs, with a warning.
PairBatch sample_pairs(const Matrix& data, std::span<const int> labels, std::size_t pair_count,
                       double dissimilar_fraction, std::uint64_t seed);

struct SanLoss {
  double total = 0.0;
  double reconstruction_first = 0.0;
  double reconstruction_second = 0.0;
  double contrastive = 0.0;
};

// L_AE(x1) + L_AE(x2) + alpha * L_contrastive, in the model's current mode.
SanLoss san_loss(SanModel& model, const PairBatch& batch);
// Same value; also accumulates parameter gradients (caller zeroes them).
SanLoss san_loss_backward(SanModel& model, const PairBatch& batch);

struct SanTrainResult {
  SanModel model;                   // eval mode
  std::vector<double> epoch_loss;   // mean batch loss per epoch
};

// Data must be normalized to [0, 1].
SanTrainResult train_san(const Matrix& data, std::span<const int> labels, const SanConfig& config);

// Codes in eval mode (running statistics), one row per input row.
Matrix encode(const SanModel& model, const Matrix& data);

}  // namespace imbaug::san
