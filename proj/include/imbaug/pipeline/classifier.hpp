#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imbaug/data/dataset.hpp"
#include "imbaug/nn/checkpoint.hpp"
#include "imbaug/nn/network.hpp"

namespace imbaug::pipeline {

struct ClassifierConfig {
  std::vector<std::size_t> hidden{128, 64, 32, 16};
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  double lr = 1e-3;
  std::size_t patience = 0;  // stop after this many epochs without loss improvement; 0 disables
  std::uint64_t seed = 0;

  void validate() const;
};

// Dense ReLU stack ending in softmax over the label dictionary.
struct ClassifierModel {
  nn::Network net;
  std::vector<std::string> label_names;

  nn::Checkpoint to_checkpoint() const;
  static ClassifierModel from_checkpoint(const nn::Checkpoint& ckpt);
};

struct ClassifierTrainResult {
  ClassifierModel model;
  std::vector<double> epoch_loss;  // mean batch cross-entropy per epoch
};

ClassifierTrainResult train_classifier(const data::Dataset& train, const ClassifierConfig& config);

struct Prediction {
  std::vector<int> labels;
  Matrix probabilities;
};

Prediction predict(const ClassifierModel& model, const Matrix& features);

// Index of the largest value; the lowest index wins ties.
int argmax(std::span<const double> values);

}  // namespace imbaug::pipeline
