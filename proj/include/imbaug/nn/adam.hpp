#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imbaug/nn/layers.hpp"

namespace imbaug::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment buffers are created on the first step and must keep their shapes.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  AdamState() = default;
  explicit AdamState(AdamConfig cfg) : config(cfg) {}
};

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);
void adam_step(AdamState& state, std::span<const ParamRef> params);

}  // namespace imbaug::nn
