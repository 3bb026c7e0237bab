#include "imbaug/nn/adam.hpp"

#include <cmath>

#include "imbaug/error.hpp"

namespace imbaug::nn {

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  const auto& cfg = state.config;
  require(cfg.lr > 0.0 && cfg.beta1 > 0.0 && cfg.beta1 < 1.0 && cfg.beta2 > 0.0 &&
              cfg.beta2 < 1.0 && cfg.epsilon > 0.0,
          ErrorKind::config, "invalid Adam hyperparameters");
  require(params.size() == grads.size(), ErrorKind::shape, "adam: params/grads count mismatch");
  if (state.first_moment.empty() && state.step == 0) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  require(state.first_moment.size() == params.size(), ErrorKind::shape,
          "adam: parameter list changed shape");
  for (std::size_t i = 0; i < params.size(); ++i)
    require(params[i].size() == grads[i].size() && params[i].size() == state.first_moment[i].size(),
            ErrorKind::shape, "adam: tensor shape mismatch");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    auto p = params[i];
    auto g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

void adam_step(AdamState& state, std::span<const ParamRef> params) {
  std::vector<std::span<double>> values;
  std::vector<std::span<const double>> grads;
  values.reserve(params.size());
  grads.reserve(params.size());
  for (const auto& p : params) {
    values.push_back(p.value);
    grads.emplace_back(p.grad.data(), p.grad.size());
  }
  adam_step(state, values, grads);
}

}  // namespace imbaug::nn
