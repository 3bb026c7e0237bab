#include "imbaug/nn/network.hpp"

#include <string>

#include "imbaug/error.hpp"

namespace imbaug::nn {

Network::Network(const Network& other) : mode_(other.mode_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Network& Network::add(std::unique_ptr<Layer> layer) {
  require(layer != nullptr, ErrorKind::config, "null layer");
  if (!layers_.empty()) {
    require(layers_.back()->out_dim() == layer->in_dim(), ErrorKind::shape,
            "layer " + std::to_string(layers_.size()) + " expects " +
                std::to_string(layer->in_dim()) + " inputs but previous layer emits " +
                std::to_string(layers_.back()->out_dim()));
  }
  layers_.push_back(std::move(layer));
  tape_.clear();
  return *this;
}

Network& Network::dense(std::size_t in, std::size_t out, Rng& rng) {
  return add(std::make_unique<Dense>(in, out, rng));
}
Network& Network::batchnorm(std::size_t dim) { return add(std::make_unique<BatchNorm>(dim)); }
Network& Network::layernorm(std::size_t dim) { return add(std::make_unique<LayerNorm>(dim)); }
Network& Network::activation(LayerKind kind, std::size_t dim) {
  return add(std::make_unique<Activation>(kind, dim));
}

std::size_t Network::in_dim() const { return layers_.empty() ? 0 : layers_.front()->in_dim(); }
std::size_t Network::out_dim() const { return layers_.empty() ? 0 : layers_.back()->out_dim(); }

void Network::check_batch(const Matrix& batch) const {
  require(!layers_.empty(), ErrorKind::state, "forward on an empty network");
  require(batch.cols() == in_dim(), ErrorKind::shape,
          "network expects " + std::to_string(in_dim()) + " input columns, got " +
              std::to_string(batch.cols()));
  require(batch.all_finite(), ErrorKind::input, "non-finite value in network input");
}

Matrix Network::forward(const Matrix& batch) { return forward(batch, tape_); }

Matrix Network::forward(const Matrix& batch, Tape& tape) {
  check_batch(batch);
  tape.caches_.assign(layers_.size(), LayerCache{});
  Matrix x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) x = layers_[i]->forward(x, mode_, tape.caches_[i]);
  return x;
}

Matrix Network::infer(const Matrix& batch) const {
  check_batch(batch);
  Matrix x = batch;
  for (const auto& l : layers_) x = l->infer(x);
  return x;
}

Matrix Network::backward(const Matrix& upstream, std::size_t skip_last) {
  return backward(tape_, upstream, skip_last);
}

Matrix Network::backward(const Tape& tape, const Matrix& upstream, std::size_t skip_last) {
  require(tape.caches_.size() == layers_.size() && !layers_.empty(), ErrorKind::state,
          "backward called without a matching forward pass");
  require(skip_last < layers_.size(), ErrorKind::config, "skip_last covers every layer");
  Matrix g = upstream;
  for (std::size_t i = layers_.size() - skip_last; i-- > 0;)
    g = layers_[i]->backward(g, tape.caches_[i]);
  return g;
}

void Network::recalibrate_batchnorm(const std::vector<Matrix>& batches) {
  require(!batches.empty(), ErrorKind::input, "batchnorm recalibration needs at least one batch");
  std::vector<Matrix> acts;
  for (const auto& b : batches) {
    check_batch(b);
    require(b.rows() >= 2, ErrorKind::input, "recalibration batches need at least two rows");
    acts.push_back(b);
  }
  const double nb = static_cast<double>(acts.size());
  for (auto& layer : layers_) {
    auto* bn = dynamic_cast<BatchNorm*>(layer.get());
    if (!bn) {
      for (auto& a : acts) a = layer->infer(a);
      continue;
    }
    const std::size_t d = bn->in_dim();
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (auto& a : acts) {
      const double n = static_cast<double>(a.rows());
      for (std::size_t c = 0; c < d; ++c) {
        double m = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) m += a(r, c);
        m /= n;
        double v = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) v += (a(r, c) - m) * (a(r, c) - m);
        mean[c] += m / nb;
        var[c] += v / (n - 1.0) / nb;
      }
      LayerCache cache;
      a = bn->forward(a, Mode::train, cache);
    }
    bn->running_mean() = mean;
    bn->running_var() = var;
  }
}

void Network::zero_grad() {
  for (auto& l : layers_) l->zero_grad();
}

std::vector<ParamRef> Network::params() {
  std::vector<ParamRef> out;
  for (auto& l : layers_) {
    auto p = l->params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (const auto& p : params()) n += p.value.size();
  return n;
}

}  // namespace imbaug::nn
