#include "imbaug/san/san.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/nn/adam.hpp"
#include "imbaug/nn/losses.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::san {

void SanConfig::validate() const {
  require(margin > 0.0, ErrorKind::config, "SAN margin must be positive");
  require(alpha >= 0.0, ErrorKind::config, "SAN alpha must be non-negative");
  require(lr > 0.0, ErrorKind::config, "SAN learning rate must be positive");
  require(batch_size >= 2, ErrorKind::config, "SAN batch size must be at least 2");
  require(dissimilar_fraction >= 0.0 && dissimilar_fraction <= 1.0, ErrorKind::config,
          "dissimilar fraction must lie in [0, 1]");
  require(code_dim > 0, ErrorKind::config, "SAN code dimension must be positive");
}

void SanModel::set_mode(nn::Mode mode) {
  encoder.set_mode(mode);
  decoder.set_mode(mode);
}

nn::Checkpoint SanModel::to_checkpoint() const {
  nn::Checkpoint ckpt;
  ckpt.metadata["model"] = "san";
  ckpt.metadata["margin"] = data::format_double(margin);
  ckpt.metadata["alpha"] = data::format_double(alpha);
  ckpt.networks.emplace_back("encoder", encoder);
  ckpt.networks.emplace_back("decoder", decoder);
  return ckpt;
}

SanModel SanModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  require(ckpt.meta("model") == "san", ErrorKind::format, "checkpoint is not a SAN model");
  SanModel m;
  m.encoder = ckpt.network("encoder");
  m.decoder = ckpt.network("decoder");
  m.margin = data::parse_double(ckpt.meta("margin")).value_or(1.0);
  m.alpha = data::parse_double(ckpt.meta("alpha")).value_or(1.0);
  require(m.decoder.in_dim() == m.encoder.out_dim() && m.decoder.out_dim() == m.encoder.in_dim(),
          ErrorKind::format, "SAN encoder/decoder dimensions disagree");
  return m;
}

SanModel make_san(std::size_t input_dim, const SanConfig& config) {
  config.validate();
  require(input_dim > 0, ErrorKind::config, "SAN input dimension must be positive");
  Rng rng(derive_seed(config.seed, "san-init"));
  SanModel m;
  m.margin = config.margin;
  m.alpha = config.alpha;

  std::vector<std::size_t> widths{input_dim};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(config.code_dim);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    m.encoder.dense(widths[i], widths[i + 1], rng)
        .batchnorm(widths[i + 1])
        .activation(nn::LayerKind::leakyrelu, widths[i + 1]);
  }
  for (std::size_t i = widths.size() - 1; i > 1; --i) {
    m.decoder.dense(widths[i], widths[i - 1], rng)
        .batchnorm(widths[i - 1])
        .activation(nn::LayerKind::leakyrelu, widths[i - 1]);
  }
  m.decoder.dense(widths[1], input_dim, rng).activation(nn::LayerKind::sigmoid, input_dim);
  return m;
}

PairBatch PairBatch::slice(std::size_t begin, std::size_t end) const {
  PairBatch out;
  std::vector<std::size_t> idx;
  for (std::size_t i = begin; i < end; ++i) idx.push_back(i);
  out.first = select_rows(first, idx);
  out.second = select_rows(second, idx);
  out.dissimilar.assign(dissimilar.begin() + static_cast<std::ptrdiff_t>(begin),
                        dissimilar.begin() + static_cast<std::ptrdiff_t>(end));
  out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                  rows.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

PairBatch sample_pairs(const Matrix& data, std::span<const int> labels, std::size_t pair_count,
                       double dissimilar_fraction, std::uint64_t seed) {
  require(labels.size() == data.rows(), ErrorKind::shape, "one label per row required");
  require(data.rows() >= 2, ErrorKind::data, "pair sampling needs at least two rows");
  require(dissimilar_fraction >= 0.0 && dissimilar_fraction <= 1.0, ErrorKind::config,
          "dissimilar fraction must lie in [0, 1]");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<const std::vector<std::size_t>*> classes, pairable;
  for (const auto& [label, rows] : by_class) {
    classes.push_back(&rows);
    if (rows.size() >= 2) pairable.push_back(&rows);
  }

  auto n_dissimilar =
      static_cast<std::size_t>(std::llround(static_cast<double>(pair_count) * dissimilar_fraction));
  if (classes.size() < 2 && n_dissimilar > 0) {
    log::warn("pair sampling on single-class data; every pair is labeled similar");
    n_dissimilar = 0;
  }
  if (pairable.empty() && n_dissimilar < pair_count) {
    require(classes.size() >= 2, ErrorKind::data, "no class has two rows to form a similar pair");
    log::warn("no class has two rows; every pair is labeled dissimilar");
    n_dissimilar = pair_count;
  }

  Rng rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  std::vector<int> y;
  rows.reserve(pair_count);
  for (std::size_t p = 0; p < pair_count; ++p) {
    if (p < n_dissimilar) {
      const auto a = rng.uniform_index(classes.size());
      auto b = rng.uniform_index(classes.size() - 1);
      if (b >= a) ++b;
      const auto& ra = *classes[a];
      const auto& rb = *classes[b];
      rows.emplace_back(ra[rng.uniform_index(ra.size())], rb[rng.uniform_index(rb.size())]);
      y.push_back(1);
    } else {
      const auto& rc = *pairable[rng.uniform_index(pairable.size())];
      const auto i = rng.uniform_index(rc.size());
      auto j = rng.uniform_index(rc.size() - 1);
      if (j >= i) ++j;
      rows.emplace_back(rc[i], rc[j]);
      y.push_back(0);
    }
  }
  std::vector<std::size_t> order(pair_count);
  for (std::size_t i = 0; i < pair_count; ++i) order[i] = i;
  rng.shuffle(order.begin(), order.end());

  PairBatch batch;
  batch.first = Matrix(pair_count, data.cols());
  batch.second = Matrix(pair_count, data.cols());
  for (std::size_t k = 0; k < pair_count; ++k) {
    const auto& [a, b] = rows[order[k]];
    batch.rows.emplace_back(a, b);
    batch.dissimilar.push_back(y[order[k]]);
    std::copy(data.row(a).begin(), data.row(a).end(), batch.first.row(k).begin());
    std::copy(data.row(b).begin(), data.row(b).end(), batch.second.row(k).begin());
  }
  return batch;
}

namespace {

SanLoss run_pair(SanModel& model, const PairBatch& batch, bool with_grad) {
  require(batch.first.cols() == model.input_dim(), ErrorKind::shape,
          "SAN expects " + std::to_string(model.input_dim()) + " features");
  nn::Tape enc1, enc2, dec1, dec2;
  const Matrix code1 = model.encoder.forward(batch.first, enc1);
  const Matrix code2 = model.encoder.forward(batch.second, enc2);
  const Matrix recon1 = model.decoder.forward(code1, dec1);
  const Matrix recon2 = model.decoder.forward(code2, dec2);

  const auto ae1 = nn::reconstruction_loss(batch.first, recon1);
  const auto ae2 = nn::reconstruction_loss(batch.second, recon2);
  const auto snn = nn::contrastive_loss(code1, code2, batch.dissimilar, model.margin);

  SanLoss loss{ae1.value + ae2.value + model.alpha * snn.value, ae1.value, ae2.value, snn.value};
  if (!with_grad) return loss;

  Matrix g1 = model.decoder.backward(dec1, ae1.grad);
  Matrix g2 = model.decoder.backward(dec2, ae2.grad);
  for (std::size_t i = 0; i < g1.size(); ++i) {
    g1.values()[i] += model.alpha * snn.grad_first.values()[i];
    g2.values()[i] += model.alpha * snn.grad_second.values()[i];
  }
  model.encoder.backward(enc1, g1);
  model.encoder.backward(enc2, g2);
  return loss;
}

}  // namespace

SanLoss san_loss(SanModel& model, const PairBatch& batch) { return run_pair(model, batch, false); }

SanLoss san_loss_backward(SanModel& model, const PairBatch& batch) {
  return run_pair(model, batch, true);
}

namespace {

// Running statistics trail the weights during training; re-estimate them on
// training-sized batches so eval-mode codes match what training saw.
void recalibrate(SanModel& model, const Matrix& data, const SanConfig& config) {
  constexpr std::size_t kBatches = 32;
  Rng rng(derive_seed(config.seed, "san-bn"));
  const std::size_t rows = std::min(config.batch_size, data.rows());
  std::vector<Matrix> batches;
  for (std::size_t i = 0; i < kBatches; ++i) {
    std::vector<std::size_t> idx(rows);
    for (auto& r : idx) r = rng.uniform_index(data.rows());
    batches.push_back(select_rows(data, idx));
  }
  model.encoder.recalibrate_batchnorm(batches);
  for (auto& b : batches) b = model.encoder.infer(b);
  model.decoder.recalibrate_batchnorm(batches);
}

}  // namespace

SanTrainResult train_san(const Matrix& data, std::span<const int> labels, const SanConfig& config) {
  config.validate();
  require(data.rows() >= 2, ErrorKind::data, "SAN training needs at least two rows");
  SanTrainResult result{make_san(data.cols(), config), {}};
  SanModel& model = result.model;
  model.set_mode(nn::Mode::train);

  auto params = model.encoder.params();
  {
    auto dp = model.decoder.params();
    params.insert(params.end(), dp.begin(), dp.end());
  }
  nn::AdamState adam(nn::AdamConfig{.lr = config.lr});
  const std::size_t pairs =
      config.pairs_per_epoch > 0 ? config.pairs_per_epoch : std::max(data.rows(), config.batch_size);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto all = sample_pairs(data, labels, pairs, config.dissimilar_fraction,
                                  derive_seed(config.seed, "san-pairs", epoch));
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < all.size(); b += config.batch_size) {
      const std::size_t e = std::min(all.size(), b + config.batch_size);
      if (e - b < 2) continue;
      const auto batch = all.slice(b, e);
      model.encoder.zero_grad();
      model.decoder.zero_grad();
      const auto loss = san_loss_backward(model, batch);
      require(std::isfinite(loss.total), ErrorKind::diverged,
              "SAN loss became non-finite in epoch " + std::to_string(epoch + 1));
      nn::adam_step(adam, params);
      sum += loss.total;
      ++batches;
    }
    result.epoch_loss.push_back(batches ? sum / static_cast<double>(batches) : 0.0);
  }
  if (config.epochs > 0) recalibrate(model, data, config);
  model.set_mode(nn::Mode::eval);
  return result;
}

Matrix encode(const SanModel& model, const Matrix& data) {
  require(data.cols() == model.input_dim(), ErrorKind::shape,
          "SAN expects " + std::to_string(model.input_dim()) + " features, got " +
              std::to_string(data.cols()));
  return model.encoder.infer(data);
}

}  // namespace imbaug::san
