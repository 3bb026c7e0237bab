#include "imbaug/pipeline/classifier.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/nn/adam.hpp"
#include "imbaug/nn/losses.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::pipeline {

void ClassifierConfig::validate() const {
  require(epochs <= 100, ErrorKind::config, "classifier epochs are capped at 100");
  require(batch_size >= 1, ErrorKind::config, "classifier batch size must be positive");
  require(lr > 0.0, ErrorKind::config, "classifier learning rate must be positive");
}

nn::Checkpoint ClassifierModel::to_checkpoint() const {
  nn::Checkpoint ckpt;
  ckpt.metadata["model"] = "classifier";
  std::string labels;
  for (std::size_t i = 0; i < label_names.size(); ++i) {
    if (i) labels += '\n';
    labels += label_names[i];
  }
  ckpt.metadata["labels"] = labels;
  ckpt.networks.emplace_back("net", net);
  return ckpt;
}

ClassifierModel ClassifierModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  require(ckpt.meta("model") == "classifier", ErrorKind::format, "checkpoint is not a classifier");
  ClassifierModel m;
  m.net = ckpt.network("net");
  const auto& labels = ckpt.meta("labels");
  std::size_t start = 0;
  while (start <= labels.size()) {
    const auto end = labels.find('\n', start);
    m.label_names.push_back(labels.substr(start, end == std::string::npos ? end : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  require(m.label_names.size() == m.net.out_dim(), ErrorKind::format,
          "classifier label dictionary does not match its output width");
  return m;
}

int argmax(std::span<const double> values) {
  require(!values.empty(), ErrorKind::input, "argmax of an empty row");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<int>(best);
}

ClassifierTrainResult train_classifier(const data::Dataset& train, const ClassifierConfig& config) {
  config.validate();
  train.validate();
  require(train.rows() > 0, ErrorKind::data, "no training rows");
  require(train.class_count() >= 2, ErrorKind::data, "classification needs at least two classes");

  Rng init(derive_seed(config.seed, "clf-init"));
  ClassifierTrainResult result;
  auto& net = result.model.net;
  result.model.label_names = train.label_names;
  std::size_t width = train.cols();
  for (auto h : config.hidden) {
    net.dense(width, h, init).activation(nn::LayerKind::relu, h);
    width = h;
  }
  const std::size_t classes = train.class_count();
  net.dense(width, classes, init).activation(nn::LayerKind::softmax, classes);

  nn::AdamState adam(nn::AdamConfig{.lr = config.lr});
  const auto params = net.params();
  std::vector<std::size_t> order(train.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, "clf-shuffle", epoch));
    rng.shuffle(order.begin(), order.end());
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + b, e - b);
      const Matrix x = select_rows(train.features, idx);
      std::vector<int> y(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) y[i] = train.labels[idx[i]];
      const Matrix target = nn::one_hot(y, classes);

      net.zero_grad();
      const Matrix probs = net.forward(x);
      const auto loss = nn::cross_entropy_loss(probs, target);
      require(std::isfinite(loss.value), ErrorKind::diverged,
              "classifier loss became non-finite in epoch " + std::to_string(epoch + 1));
      net.backward(nn::softmax_cross_entropy_grad(probs, target), 1);
      nn::adam_step(adam, params);
      sum += loss.value;
      ++batches;
    }
    const double mean = sum / static_cast<double>(batches);
    result.epoch_loss.push_back(mean);
    if (config.patience > 0) {
      if (mean < best - 1e-6) {
        best = mean;
        stale = 0;
      } else if (++stale >= config.patience) {
        log::info("classifier stopped early after epoch " + std::to_string(epoch + 1));
        break;
      }
    }
  }
  net.set_mode(nn::Mode::eval);
  return result;
}

Prediction predict(const ClassifierModel& model, const Matrix& features) {
  require(features.cols() == model.net.in_dim(), ErrorKind::shape,
          "classifier expects " + std::to_string(model.net.in_dim()) + " features, got " +
              std::to_string(features.cols()));
  Prediction p;
  p.probabilities = features.rows() ? model.net.infer(features) : Matrix(0, model.net.out_dim());
  p.labels.reserve(features.rows());
  for (std::size_t i = 0; i < p.probabilities.rows(); ++i) p.labels.push_back(argmax(p.probabilities.row(i)));
  return p;
}

}  // namespace imbaug::pipeline
