#include "imbaug/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imbaug/error.hpp"

namespace imbaug::nn {
namespace {

double clamp_score(double d) { return std::clamp(d, kLogClamp, 1.0 - kLogClamp); }

double mean_neg_log(std::span<const double> scores, bool complement) {
  if (scores.empty()) return 0.0;
  double s = 0.0;
  for (double d : scores) {
    const double c = clamp_score(d);
    s += -std::log(complement ? 1.0 - c : c);
  }
  return s / static_cast<double>(scores.size());
}

void same_shape(const Matrix& a, const Matrix& b, const char* what) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::shape,
          std::string(what) + ": shape mismatch");
}

}  // namespace

PairLossValue contrastive_loss(const Matrix& first, const Matrix& second,
                               std::span<const int> dissimilar, double margin) {
  require(margin > 0.0, ErrorKind::config, "contrastive margin must be positive");
  same_shape(first, second, "contrastive_loss");
  require(dissimilar.size() == first.rows(), ErrorKind::shape,
          "contrastive_loss: one label per pair required");
  PairLossValue out;
  out.grad_first = Matrix(first.rows(), first.cols());
  out.grad_second = Matrix(first.rows(), first.cols());
  out.distances.resize(first.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < first.rows(); ++i) {
    const int y = dissimilar[i];
    require(y == 0 || y == 1, ErrorKind::input, "pair label must be 0 or 1");
    auto a = first.row(i);
    auto b = second.row(i);
    double sq = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
    const double dist = std::sqrt(sq);
    out.distances[i] = dist;
    // coeff multiplies (a - b) in d/da.
    double coeff = 0.0;
    if (y == 0) {
      total += sq;
      coeff = 1.0;
    } else if (dist < margin) {
      total += (margin - dist) * (margin - dist);
      coeff = dist > 0.0 ? -(margin - dist) / dist : 0.0;
    }
    auto ga = out.grad_first.row(i);
    auto gb = out.grad_second.row(i);
    for (std::size_t c = 0; c < a.size(); ++c) {
      ga[c] = coeff * (a[c] - b[c]);
      gb[c] = -ga[c];
    }
  }
  out.value = 0.5 * total;
  return out;
}

LossValue reconstruction_loss(const Matrix& target, const Matrix& reconstruction) {
  same_shape(target, reconstruction, "reconstruction_loss");
  LossValue out;
  out.grad = Matrix(target.rows(), target.cols());
  if (target.empty()) return out;
  const double scale = 1.0 / static_cast<double>(target.rows() * target.cols());
  auto t = target.values();
  auto r = reconstruction.values();
  auto g = out.grad.values();
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = r[i] - t[i];
    s += d * d;
    g[i] = 2.0 * d * scale;
  }
  out.value = s * scale;
  return out;
}

AdversarialLosses adversarial_losses(std::span<const double> d_real,
                                     std::span<const double> d_fake) {
  return {mean_neg_log(d_real, false) + mean_neg_log(d_fake, true), mean_neg_log(d_fake, false)};
}

std::vector<double> discriminator_real_grad(std::span<const double> d_real) {
  std::vector<double> g(d_real.size());
  const double n = static_cast<double>(d_real.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -1.0 / (clamp_score(d_real[i]) * n);
  return g;
}

std::vector<double> discriminator_fake_grad(std::span<const double> d_fake) {
  std::vector<double> g(d_fake.size());
  const double n = static_cast<double>(d_fake.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1.0 / ((1.0 - clamp_score(d_fake[i])) * n);
  return g;
}

std::vector<double> generator_grad(std::span<const double> d_fake) {
  return discriminator_real_grad(d_fake);
}

LossValue cross_entropy_loss(const Matrix& probs, const Matrix& targets) {
  same_shape(probs, targets, "cross_entropy_loss");
  LossValue out;
  out.grad = Matrix(probs.rows(), probs.cols());
  if (probs.empty()) return out;
  const double n = static_cast<double>(probs.rows());
  auto p = probs.values();
  auto t = targets.values();
  auto g = out.grad.values();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (t[i] == 0.0) continue;
    const double pc = std::max(p[i], kLogClamp);
    s += -t[i] * std::log(pc);
    g[i] = -t[i] / (pc * n);
  }
  out.value = s / n;
  return out;
}

Matrix softmax_cross_entropy_grad(const Matrix& probs, const Matrix& targets) {
  same_shape(probs, targets, "softmax_cross_entropy_grad");
  Matrix g(probs.rows(), probs.cols());
  if (probs.empty()) return g;
  const double n = static_cast<double>(probs.rows());
  for (std::size_t i = 0; i < g.size(); ++i)
    g.values()[i] = (probs.values()[i] - targets.values()[i]) / n;
  return g;
}

Matrix one_hot(std::span<const int> labels, std::size_t classes) {
  Matrix m(labels.size(), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < classes, ErrorKind::label,
            "label id " + std::to_string(labels[i]) + " outside " + std::to_string(classes));
    m(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  return m;
}

}  // namespace imbaug::nn
