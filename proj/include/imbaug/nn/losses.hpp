#pragma once

#include <span>
#include <vector>

#include "imbaug/matrix.hpp"

namespace imbaug::nn {

inline constexpr double kLogClamp = 1e-7;

struct LossValue {
  double value = 0.0;
  Matrix grad;  // d(value)/d(prediction)
};

struct PairLossValue {
  double value = 0.0;
  Matrix grad_first;
  Matrix grad_second;
  std::vector<double> distances;  // Euclidean distance per pair
};

// 0.5 * sum over pairs of (1 - y) * E^2 + y * max(0, margin - E)^2, where E is
// the Euclidean distance between matching rows; y = 0 similar, 1 dissimilar.
PairLossValue contrastive_loss(const Matrix& first, const Matrix& second,
                               std::span<const int> dissimilar, double margin);

// Mean over samples of the per-sample mean squared error; gradient is with
// respect to the reconstruction.
LossValue reconstruction_loss(const Matrix& target, const Matrix& reconstruction);

struct AdversarialLosses {
  double discriminator = 0.0;  // mean(-log D(x)) + mean(-log(1 - D(G(z|s))))
  double generator = 0.0;      // mean(-log D(G(z|s)))
};

// Scores are discriminator sigmoid outputs, clamped to [kLogClamp, 1 - kLogClamp].
AdversarialLosses adversarial_losses(std::span<const double> d_real, std::span<const double> d_fake);

// Gradients of the adversarial losses with respect to the scores.
std::vector<double> discriminator_real_grad(std::span<const double> d_real);
std::vector<double> discriminator_fake_grad(std::span<const double> d_fake);
std::vector<double> generator_grad(std::span<const double> d_fake);

// Categorical cross-entropy averaged over the batch; gradient with respect to probabilities.
LossValue cross_entropy_loss(const Matrix& probs, const Matrix& one_hot);

// d(cross-entropy(softmax(logits)))/d(logits) = (probs - targets) / batch.
Matrix softmax_cross_entropy_grad(const Matrix& probs, const Matrix& one_hot);

Matrix one_hot(std::span<const int> labels, std::size_t classes);

}  // namespace imbaug::nn
