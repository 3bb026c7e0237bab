#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "imbaug/matrix.hpp"

namespace imbaug::skn {

// k nearest other rows of `points` to row `query` (Euclidean), nearest first,
// ties broken by lower row index. k larger than rows - 1 is clamped with a
// warning; fewer than two rows is a neighbor error.
std::vector<std::size_t> knn(const Matrix& points, std::size_t query, std::size_t k);

struct KnnIndex {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> neighbors;  // per row
};

KnnIndex build_knn_index(const Matrix& points, std::size_t k);

struct SknConfig {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  // Pins the interpolation weight instead of drawing it (tests, ablations).
  std::optional<double> fixed_lambda;
};

struct SknDraw {
  std::size_t source = 0;
  std::size_t neighbor = 0;
  double lambda = 0.0;
};

struct SknResult {
  Matrix samples;
  std::vector<SknDraw> draws;  // one per sample; empty for the single-sample fallback
};

// Produces `count` rows x_i + lambda * (x_j - x_i): sources cycle through the
// class rows in order, x_j is drawn uniformly from the source's k nearest
// same-class neighbors, lambda uniformly from [0, 1). A class with one row
// falls back to copies of it with uniform +-1e-3 jitter clipped to [0, 1].
SknResult skn_synthesize(const Matrix& class_points, std::size_t count, const SknConfig& config);

}  // namespace imbaug::skn
