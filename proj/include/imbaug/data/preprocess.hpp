#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "imbaug/data/dataset.hpp"

namespace imbaug::data {

struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;
  bool fitted = false;

  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

// Per-feature min and max of the given (training) rows.
NormalizationParams fit_minmax(const Matrix& train);
NormalizationParams fit_minmax(const Dataset& train);

// (x - min) / (max - min), clamped to [0, 1]; constant features map to 0.
Matrix apply_minmax(const NormalizationParams& params, const Matrix& data);
Dataset apply_minmax(const NormalizationParams& params, const Dataset& data);

void save_normalization(const std::filesystem::path& path, const NormalizationParams& params);
NormalizationParams load_normalization(const std::filesystem::path& path);

struct SplitSpec {
  double train_ratio = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;

  void validate() const;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;  // ascending indices into the input
  std::vector<std::size_t> test_rows;
};

// floor(ratio * n + 0.5)
std::size_t train_count(std::size_t n, double ratio);

// Per class (or globally when not stratified) a seeded shuffle picks
// train_count(n_i, ratio) rows for training; the rest go to test. Both
// partitions keep the input row order. A class with a single sample goes to
// train with a warning.
SplitResult stratified_split(const Dataset& ds, const SplitSpec& spec);

}  // namespace imbaug::data
