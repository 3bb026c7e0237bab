#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imbaug/matrix.hpp"

namespace imbaug::data {

// Flow-feature table: one row per flow, one integer class id per row, and a
// dictionary from id to label string.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> label_names;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return features.rows(); }
  std::size_t cols() const { return features.cols(); }
  std::size_t class_count() const { return label_names.size(); }
  std::vector<std::size_t> counts() const;
  // -1 when absent.
  int label_id(std::string_view name) const;
  std::vector<std::size_t> rows_of(int label) const;

  Dataset subset(std::span<const std::size_t> rows) const;
  // Same schema and label dictionary, no rows.
  Dataset empty_like() const;
  void append(std::span<const double> row, int label);

  // Throws data error when the invariants do not hold.
  void validate() const;
};

struct LoadOptions {
  std::string label_column = "Label";
  bool drop_non_finite = true;
  // Columns skipped entirely, e.g. the provenance column of an augmented file.
  std::vector<std::string> ignore_columns{"Provenance"};
  // Pre-assigned label ids (in order); unseen labels are appended after them.
  std::vector<std::string> known_labels;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t dropped_non_numeric = 0;
  std::size_t dropped_non_finite = 0;
  std::size_t dropped_wrong_width = 0;

  std::size_t dropped() const {
    return dropped_non_numeric + dropped_non_finite + dropped_wrong_width;
  }
  std::string summary() const;
};

struct LoadResult {
  Dataset dataset;
  IngestReport report;
};

LoadResult load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});
LoadResult parse_dataset(std::istream& in, const LoadOptions& options = {});

// Writes header + rows; values use the shortest round-trip representation.
// provenance, when non-empty, becomes a trailing "Provenance" column.
void write_dataset(const std::filesystem::path& path, const Dataset& ds,
                   std::string_view label_column = "Label",
                   std::span<const std::string> provenance = {});
void write_dataset(std::ostream& out, const Dataset& ds, std::string_view label_column = "Label",
                   std::span<const std::string> provenance = {});

// FNV-1a over the feature bits, label strings and row order.
std::uint64_t fingerprint(const Dataset& ds);

}  // namespace imbaug::data
