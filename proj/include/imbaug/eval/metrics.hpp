#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imbaug/matrix.hpp"

namespace imbaug::eval {

// counts[t][p]: rows of true class t predicted as p.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t size() const { return classes.size(); }
  std::uint64_t total() const;
  std::uint64_t support(std::size_t c) const;    // row sum
  std::uint64_t predicted(std::size_t c) const;  // column sum
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                          const std::vector<std::string>& classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  std::uint64_t support = 0;
};

// (1 + b^2) P R / (b^2 P + R); 0 when both are 0.
double f_beta(double precision, double recall, double beta);

// Any 0/0 ratio is reported as 0.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm, double beta = 1.0);

struct Aggregate {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
};

struct Aggregates {
  Aggregate weighted;  // support-weighted mean of the per-class values
  Aggregate macro;     // unweighted mean
};

Aggregates aggregate(std::span<const ClassMetrics> per_class);

struct MetricsReport {
  std::string method;
  double beta = 1.0;
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> per_class;
  Aggregates totals;

  const std::vector<std::string>& classes() const { return confusion.classes; }
};

MetricsReport evaluate(std::span<const int> truth, std::span<const int> predicted,
                       const std::vector<std::string>& classes, const std::string& method,
                       double beta = 1.0);

// Per-class and aggregate differences of each method against the baseline.
struct DeltaRow {
  std::string method;
  std::vector<ClassMetrics> per_class;  // method minus baseline (support copied)
  Aggregates totals;
};

struct DeltaTable {
  std::string baseline;
  std::vector<std::string> classes;
  std::vector<DeltaRow> rows;
};

// Every report must cover the same classes in the same order (report error otherwise).
DeltaTable compare(const MetricsReport& baseline, std::span<const MetricsReport> others);

struct Pca2d {
  std::vector<double> mean;
  std::array<std::vector<double>, 2> components;  // unit vectors
  std::array<double, 2> variance{};               // eigenvalues of the covariance
  Matrix projection;                              // rows x 2
};

// Top-2 principal components by power iteration with deflation. Each
// component's sign makes its first nonzero entry positive. Fewer than two
// rows or fewer than two non-constant directions is a degenerate error.
Pca2d pca2d(const Matrix& data);
Matrix project(const Pca2d& pca, const Matrix& data);

// CSV/text writers; all numbers use the shortest round-trip format.
void write_per_class_csv(const std::filesystem::path& path, const MetricsReport& report);
void write_aggregate_csv(const std::filesystem::path& path, const MetricsReport& report);
void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm);
void write_delta_csv(const std::filesystem::path& path, const DeltaTable& table);
void write_pca_csv(const std::filesystem::path& path, const Pca2d& pca, std::span<const int> labels,
                   const std::vector<std::string>& classes, std::span<const std::string> tags = {});
std::string summary_text(const MetricsReport& report);
std::string delta_text(const DeltaTable& table);

// Rebuilds a report from per_class.csv and confusion.csv in a run directory.
MetricsReport read_report(const std::filesystem::path& dir, const std::string& method);
void write_report(const std::filesystem::path& dir, const MetricsReport& report);

}  // namespace imbaug::eval
