#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imbaug/data/dataset.hpp"
#include "imbaug/error.hpp"
#include "imbaug/gan/scgan.hpp"
#include "imbaug/level/leveling.hpp"
#include "imbaug/san/san.hpp"
#include "imbaug/skn/skn.hpp"

namespace imbaug::pipeline {

enum class Method { baseline, ros, smote, s2cgan };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

// Where a row of the augmented set came from.
enum class Provenance { original, scgan, skn, ros, smote };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

struct AugmentConfig {
  Method method = Method::s2cgan;
  san::SanConfig san;
  gan::ScganConfig scgan;
  gan::FilterPolicy filter;
  std::size_t skn_k = 5;
  std::uint64_t seed = 0;
  // Reused instead of trained when present (GAN models keyed by class name).
  std::optional<san::SanModel> san_model;
  std::map<std::string, gan::ScganModel> scgan_models;
  // Stop after model training; no samples are generated.
  bool train_only = false;
};

// Original rows first, in their original order, then synthesized rows grouped
// by class id.
struct AugmentedDataset {
  data::Dataset data;
  std::vector<Provenance> provenance;

  std::vector<std::string> provenance_strings() const;
};

struct StageEntry {
  std::string stage;  // san, scgan-train, scgan-filter, skn, ros, smote
  std::string class_name;
  double seconds = 0.0;
  std::size_t generated = 0;
  std::size_t accepted = 0;
};

struct StageReport {
  std::vector<StageEntry> entries;
  std::vector<double> san_loss;
  std::map<std::string, gan::LossHistory> scgan_loss;  // by class name

  std::string text() const;
};

struct AugmentOutput {
  AugmentedDataset augmented;
  StageReport report;
  std::optional<san::SanModel> san;
  std::vector<gan::ScganModel> scgan;  // one per scarce class, class id order
};

// Raised when a per-class stage fails; carries everything built before it.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, std::string class_name, const std::string& cause,
                AugmentedDataset partial);

  const std::string& stage() const { return stage_; }
  const std::string& class_name() const { return class_name_; }
  const AugmentedDataset& partial() const { return *partial_; }

 private:
  std::string stage_;
  std::string class_name_;
  std::shared_ptr<AugmentedDataset> partial_;
};

// Targets for the baseline resamplers: every non-ample class is raised to the
// smallest ample count.
std::vector<std::size_t> resampler_targets(const level::LevelPartition& levels,
                                           std::span<const std::size_t> counts);

// SAN fitted on the scarce rows plus an equal-size uniform sample of ample rows.
san::SanTrainResult fit_san(const data::Dataset& train, const level::LevelPartition& levels,
                            const AugmentConfig& config);

// `train` must be normalized and `levels` computed for its classes (targets
// included). Scarce classes go through SAN + conditional GAN + filter, rare
// classes through neighbor interpolation; ample classes are untouched.
AugmentOutput build_augmented(const data::Dataset& train, const level::LevelPartition& levels,
                              const AugmentConfig& config);

}  // namespace imbaug::pipeline
