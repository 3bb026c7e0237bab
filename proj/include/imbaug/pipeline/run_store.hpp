#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imbaug/data/preprocess.hpp"
#include "imbaug/gan/scgan.hpp"
#include "imbaug/level/leveling.hpp"
#include "imbaug/pipeline/augment.hpp"
#include "imbaug/pipeline/classifier.hpp"
#include "imbaug/san/san.hpp"

namespace imbaug::pipeline {

inline constexpr int kRunFormatVersion = 1;

// Everything a run directory can hold. Absent members are simply not written.
struct RunArtifacts {
  std::map<std::string, std::string> config;
  std::optional<level::LevelPartition> levels;
  std::optional<data::NormalizationParams> normalization;
  std::optional<std::uint64_t> split_fingerprint;
  std::optional<san::SanModel> san;
  std::vector<gan::ScganModel> scgan;
  std::optional<ClassifierModel> classifier;
  std::optional<AugmentedDataset> augmented;
  std::optional<StageReport> stage_report;
  std::vector<double> classifier_loss;
};

// Layout:
//   manifest.txt            "imbaug-run <version>"
//   config.txt              key = value, sorted
//   levels.txt, levels.csv
//   normalization.csv       feature,min,max
//   split_fingerprint.txt
//   san.ckpt, scgan_<class>.ckpt, classifier.ckpt
//   augmented.csv           features, Label, Provenance
//   san_loss.csv, scgan_loss_<class>.csv, classifier_loss.csv
//   stage_report.txt
void save_run(const std::filesystem::path& dir, const RunArtifacts& run);
RunArtifacts load_run(const std::filesystem::path& dir);

// Class name reduced to [A-Za-z0-9_-] for use in file names.
std::string file_stem(const std::string& class_name);

std::map<std::string, std::string> parse_key_values(const std::string& text);
std::string format_key_values(const std::map<std::string, std::string>& kv);

AugmentedDataset load_augmented(const std::filesystem::path& path,
                                const std::vector<std::string>& known_labels = {});

}  // namespace imbaug::pipeline
