#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "imbaug/gan/scgan.hpp"
#include "imbaug/level/leveling.hpp"
#include "imbaug/pipeline/augment.hpp"
#include "imbaug/pipeline/classifier.hpp"
#include "imbaug/san/san.hpp"

namespace imbaug::app {

// Everything a run depends on. Serialized as "key = value" lines; a snapshot
// written into the run directory reproduces the run when fed back in.
struct RunConfig {
  std::string data;  // CSV file, directory of CSVs, or comma-separated list
  std::string label_column = "Label";
  std::string mapping = "builtin";  // builtin, none, or a mapping file
  bool strict_mapping = false;
  bool drop_non_finite = true;

  double train_ratio = 0.8;
  bool stratified = true;

  level::Thresholds thresholds;
  std::string level_counts = "full";  // IRs from the full dataset or from the training split

  pipeline::Method method = pipeline::Method::s2cgan;
  san::SanConfig san;
  gan::ScganConfig scgan;
  gan::FilterPolicy filter;
  std::size_t skn_k = 5;
  pipeline::ClassifierConfig classifier;
  double beta = 1.0;

  std::uint64_t seed = 0;
  std::string out = "runs";
  std::string run_name;  // default "<method>-seed<seed>"

  void validate() const;
  std::filesystem::path run_dir() const;
  pipeline::AugmentConfig augment_config() const;
  pipeline::ClassifierConfig classifier_config() const;
};

// Unknown keys and malformed values are config errors.
RunConfig config_from_kv(const std::map<std::string, std::string>& kv, RunConfig base = {});
std::map<std::string, std::string> config_to_kv(const RunConfig& config);

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

}  // namespace imbaug::app
