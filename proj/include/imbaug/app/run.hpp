#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "imbaug/app/config.hpp"
#include "imbaug/data/dataset.hpp"
#include "imbaug/data/preprocess.hpp"
#include "imbaug/eval/metrics.hpp"
#include "imbaug/level/leveling.hpp"
#include "imbaug/pipeline/augment.hpp"
#include "imbaug/pipeline/classifier.hpp"

namespace imbaug::app {

namespace fs = std::filesystem;

struct Prepared {
  data::Dataset train;  // normalized
  data::Dataset test;   // normalized
  data::NormalizationParams normalization;
  std::uint64_t test_fingerprint = 0;
  data::IngestReport ingest;
  level::LevelPartition full_levels;  // over the whole mapped dataset
};

// Loads every input file (same columns required), then applies the label mapping.
data::LoadResult load_input(const RunConfig& config);

// load_input, leveling on the full data, stratified split, min-max fit on train.
Prepared prepare(const RunConfig& config);

// train.csv, test.csv, normalization.csv, split_fingerprint.txt, ingest.txt, levels_full.csv
void save_prepared(const fs::path& dir, const Prepared& prepared);
Prepared load_prepared(const fs::path& dir);

// Levels from the configured IR source; targets from the training counts.
level::LevelPartition augmentation_levels(const RunConfig& config, const Prepared& prepared);

// Checks the test fingerprint and the label dictionary before scoring.
eval::MetricsReport evaluate_classifier(const pipeline::ClassifierModel& model,
                                        const data::Dataset& test, std::uint64_t expected_fingerprint,
                                        const std::string& method, double beta);

struct RunOutcome {
  fs::path dir;
  eval::MetricsReport report;
  pipeline::StageReport stages;
};

// Every stage end to end; artifacts go to config.run_dir().
RunOutcome run_all(const RunConfig& config);

// The baseline run (method baseline, else the first) against the others.
// Runs must share a split fingerprint.
eval::DeltaTable compare_runs(const std::vector<fs::path>& run_dirs);

}  // namespace imbaug::app
