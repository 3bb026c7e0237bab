#include <algorithm>
#include <fstream>
#include <sstream>

#include "imbaug/app/run.hpp"
#include "imbaug/data/csv.hpp"
#include "imbaug/data/labels.hpp"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/pipeline/run_store.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::app {
namespace {

std::vector<fs::path> input_files(const std::string& spec) {
  require(!spec.empty(), ErrorKind::config, "no input data given");
  std::vector<fs::path> files;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const fs::path p(std::string(data::trim(item)));
    if (p.empty()) continue;
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      require(!found.empty(), ErrorKind::input, "no .csv files in " + p.string());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      require(fs::is_regular_file(p), ErrorKind::config, "input file " + p.string() + " does not exist");
      files.push_back(p);
    }
  }
  require(!files.empty(), ErrorKind::config, "no input data given");
  return files;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t read_fingerprint(const fs::path& path) {
  const auto text = std::string(data::trim(read_text(path)));
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    fail(ErrorKind::format, "bad fingerprint in " + path.string());
  }
}

void write_pca(const fs::path& dir, const pipeline::AugmentedDataset& aug,
               const level::LevelPartition& levels) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < aug.data.rows(); ++i)
    if (levels.levels[static_cast<std::size_t>(aug.data.labels[i])] != level::Level::ample)
      rows.push_back(i);
  if (rows.size() < 2) return;
  const auto sub = aug.data.subset(rows);
  std::vector<std::string> tags;
  for (auto r : rows) tags.emplace_back(pipeline::to_string(aug.provenance[r]));
  try {
    const auto pca = eval::pca2d(sub.features);
    eval::write_pca_csv(dir / "pca.csv", pca, sub.labels, sub.label_names, tags);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate) throw;
    log::warn(std::string("skipping PCA projection: ") + e.what());
  }
}

}  // namespace

data::LoadResult load_input(const RunConfig& config) {
  data::LoadOptions opts;
  opts.label_column = config.label_column;
  opts.drop_non_finite = config.drop_non_finite;
  data::LoadResult total;
  bool first = true;
  for (const auto& file : input_files(config.data)) {
    auto part = data::load_dataset(file, opts);
    if (first) {
      total = std::move(part);
      first = false;
    } else {
      require(part.dataset.feature_names == total.dataset.feature_names, ErrorKind::schema,
              file.string() + " has different feature columns than the first input");
      // relabel into the accumulated dictionary
      for (std::size_t i = 0; i < part.dataset.rows(); ++i) {
        const auto& name = part.dataset.label_names[static_cast<std::size_t>(part.dataset.labels[i])];
        int id = total.dataset.label_id(name);
        if (id < 0) {
          total.dataset.label_names.push_back(name);
          id = static_cast<int>(total.dataset.label_names.size() - 1);
        }
        total.dataset.append(part.dataset.features.row(i), id);
      }
      total.report.rows_read += part.report.rows_read;
      total.report.rows_kept += part.report.rows_kept;
      total.report.dropped_non_numeric += part.report.dropped_non_numeric;
      total.report.dropped_non_finite += part.report.dropped_non_finite;
      total.report.dropped_wrong_width += part.report.dropped_wrong_width;
    }
  }
  if (config.mapping == "none") return total;
  const auto mapping = config.mapping == "builtin" ? data::LabelMapping::builtin()
                                                   : data::LabelMapping::load(config.mapping);
  total.dataset = data::map_labels(total.dataset, mapping, config.strict_mapping);
  return total;
}

Prepared prepare(const RunConfig& config) {
  config.validate();
  auto loaded = load_input(config);
  Prepared p;
  p.ingest = loaded.report;
  const auto& full = loaded.dataset;
  p.full_levels = level::level_classes(full.counts(), full.label_names, config.thresholds);

  data::SplitSpec spec{config.train_ratio, derive_seed(config.seed, "split"), config.stratified};
  auto split = data::stratified_split(full, spec);
  p.normalization = data::fit_minmax(split.train);
  p.train = data::apply_minmax(p.normalization, split.train);
  p.test = data::apply_minmax(p.normalization, split.test);
  p.test_fingerprint = data::fingerprint(p.test);
  return p;
}

void save_prepared(const fs::path& dir, const Prepared& p) {
  fs::create_directories(dir);
  data::write_dataset(dir / "train.csv", p.train);
  data::write_dataset(dir / "test.csv", p.test);
  data::save_normalization(dir / "normalization.csv", p.normalization);
  write_text(dir / "split_fingerprint.txt", std::to_string(p.test_fingerprint) + "\n");
  write_text(dir / "ingest.txt", p.ingest.summary() + "\n");
  level::write_level_report_csv(dir / "levels_full.csv", p.full_levels);
}

Prepared load_prepared(const fs::path& dir) {
  require(fs::exists(dir / "train.csv") && fs::exists(dir / "test.csv"), ErrorKind::io,
          dir.string() + " has no prepared split (run preprocess first)");
  Prepared p;
  p.full_levels = level::read_level_report_csv(dir / "levels_full.csv");
  data::LoadOptions opts;
  opts.known_labels = p.full_levels.names;
  opts.drop_non_finite = false;
  p.train = data::load_dataset(dir / "train.csv", opts).dataset;
  p.test = data::load_dataset(dir / "test.csv", opts).dataset;
  require(p.train.label_names == p.full_levels.names && p.test.label_names == p.full_levels.names,
          ErrorKind::label, "prepared files disagree on the label dictionary");
  p.normalization = data::load_normalization(dir / "normalization.csv");
  p.test_fingerprint = read_fingerprint(dir / "split_fingerprint.txt");
  return p;
}

level::LevelPartition augmentation_levels(const RunConfig& config, const Prepared& prepared) {
  const auto counts = prepared.train.counts();
  if (config.level_counts == "train")
    return level::level_classes(counts, prepared.train.label_names, config.thresholds);
  require(prepared.full_levels.names == prepared.train.label_names, ErrorKind::label,
          "full-data levels and training split disagree on the label dictionary");
  level::LevelPartition p =
      level::partition(prepared.full_levels.irs, config.thresholds, prepared.full_levels.names);
  p.counts = counts;
  p.targets = level::augmentation_targets(p, counts);
  return p;
}

eval::MetricsReport evaluate_classifier(const pipeline::ClassifierModel& model,
                                        const data::Dataset& test, std::uint64_t expected_fingerprint,
                                        const std::string& method, double beta) {
  require(data::fingerprint(test) == expected_fingerprint, ErrorKind::state,
          "test split fingerprint changed since the split was made");
  require(model.label_names == test.label_names, ErrorKind::label,
          "classifier and test set use different label dictionaries");
  const auto pred = pipeline::predict(model, test.features);
  return eval::evaluate(test.labels, pred.labels, test.label_names, method, beta);
}

RunOutcome run_all(const RunConfig& config) {
  config.validate();
  RunOutcome outcome;
  outcome.dir = config.run_dir();
  fs::create_directories(outcome.dir);
  write_text(outcome.dir / "config.txt", pipeline::format_key_values(config_to_kv(config)));

  const Prepared prepared = prepare(config);
  save_prepared(outcome.dir, prepared);
  const auto levels = augmentation_levels(config, prepared);

  pipeline::RunArtifacts art;
  art.config = config_to_kv(config);
  art.levels = levels;
  art.normalization = prepared.normalization;
  art.split_fingerprint = prepared.test_fingerprint;

  pipeline::AugmentOutput aug;
  try {
    aug = pipeline::build_augmented(prepared.train, levels, config.augment_config());
  } catch (const pipeline::PipelineError& e) {
    art.augmented = e.partial();
    pipeline::save_run(outcome.dir, art);
    write_text(outcome.dir / "error.txt", std::string(e.what()) + "\n");
    throw;
  }
  art.augmented = aug.augmented;
  art.san = aug.san;
  art.scgan = aug.scgan;
  art.stage_report = aug.report;

  auto trained = pipeline::train_classifier(aug.augmented.data, config.classifier_config());
  art.classifier = trained.model;
  art.classifier_loss = trained.epoch_loss;
  pipeline::save_run(outcome.dir, art);
  write_pca(outcome.dir, aug.augmented, levels);

  outcome.report = evaluate_classifier(trained.model, prepared.test, prepared.test_fingerprint,
                                       std::string(pipeline::to_string(config.method)), config.beta);
  eval::write_report(outcome.dir / "metrics", outcome.report);
  write_text(outcome.dir / "summary.txt", eval::summary_text(outcome.report));
  outcome.stages = std::move(aug.report);
  return outcome;
}

eval::DeltaTable compare_runs(const std::vector<fs::path>& run_dirs) {
  require(run_dirs.size() >= 2, ErrorKind::comparison, "comparison needs at least two runs");
  std::vector<eval::MetricsReport> reports;
  std::optional<std::uint64_t> fp;
  for (const auto& dir : run_dirs) {
    const auto cfg_path = dir / "config.txt";
    require(fs::exists(cfg_path), ErrorKind::comparison, dir.string() + " is not a run directory");
    const auto kv = pipeline::parse_key_values(read_text(cfg_path));
    const auto it = kv.find("method");
    std::string method = it != kv.end() ? it->second : dir.filename().string();
    const auto this_fp = read_fingerprint(dir / "split_fingerprint.txt");
    if (fp && *fp != this_fp)
      fail(ErrorKind::comparison, dir.string() + " was evaluated on a different test split");
    fp = this_fp;
    reports.push_back(eval::read_report(dir / "metrics", method));
  }
  std::size_t base = 0;
  for (std::size_t i = 0; i < reports.size(); ++i)
    if (reports[i].method == "baseline") {
      base = i;
      break;
    }
  std::vector<eval::MetricsReport> others;
  for (std::size_t i = 0; i < reports.size(); ++i)
    if (i != base) others.push_back(reports[i]);
  return eval::compare(reports[base], others);
}

}  // namespace imbaug::app
