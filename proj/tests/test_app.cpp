#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "imbaug/app/config.hpp"
#include "imbaug/app/run.hpp"
#include "imbaug/app/synthbench.hpp"
#include "imbaug/data/dataset.hpp"
#include "imbaug/error.hpp"
#include "imbaug/level/leveling.hpp"
#include "imbaug/log.hpp"

using namespace imbaug;
using namespace imbaug::app;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::state;
}

// A quick run configuration on a small synthetic table.
RunConfig small_run(const fs::path& root, const std::string& name, std::uint64_t seed) {
  SynthSpec spec;
  spec.counts = {600, 30, 6};
  spec.dim = 5;
  spec.seed = 1;
  const auto csv = root / "bench.csv";
  if (!fs::exists(csv)) data::write_dataset(csv, synthesize_benchmark(spec));

  RunConfig c;
  c.data = csv.string();
  c.mapping = "none";
  c.thresholds.scarce_min_ir = 10.0;
  c.thresholds.rare_min_ir = 50.0;
  c.san.epochs = 2;
  c.san.hidden = {8};
  c.san.code_dim = 4;
  c.scgan.epochs = 10;
  c.scgan.noise_dim = 4;
  c.classifier.epochs = 3;
  c.classifier.hidden = {16};
  c.seed = seed;
  c.out = root.string();
  c.run_name = name;
  return c;
}

}  // namespace

TEST_CASE("config key-value round trip") {
  RunConfig c;
  c.seed = 42;
  c.method = pipeline::Method::smote;
  c.scgan.epochs = 12;
  c.filter.eta = 0.3;
  c.thresholds.overrides["Bot"] = level::Level::rare;
  c.classifier.hidden = {32, 8};
  const auto kv = config_to_kv(c);
  const auto back = config_from_kv(kv);
  CHECK(config_to_kv(back) == kv);
  CHECK(back.seed == 42);
  CHECK(back.method == pipeline::Method::smote);
  CHECK(back.scgan.epochs == 12);
  CHECK(back.filter.eta == 0.3);
  CHECK(back.thresholds.overrides.at("Bot") == level::Level::rare);
}

TEST_CASE("config errors") {
  CHECK(kind_of([] { config_from_kv({{"scgan.epochz", "3"}}); }) == ErrorKind::config);
  CHECK(kind_of([] { config_from_kv({{"train_ratio", "1.5"}}).validate(); }) == ErrorKind::config);
  CHECK(kind_of([] { config_from_kv({{"seed", "abc"}}); }) == ErrorKind::config);
  CHECK(kind_of([] { config_from_kv({{"method", "gan"}}); }) == ErrorKind::config);
  CHECK(kind_of([] { config_from_kv({{"clf.epochs", "101"}}).validate(); }) == ErrorKind::config);

  const auto path = fs::temp_directory_path() / "imbaug_cfg_test.txt";
  {
    std::ofstream out(path);
    out << "# quick\nseed = 7\nscgan.epochs = 5\n";
  }
  const auto c = load_config_file(path);
  CHECK(c.seed == 7);
  CHECK(c.scgan.epochs == 5);
  CHECK(c.san.epochs == san::SanConfig{}.epochs);
  fs::remove(path);
}

TEST_CASE("synthetic benchmark counts, ratios and determinism") {
  SynthSpec spec;
  spec.counts = {20000, 100, 10};
  spec.seed = 3;
  const auto ds = synthesize_benchmark(spec);
  CHECK(ds.counts() == std::vector<std::size_t>{20000, 100, 10});
  const auto counts = ds.counts();
  CHECK(level::imbalance_ratios(counts) == std::vector<double>{1.0, 200.0, 2000.0});
  CHECK(ds.label_names == std::vector<std::string>{"C0", "C1", "C2"});
  CHECK(synthesize_benchmark(spec).features == ds.features);
  spec.seed = 4;
  CHECK_FALSE(synthesize_benchmark(spec).features == ds.features);

  spec.counts = {50, 5};
  spec.dim = 78;
  const auto wide = synthesize_benchmark(spec);
  CHECK(wide.cols() == 78);
  CHECK(wide.feature_names.size() == 78);

  const auto parsed = synth_spec_from_text("counts = 10, 5\nnames = A, B\nseparation = 2\n");
  CHECK(parsed.counts == std::vector<std::size_t>{10, 5});
  CHECK(parsed.names == std::vector<std::string>{"A", "B"});
  CHECK(parsed.separation == 2.0);
  CHECK_THROWS_AS(synth_spec_from_text("colour = red\n"), Error);
  spec.counts = {};
  CHECK_THROWS_AS(synthesize_benchmark(spec), Error);
}

TEST_CASE("run_all writes a complete, reloadable run and compares runs") {
  const auto root = fs::temp_directory_path() / "imbaug_app_run_test";
  fs::remove_all(root);
  fs::create_directories(root);
  log::Capture quiet;

  auto cfg = small_run(root, "s2cgan", 5);
  const auto run = run_all(cfg);
  CHECK(run.dir == root / "s2cgan");
  for (const char* f : {"manifest.txt", "config.txt", "levels.csv", "augmented.csv", "classifier.ckpt", "san.ckpt",
                        "summary.txt", "pca.csv", "metrics/per_class.csv", "split_fingerprint.txt"})
    CHECK_MESSAGE(fs::exists(run.dir / f), f);
  // ids follow first appearance in the file
  auto classes = run.report.classes();
  std::sort(classes.begin(), classes.end());
  CHECK(classes == std::vector<std::string>{"C0", "C1", "C2"});
  std::set<std::string> stages;
  for (const auto& e : run.stages.entries) stages.insert(e.stage);
  CHECK(stages.count("scgan-filter") == 1);
  CHECK(stages.count("skn") == 1);

  // the snapshot reproduces the configuration
  const auto snap = load_config_file(run.dir / "config.txt");
  CHECK(config_to_kv(snap) == config_to_kv(cfg));

  auto base = small_run(root, "baseline", 5);
  base.method = pipeline::Method::baseline;
  run_all(base);
  const auto self = compare_runs({run.dir, run.dir});
  for (const auto& row : self.rows)
    for (const auto& c : row.per_class) CHECK(c.f_beta == 0.0);
  const auto table = compare_runs({run.dir, root / "baseline"});
  CHECK(table.baseline == "baseline");
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].method == "s2cgan");

  auto other = small_run(root, "other-split", 6);
  other.method = pipeline::Method::baseline;
  run_all(other);
  CHECK(kind_of([&] { compare_runs({run.dir, root / "other-split"}); }) == ErrorKind::comparison);
  CHECK(kind_of([&] { compare_runs({run.dir}); }) == ErrorKind::comparison);
  fs::remove_all(root);
}

TEST_CASE("prepared data round trip and split hygiene") {
  const auto root = fs::temp_directory_path() / "imbaug_app_prep_test";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto cfg = small_run(root, "prep", 2);
  const auto p = prepare(cfg);
  CHECK(p.train.rows() + p.test.rows() == 636);
  auto counts = p.full_levels.counts;
  std::sort(counts.begin(), counts.end());
  CHECK(counts == std::vector<std::size_t>{6, 30, 600});
  save_prepared(root / "prep", p);
  const auto back = load_prepared(root / "prep");
  CHECK(back.train.features == p.train.features);
  CHECK(back.test_fingerprint == p.test_fingerprint);
  CHECK(back.normalization == p.normalization);

  const auto levels = augmentation_levels(cfg, p);
  CHECK(levels.counts == p.train.counts());
  CHECK(levels.levels == p.full_levels.levels);

  pipeline::ClassifierConfig cc;
  cc.epochs = 1;
  const auto model = pipeline::train_classifier(p.train, cc).model;
  CHECK(evaluate_classifier(model, p.test, p.test_fingerprint, "m", 1.0).confusion.total() == p.test.rows());
  CHECK(kind_of([&] { evaluate_classifier(model, p.test, p.test_fingerprint + 1, "m", 1.0); }) ==
        ErrorKind::state);
  fs::remove_all(root);
}
