#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <vector>

#include "doctest.h"
#include "imbaug/app/synthbench.hpp"
#include "imbaug/data/preprocess.hpp"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/pipeline/augment.hpp"
#include "imbaug/pipeline/classifier.hpp"
#include "imbaug/pipeline/run_store.hpp"

using namespace imbaug;
using namespace imbaug::pipeline;
namespace fs = std::filesystem;

namespace {

data::Dataset normalized_bench(std::vector<std::size_t> counts, std::size_t dim, std::uint64_t seed) {
  app::SynthSpec spec;
  spec.counts = std::move(counts);
  spec.dim = dim;
  spec.seed = seed;
  auto ds = app::synthesize_benchmark(spec);
  return data::apply_minmax(data::fit_minmax(ds), ds);
}

// IR 30 -> scarce, IR 400 -> rare
level::Thresholds small_thresholds() {
  level::Thresholds t;
  t.scarce_min_ir = 10.0;
  t.rare_min_ir = 300.0;
  return t;
}

AugmentConfig fast_config(Method m) {
  AugmentConfig c;
  c.method = m;
  c.san.epochs = 3;
  c.san.hidden = {16};
  c.san.code_dim = 4;
  c.scgan.epochs = 30;
  c.scgan.noise_dim = 4;
  c.scgan.generator_hidden = {16, 16};
  c.scgan.discriminator_hidden = {16, 8};
  c.seed = 11;
  return c;
}

struct Fixture {
  data::Dataset train = normalized_bench({1200, 40, 3}, 6, 2);
  level::LevelPartition levels = level::level_classes(train.counts(), train.label_names, small_thresholds());
};

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("s2cgan: scarce via gan, rare via interpolation, ample untouched") {
  Fixture f;
  REQUIRE(f.levels.levels == std::vector<level::Level>{level::Level::ample, level::Level::scarce, level::Level::rare});
  log::Capture quiet;
  const auto out = build_augmented(f.train, f.levels, fast_config(Method::s2cgan));
  const auto& aug = out.augmented;
  CHECK(aug.data.counts() == f.levels.targets);
  CHECK(f.levels.targets == std::vector<std::size_t>{1200, 1200, 40});
  REQUIRE(aug.provenance.size() == aug.data.rows());

  // original rows first and byte-identical
  for (std::size_t i = 0; i < f.train.rows(); ++i) {
    CHECK(aug.provenance[i] == Provenance::original);
    CHECK(aug.data.labels[i] == f.train.labels[i]);
    CHECK(std::equal(aug.data.features.row(i).begin(), aug.data.features.row(i).end(),
                     f.train.features.row(i).begin()));
  }
  for (std::size_t i = f.train.rows(); i < aug.data.rows(); ++i) {
    const int label = aug.data.labels[i];
    CHECK(label != 0);
    CHECK(aug.provenance[i] == (label == 1 ? Provenance::scgan : Provenance::skn));
    for (double v : aug.data.features.row(i)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(out.san.has_value());
  REQUIRE(out.scgan.size() == 1);
  CHECK(out.scgan[0].class_name == f.train.label_names[1]);
  std::set<std::string> stages;
  for (const auto& e : out.report.entries) stages.insert(e.stage);
  CHECK(stages == std::set<std::string>{"san", "scgan-train", "scgan-filter", "skn"});
  CHECK(out.report.san_loss.size() == 3);
  CHECK(out.report.scgan_loss.count(f.train.label_names[1]) == 1);
  CHECK(out.report.text().find("scgan-filter") != std::string::npos);
}

TEST_CASE("augmentation is reproducible for a seed") {
  Fixture f;
  log::Capture quiet;
  const auto a = build_augmented(f.train, f.levels, fast_config(Method::s2cgan));
  const auto b = build_augmented(f.train, f.levels, fast_config(Method::s2cgan));
  CHECK(a.augmented.data.features == b.augmented.data.features);
  auto other = fast_config(Method::s2cgan);
  other.seed = 12;
  CHECK_FALSE(build_augmented(f.train, f.levels, other).augmented.data.features == a.augmented.data.features);
}

TEST_CASE("all-ample data is returned unchanged") {
  const auto train = normalized_bench({100, 60, 40}, 4, 3);
  const auto levels = level::level_classes(train.counts(), train.label_names, level::Thresholds{});
  for (auto m : {Method::s2cgan, Method::ros, Method::smote, Method::baseline}) {
    const auto out = build_augmented(train, levels, fast_config(m));
    CHECK(out.augmented.data.features == train.features);
    CHECK(out.augmented.data.labels == train.labels);
    CHECK_FALSE(out.san.has_value());
  }
}

TEST_CASE("baseline resamplers top every minority class up to the smallest ample count") {
  Fixture f;
  log::Capture quiet;
  CHECK(resampler_targets(f.levels, f.train.counts()) == std::vector<std::size_t>{1200, 1200, 1200});

  const auto ros = build_augmented(f.train, f.levels, fast_config(Method::ros));
  CHECK(ros.augmented.data.counts() == std::vector<std::size_t>{1200, 1200, 1200});
  for (std::size_t i = f.train.rows(); i < ros.augmented.data.rows(); ++i) {
    CHECK(ros.augmented.provenance[i] == Provenance::ros);
    // every duplicate is an existing row of its class
    const auto rows = f.train.rows_of(ros.augmented.data.labels[i]);
    const bool found = std::any_of(rows.begin(), rows.end(), [&](std::size_t r) {
      return std::equal(f.train.features.row(r).begin(), f.train.features.row(r).end(),
                        ros.augmented.data.features.row(i).begin());
    });
    CHECK(found);
  }

  const auto smote = build_augmented(f.train, f.levels, fast_config(Method::smote));
  CHECK(smote.augmented.data.counts() == std::vector<std::size_t>{1200, 1200, 1200});
  CHECK(smote.augmented.provenance.back() == Provenance::smote);

  const auto base = build_augmented(f.train, f.levels, fast_config(Method::baseline));
  CHECK(base.augmented.data.rows() == f.train.rows());
}

TEST_CASE("train_only stops before generation; pretrained models are reused") {
  Fixture f;
  log::Capture quiet;
  auto cfg = fast_config(Method::s2cgan);
  cfg.train_only = true;
  const auto trained = build_augmented(f.train, f.levels, cfg);
  CHECK(trained.augmented.data.rows() == f.train.rows());
  REQUIRE(trained.scgan.size() == 1);
  REQUIRE(trained.san.has_value());

  auto reuse = fast_config(Method::s2cgan);
  reuse.san_model = trained.san;
  reuse.scgan_models[trained.scgan[0].class_name] = trained.scgan[0];
  const auto out = build_augmented(f.train, f.levels, reuse);
  CHECK(out.augmented.data.counts() == f.levels.targets);
  for (const auto& e : out.report.entries) {
    CHECK(e.stage != "san");
    CHECK(e.stage != "scgan-train");
  }
  // same models and seed as a full run -> same samples
  const auto full = build_augmented(f.train, f.levels, fast_config(Method::s2cgan));
  CHECK(out.augmented.data.features == full.augmented.data.features);
}

TEST_CASE("stage failures name the stage and class and carry the partial set") {
  Fixture f;
  log::Capture quiet;
  auto cfg = fast_config(Method::s2cgan);
  cfg.filter.eta = 1.0;
  cfg.filter.max_attempt_factor = 1;
  try {
    build_augmented(f.train, f.levels, cfg);
    FAIL("expected a pipeline error");
  } catch (const PipelineError& e) {
    CHECK(e.kind() == ErrorKind::pipeline);
    CHECK(e.stage() == "scgan-filter");
    CHECK(e.class_name() == f.train.label_names[1]);
    CHECK(e.partial().data.rows() == f.train.rows());
    CHECK(std::string(e.what()).find("acceptance rate") != std::string::npos);
  }

  level::LevelPartition wrong = f.levels;
  wrong.irs.pop_back();
  CHECK_THROWS_AS(build_augmented(f.train, wrong, cfg), Error);
}

TEST_CASE("method and provenance names round trip") {
  for (auto m : {Method::baseline, Method::ros, Method::smote, Method::s2cgan}) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("tacgan"), Error);
  for (auto p : {Provenance::original, Provenance::scgan, Provenance::skn, Provenance::ros, Provenance::smote})
    CHECK(parse_provenance(to_string(p)) == p);
}

TEST_CASE("classifier learns a separable problem") {
  const auto train = normalized_bench({300, 300}, 5, 4);
  ClassifierConfig cfg;
  cfg.epochs = 30;
  cfg.seed = 2;
  const auto r = train_classifier(train, cfg);
  CHECK(r.epoch_loss.size() == 30);
  CHECK(r.model.net.out_dim() == 2);
  const auto pred = predict(r.model, train.features);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < train.rows(); ++i) correct += pred.labels[i] == train.labels[i] ? 1 : 0;
  CHECK(static_cast<double>(correct) / static_cast<double>(train.rows()) >= 0.99);
  for (std::size_t r2 = 0; r2 < pred.probabilities.rows(); ++r2) {
    double s = 0.0;
    for (double v : pred.probabilities.row(r2)) s += v;
    CHECK(std::abs(s - 1.0) < 1e-9);
  }
  // loss never rises over five-epoch windows once warmed up
  for (std::size_t e = 10; e < r.epoch_loss.size(); e += 5) CHECK(r.epoch_loss[e] <= r.epoch_loss[e - 5]);
  CHECK_THROWS_AS(predict(r.model, Matrix(2, 3)), Error);
}

TEST_CASE("classifier configuration limits and early stopping") {
  ClassifierConfig cfg;
  cfg.epochs = 101;
  CHECK_THROWS_AS(cfg.validate(), Error);
  const auto train = normalized_bench({50, 50, 50}, 3, 5);
  cfg.epochs = 0;
  const auto zero = train_classifier(train, cfg);
  CHECK(zero.epoch_loss.empty());
  CHECK(zero.model.net.out_dim() == 3);
  CHECK(zero.model.label_names == train.label_names);

  cfg.epochs = 100;
  cfg.patience = 1;
  cfg.lr = 0.5;  // unstable enough that the loss stops improving quickly
  CHECK(train_classifier(train, cfg).epoch_loss.size() < 100);
}

TEST_CASE("argmax takes the lowest index on ties") {
  CHECK(argmax(std::vector<double>{0.1, 0.7, 0.2}) == 1);
  CHECK(argmax(std::vector<double>{0.5, 0.5}) == 0);
  CHECK(argmax(std::vector<double>{0.2, 0.4, 0.4}) == 1);
}

TEST_CASE("run directory round trip") {
  Fixture f;
  log::Capture quiet;
  const auto out = build_augmented(f.train, f.levels, fast_config(Method::s2cgan));
  ClassifierConfig ccfg;
  ccfg.epochs = 2;
  const auto clf = train_classifier(out.augmented.data, ccfg);

  RunArtifacts art;
  art.config = {{"method", "s2cgan"}, {"seed", "11"}};
  art.levels = f.levels;
  art.normalization = data::fit_minmax(f.train);
  art.split_fingerprint = 1234567890123ULL;
  art.san = out.san;
  art.scgan = out.scgan;
  art.classifier = clf.model;
  art.augmented = out.augmented;
  art.stage_report = out.report;
  art.classifier_loss = clf.epoch_loss;

  const auto dir = fresh_dir("imbaug_run_store_test");
  save_run(dir, art);
  const auto back = load_run(dir);
  CHECK(back.config == art.config);
  CHECK(back.levels->targets == f.levels.targets);
  CHECK(back.normalization == art.normalization);
  CHECK(back.split_fingerprint == art.split_fingerprint);
  CHECK(nn::serialize(back.san->to_checkpoint()) == nn::serialize(out.san->to_checkpoint()));
  REQUIRE(back.scgan.size() == 1);
  CHECK(nn::serialize(back.scgan[0].to_checkpoint()) == nn::serialize(out.scgan[0].to_checkpoint()));
  CHECK(predict(back.classifier.value(), f.train.features).probabilities ==
        predict(clf.model, f.train.features).probabilities);
  CHECK(back.augmented->data.features == out.augmented.data.features);
  CHECK(back.augmented->provenance == out.augmented.provenance);
  CHECK(back.stage_report->entries.size() == out.report.entries.size());
  CHECK(back.stage_report->san_loss == out.report.san_loss);
  CHECK(back.classifier_loss == clf.epoch_loss);

  // a second save produces identical bytes
  const auto dir2 = fresh_dir("imbaug_run_store_test2");
  save_run(dir2, back);
  for (const char* name : {"augmented.csv", "classifier.ckpt", "san.ckpt", "levels.csv", "config.txt"}) {
    CAPTURE(name);
    std::ifstream a(dir / name, std::ios::binary), b(dir2 / name, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
  }

  {
    std::ofstream m(dir / "manifest.txt");
    m << "imbaug-run 99\n";
  }
  try {
    load_run(dir);
    FAIL("version mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::format);
  }
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("key-value text and file stems") {
  const auto kv = parse_key_values("# comment\n a = 1 \nb=two words # trailing\n\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b") == "two words");
  CHECK(parse_key_values(format_key_values(kv)) == kv);
  CHECK_THROWS_AS(parse_key_values("novalue\n"), Error);
  CHECK(file_stem("DoS/DDoS") == "DoS_DDoS");
  CHECK(file_stem("Web Attack") == "Web_Attack");
  CHECK(file_stem("") == "_");
}
