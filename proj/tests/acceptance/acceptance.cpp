// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: imbaug_acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "imbaug/app/config.hpp"
#include "imbaug/app/run.hpp"
#include "imbaug/app/synthbench.hpp"
#include "imbaug/data/preprocess.hpp"
#include "imbaug/eval/metrics.hpp"
#include "imbaug/gan/scgan.hpp"
#include "imbaug/level/leveling.hpp"
#include "imbaug/log.hpp"
#include "imbaug/pipeline/augment.hpp"
#include "imbaug/san/san.hpp"
#include "imbaug/skn/skn.hpp"
#include "oracles.hpp"
#include "reference_tables.hpp"

using namespace imbaug;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path g_work;

Outcome ir_reproduction() {
  std::vector<std::size_t> full(reference::kClasses);
  for (std::size_t c = 0; c < full.size(); ++c) full[c] = reference::kTrain[c] + reference::kTest[c];
  const auto irs = level::imbalance_ratios(full);
  double worst = 0.0;
  for (std::size_t c = 0; c < full.size(); ++c)
    worst = std::max(worst, std::abs(irs[c] - reference::kIr[c]) / reference::kIr[c]);
  return {worst < 0.005, fmt("max relative error %.5f%% (limit 0.5%%)", 100.0 * worst)};
}

Outcome leveling_reproduction() {
  const std::vector<std::string> names(reference::kNames.begin(), reference::kNames.end());
  const auto p = level::partition(reference::kIr, level::Thresholds{}, names);
  const bool levels_ok = std::equal(p.levels.begin(), p.levels.end(), reference::kLevel.begin());
  const auto targets = level::augmentation_targets(p, reference::kTrain);
  const std::vector<std::size_t> minority(targets.begin() + 3, targets.end());
  const bool targets_ok = minority == std::vector<std::size_t>{127144, 127144, 127144, 1573, 1573} &&
                          std::equal(targets.begin(), targets.end(), reference::kAugmented.begin());
  std::string t;
  for (auto v : minority) t += std::to_string(v) + " ";
  return {levels_ok && targets_ok,
          fmt("levels %s, minority targets { %s}", levels_ok ? "match" : "differ", t.c_str())};
}

double macro_f1(const reference::Scores& s) {
  std::vector<eval::ClassMetrics> m(reference::kClasses);
  for (std::size_t c = 0; c < m.size(); ++c) m[c] = {s.precision[c], s.recall[c], s.f1[c], reference::kTest[c]};
  return eval::aggregate(m).macro.f_beta;
}

Outcome metric_paper_check() {
  const double a = macro_f1(reference::kS2cgan), b = macro_f1(reference::kSmote);
  const double gain = 100.0 * (a - b) / b;
  const bool ok = std::abs(a - reference::kS2cganMacroF1) <= 0.0005 &&
                  std::abs(b - reference::kSmoteMacroF1) <= 0.0005 &&
                  std::abs(gain - reference::kRelativeGainPct) <= 0.3;
  return {ok, fmt("macro F1 %.4f vs %.4f, relative gain %.2f%%", a, b, gain)};
}

Outcome gradient_suite() {
  double worst = 0.0;
  std::string worst_name;
  std::uint64_t seed = 100;
  for (auto c : oracle::kLayerCases) {
    const double e = oracle::layer_suite(c, 20, seed++);
    if (e >= worst) worst = e, worst_name = oracle::name(c);
  }
  for (auto c : oracle::kLossCases) {
    const double e = oracle::loss_suite(c, 20, seed++);
    if (e >= worst) worst = e, worst_name = oracle::name(c);
  }
  return {worst < 1e-4, fmt("worst relative error %.2e (%s)", worst, worst_name.c_str())};
}

Outcome skn_oracle() {
  Rng rng(2024);
  std::size_t identical = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.uniform_index(30), d = 1 + rng.uniform_index(12);
    const std::size_t k = 1 + rng.uniform_index(8), count = rng.uniform_index(200);
    const Matrix pts = oracle::random_matrix(n, d, rng, 0.0, 1.0);
    const std::uint64_t seed = rng.next_u64();
    log::Capture quiet;
    identical += skn::skn_synthesize(pts, count, {k, seed, std::nullopt}).samples ==
                         oracle::brute_force_interpolation(pts, count, k, seed)
                     ? 1
                     : 0;
  }
  const Matrix pts = oracle::random_matrix(80, 8, rng, 0.0, 1.0);
  const auto res = skn::skn_synthesize(pts, 10000, {5, 99, std::nullopt});
  const auto index = skn::build_knn_index(pts, 5);
  std::size_t violations = 0;
  for (std::size_t t = 0; t < res.samples.rows(); ++t) {
    const auto& dr = res.draws[t];
    const auto& nb = index.neighbors[dr.source];
    if (std::find(nb.begin(), nb.end(), dr.neighbor) == nb.end() || dr.lambda < 0.0 || dr.lambda >= 1.0) ++violations;
    for (std::size_t f = 0; f < pts.cols(); ++f) {
      const double a = pts(dr.source, f), b = pts(dr.neighbor, f), x = res.samples(t, f);
      if (x < std::min(a, b) || x > std::max(a, b)) ++violations;
    }
  }
  return {identical == 50 && violations == 0 && res.samples.rows() == 10000,
          fmt("%zu/50 bit-identical, %zu invariant violations over 10000 points", identical, violations)};
}

// Normalized synthetic benchmark split into train and held-out rows.
data::SplitResult bench_split(std::uint64_t seed) {
  app::SynthSpec spec;
  spec.seed = seed;
  const auto ds = app::synthesize_benchmark(spec);
  auto split = data::stratified_split(ds, {0.8, seed, true});
  const auto norm = data::fit_minmax(split.train);
  split.train = data::apply_minmax(norm, split.train);
  split.test = data::apply_minmax(norm, split.test);
  return split;
}

pipeline::AugmentConfig default_augment(std::uint64_t seed) {
  pipeline::AugmentConfig c;
  c.seed = seed;
  c.san.epochs = 20;
  return c;
}

Outcome filter_soundness() {
  const auto split = bench_split(7);
  const auto levels = level::level_classes(split.train.counts(), split.train.label_names, level::Thresholds{});
  const auto cfg = default_augment(7);
  const auto san_model = pipeline::fit_san(split.train, levels, cfg).model;
  const Matrix rows = select_rows(split.train.features, split.train.rows_of(1));
  const Matrix pool = san::encode(san_model, rows);
  gan::ScganConfig gcfg;
  gcfg.seed = 7;
  const auto model = gan::train_scgan(rows, san_model, gcfg, "C1").model;

  const gan::FilterPolicy policy;  // eta 0.45
  const auto res = gan::synthesize_to_target(model, pool, 2000, policy, 8);
  const auto rescored = gan::discriminator_scores(model, res.samples, res.conditions);
  std::size_t below = 0;
  for (double s : rescored) below += s < policy.eta ? 1 : 0;
  Rng rng(9);
  const auto raw = gan::generate(model, pool, 5000, rng);
  std::size_t outside = 0;
  for (const Matrix* m : {&raw.samples, &res.samples})
    for (double v : m->values()) outside += (v < 0.0 || v > 1.0) ? 1 : 0;
  return {res.samples.rows() == 2000 && below == 0 && outside == 0,
          fmt("%zu kept, %zu re-scored below eta, %zu values outside [0,1], acceptance %.3f",
              res.samples.rows(), below, outside, res.acceptance_rate())};
}

Outcome san_behavior() {
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto split = bench_split(seed);
    const auto levels = level::level_classes(split.train.counts(), split.train.label_names, level::Thresholds{});
    const auto trained = pipeline::fit_san(split.train, levels, default_augment(seed));
    const double drop = 1.0 - trained.epoch_loss.back() / trained.epoch_loss.front();

    const auto pairs = san::sample_pairs(split.test.features, split.test.labels, 4000, 0.5, seed + 100);
    const Matrix a = san::encode(trained.model, pairs.first), b = san::encode(trained.model, pairs.second);
    double same = 0.0, cross = 0.0;
    std::size_t n_same = 0, n_cross = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) d2 += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
      (pairs.dissimilar[i] ? cross : same) += std::sqrt(d2);
      ++(pairs.dissimilar[i] ? n_cross : n_same);
    }
    same /= static_cast<double>(n_same);
    cross /= static_cast<double>(n_cross);
    ok = ok && trained.epoch_loss.size() == 20 && drop >= 0.5 && same < cross;
    detail += fmt("seed %d: drop %.1f%%, same %.3f < cross %.3f; ", static_cast<int>(seed), 100.0 * drop, same, cross);
  }
  return {ok, detail};
}

app::RunConfig efficacy_config(const fs::path& csv, std::uint64_t seed, pipeline::Method method,
                               const fs::path& out, const std::string& name) {
  app::RunConfig c;
  c.data = csv.string();
  c.mapping = "none";
  c.seed = seed;
  c.method = method;
  // desk-scale budget: fewer, larger GAN steps and a shorter classifier schedule
  c.scgan.epochs = 1000;
  c.scgan.lr = 1e-3;
  c.classifier.epochs = 20;
  c.out = out.string();
  c.run_name = name;
  return c;
}

fs::path bench_csv(std::uint64_t seed) {
  const auto path = g_work / ("bench_seed" + std::to_string(seed) + ".csv");
  app::SynthSpec spec;
  spec.seed = seed;
  data::write_dataset(path, app::synthesize_benchmark(spec));
  return path;
}

std::size_t class_index(const eval::MetricsReport& r, const std::string& name) {
  const auto& c = r.classes();
  return static_cast<std::size_t>(std::find(c.begin(), c.end(), name) - c.begin());
}

Outcome efficacy() {
  double gain = 0.0, majority_drop = 0.0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto csv = bench_csv(seed);
    const auto base = app::run_all(efficacy_config(csv, seed, pipeline::Method::baseline, g_work / "efficacy",
                                                   "baseline-" + std::to_string(seed)));
    const auto aug = app::run_all(efficacy_config(csv, seed, pipeline::Method::s2cgan, g_work / "efficacy",
                                                  "s2cgan-" + std::to_string(seed)));
    const double b = base.report.totals.macro.f_beta, a = aug.report.totals.macro.f_beta;
    const double bm = base.report.per_class[class_index(base.report, "C0")].f_beta;
    const double am = aug.report.per_class[class_index(aug.report, "C0")].f_beta;
    gain += (a - b) / 5.0;
    majority_drop += (bm - am) / 5.0;
    detail += fmt("%.3f->%.3f ", b, a);
  }
  return {gain >= 0.10 && majority_drop <= 0.02,
          fmt("mean macro F1 gain %+.4f, majority F1 drop %+.4f; per seed %s", gain, majority_drop, detail.c_str())};
}

Outcome determinism() {
  const auto csv = bench_csv(11);
  std::vector<fs::path> dirs;
  for (const char* name : {"first", "second"})
    dirs.push_back(app::run_all(efficacy_config(csv, 11, pipeline::Method::s2cgan, g_work / "determinism", name)).dir);
  std::vector<std::string> files{"augmented.csv", "summary.txt"};
  for (const auto& e : fs::directory_iterator(dirs[0] / "metrics"))
    files.push_back("metrics/" + e.path().filename().string());
  std::size_t differing = 0;
  for (const auto& f : files) {
    const auto a = slurp(dirs[0] / f), b = slurp(dirs[1] / f);
    if (a.empty() || a != b) ++differing;
  }
  return {differing == 0, fmt("%zu files compared, %zu differ", files.size(), differing)};
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "imbaug_acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria{
      {"ir-reproduction", 1.0, ir_reproduction},
      {"leveling-reproduction", 1.0, leveling_reproduction},
      {"metric-paper-check", 1.0, metric_paper_check},
      {"gradient-suite", 30.0, gradient_suite},
      {"skn-oracle", 30.0, skn_oracle},
      {"filter-soundness", 120.0, filter_soundness},
      {"san-behavior", 120.0, san_behavior},
      {"end-to-end-efficacy", 600.0, efficacy},
      {"determinism", 300.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %s: %s [%.2fs, limit %.0fs%s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
