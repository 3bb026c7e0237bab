#include "imbaug/pipeline/augment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/log.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::pipeline {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::ros: return "ros";
    case Method::smote: return "smote";
    case Method::s2cgan: return "s2cgan";
  }
  return "unknown";
}

Method parse_method(std::string_view s) {
  for (auto m : {Method::baseline, Method::ros, Method::smote, Method::s2cgan})
    if (s == to_string(m)) return m;
  fail(ErrorKind::config, "unknown method '" + std::string(s) + "' (baseline, ros, smote, s2cgan)");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::scgan: return "scgan";
    case Provenance::skn: return "skn";
    case Provenance::ros: return "ros";
    case Provenance::smote: return "smote";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view s) {
  for (auto p : {Provenance::original, Provenance::scgan, Provenance::skn, Provenance::ros,
                 Provenance::smote})
    if (s == to_string(p)) return p;
  fail(ErrorKind::format, "unknown provenance '" + std::string(s) + "'");
}

std::vector<std::string> AugmentedDataset::provenance_strings() const {
  std::vector<std::string> out;
  out.reserve(provenance.size());
  for (auto p : provenance) out.emplace_back(to_string(p));
  return out;
}

std::string StageReport::text() const {
  std::ostringstream ss;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-24s %10s %10s %10s %10s\n", "stage", "class", "seconds",
                "generated", "accepted", "rate");
  ss << line;
  for (const auto& e : entries) {
    std::string rate = "-";
    if (e.generated > 0) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f",
                    static_cast<double>(e.accepted) / static_cast<double>(e.generated));
      rate = buf;
    }
    std::snprintf(line, sizeof line, "%-14s %-24s %10.3f %10zu %10zu %10s\n", e.stage.c_str(),
                  e.class_name.empty() ? "-" : e.class_name.c_str(), e.seconds, e.generated,
                  e.accepted, rate.c_str());
    ss << line;
  }
  return ss.str();
}

PipelineError::PipelineError(std::string stage, std::string class_name, const std::string& cause,
                             AugmentedDataset partial)
    : Error(ErrorKind::pipeline,
            "stage '" + stage + "' failed for class '" + class_name + "': " + cause),
      stage_(std::move(stage)),
      class_name_(std::move(class_name)),
      partial_(std::make_shared<AugmentedDataset>(std::move(partial))) {}

std::vector<std::size_t> resampler_targets(const level::LevelPartition& levels,
                                           std::span<const std::size_t> counts) {
  require(counts.size() == levels.size(), ErrorKind::shape, "one count per class");
  std::size_t min_ample = 0;
  bool found = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (levels.levels[i] != level::Level::ample) continue;
    min_ample = found ? std::min(min_ample, counts[i]) : counts[i];
    found = true;
  }
  require(found, ErrorKind::policy, "no ample class to size targets against");
  std::vector<std::size_t> targets(counts.begin(), counts.end());
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (levels.levels[i] != level::Level::ample) targets[i] = std::max(counts[i], min_ample);
  return targets;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void append_rows(AugmentedDataset& out, const Matrix& rows, int label, Provenance p) {
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    out.data.append(rows.row(i), label);
    out.provenance.push_back(p);
  }
}

Matrix class_rows(const data::Dataset& ds, int label) {
  const auto idx = ds.rows_of(label);
  return select_rows(ds.features, idx);
}

// Scarce rows plus an equal-size uniform sample (without replacement) of ample rows.
std::vector<std::size_t> san_training_rows(const data::Dataset& train,
                                           const level::LevelPartition& levels, std::uint64_t seed) {
  std::vector<std::size_t> scarce, ample;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto lvl = levels.levels[static_cast<std::size_t>(train.labels[i])];
    if (lvl == level::Level::scarce) scarce.push_back(i);
    if (lvl == level::Level::ample) ample.push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(ample.begin(), ample.end());
  ample.resize(std::min(ample.size(), scarce.size()));
  std::vector<std::size_t> rows = scarce;
  rows.insert(rows.end(), ample.begin(), ample.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

san::SanTrainResult fit_san(const data::Dataset& train, const level::LevelPartition& levels,
                            const AugmentConfig& config) {
  require(levels.size() == train.class_count(), ErrorKind::shape, "one level per class required");
  const auto rows = san_training_rows(train, levels, derive_seed(config.seed, "san-sample"));
  require(!rows.empty(), ErrorKind::policy, "no scarce rows to train the SAN on");
  const auto sub = train.subset(rows);
  auto san_cfg = config.san;
  san_cfg.seed = derive_seed(config.seed, "san");
  return san::train_san(sub.features, sub.labels, san_cfg);
}

AugmentOutput build_augmented(const data::Dataset& train, const level::LevelPartition& levels,
                              const AugmentConfig& config) {
  train.validate();
  require(levels.size() == train.class_count(), ErrorKind::shape,
          "level partition covers " + std::to_string(levels.size()) + " classes, data has " +
              std::to_string(train.class_count()));
  const auto counts = train.counts();
  std::vector<std::size_t> targets;
  switch (config.method) {
    case Method::s2cgan:
      require(levels.targets.size() == levels.size(), ErrorKind::state,
              "level partition has no augmentation targets");
      targets = levels.targets;
      break;
    case Method::ros:
    case Method::smote: targets = resampler_targets(levels, counts); break;
    case Method::baseline: targets = counts; break;
  }

  AugmentOutput out;
  out.augmented.data = train;
  out.augmented.provenance.assign(train.rows(), Provenance::original);

  const auto name_of = [&](std::size_t c) { return train.label_names[c]; };
  const auto run_stage = [&](const std::string& stage, std::size_t c, auto&& body) {
    try {
      body();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(stage, name_of(c), e.what(), out.augmented);
    }
  };

  if (config.method == Method::s2cgan) {
    bool any_scarce = false;
    for (std::size_t c = 0; c < levels.size(); ++c)
      any_scarce = any_scarce || (levels.levels[c] == level::Level::scarce && targets[c] > counts[c]);
    if (any_scarce && config.san_model) {
      out.san = config.san_model;
    } else if (any_scarce) {
      const auto t0 = Clock::now();
      try {
        auto trained = fit_san(train, levels, config);
        out.san = std::move(trained.model);
        out.report.san_loss = std::move(trained.epoch_loss);
      } catch (const std::exception& e) {
        throw PipelineError("san", "", e.what(), out.augmented);
      }
      out.report.entries.push_back({"san", "", seconds_since(t0), 0, 0});
    }
  }

  for (std::size_t c = 0; c < levels.size(); ++c) {
    if (targets[c] <= counts[c]) continue;
    const std::size_t need = targets[c] - counts[c];
    const int label = static_cast<int>(c);
    const Matrix x = class_rows(train, label);
    const auto lvl = levels.levels[c];

    if (config.train_only && !(config.method == Method::s2cgan && lvl == level::Level::scarce))
      continue;
    if (config.method == Method::ros) {
      const auto t0 = Clock::now();
      Rng rng(derive_seed(config.seed, "ros", c));
      Matrix dup(0, x.cols());
      for (std::size_t i = 0; i < need; ++i) dup.append_row(x.row(rng.uniform_index(x.rows())));
      append_rows(out.augmented, dup, label, Provenance::ros);
      out.report.entries.push_back({"ros", name_of(c), seconds_since(t0), need, need});
    } else if (config.method == Method::smote ||
               (config.method == Method::s2cgan && lvl == level::Level::rare)) {
      const bool smote = config.method == Method::smote;
      const std::string stage = smote ? "smote" : "skn";
      run_stage(stage, c, [&] {
        const auto t0 = Clock::now();
        skn::SknConfig cfg{config.skn_k, derive_seed(config.seed, stage, c), std::nullopt};
        const auto res = skn::skn_synthesize(x, need, cfg);
        append_rows(out.augmented, res.samples, label, smote ? Provenance::smote : Provenance::skn);
        out.report.entries.push_back({stage, name_of(c), seconds_since(t0), need, need});
      });
    } else if (config.method == Method::s2cgan && lvl == level::Level::scarce) {
      gan::ScganModel model;
      const auto pre = config.scgan_models.find(name_of(c));
      if (pre != config.scgan_models.end()) {
        model = pre->second;
      } else {
        run_stage("scgan-train", c, [&] {
          const auto t0 = Clock::now();
          auto cfg = config.scgan;
          cfg.seed = derive_seed(config.seed, "scgan", c);
          auto trained = gan::train_scgan(x, *out.san, cfg, name_of(c));
          model = std::move(trained.model);
          out.report.scgan_loss[name_of(c)] = std::move(trained.history);
          out.report.entries.push_back({"scgan-train", name_of(c), seconds_since(t0), 0, 0});
        });
      }
      if (config.train_only) {
        out.scgan.push_back(std::move(model));
        continue;
      }
      run_stage("scgan-filter", c, [&] {
        const auto t0 = Clock::now();
        const Matrix pool = san::encode(*out.san, x);
        const auto res = gan::synthesize_to_target(model, pool, need, config.filter,
                                                   derive_seed(config.seed, "scgan-filter", c));
        append_rows(out.augmented, res.samples, label, Provenance::scgan);
        out.report.entries.push_back(
            {"scgan-filter", name_of(c), seconds_since(t0), res.generated, res.accepted});
      });
      out.scgan.push_back(std::move(model));
    }
  }

  if (config.train_only) return out;
  const auto final_counts = out.augmented.data.counts();
  for (std::size_t c = 0; c < targets.size(); ++c)
    require(final_counts[c] == targets[c], ErrorKind::state,
            "class '" + name_of(c) + "' ended with " + std::to_string(final_counts[c]) +
                " rows, expected " + std::to_string(targets[c]));
  return out;
}

}  // namespace imbaug::pipeline
