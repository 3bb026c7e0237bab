#include "imbaug/level/leveling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"

namespace imbaug::level {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::ample: return "ample";
    case Level::scarce: return "scarce";
    case Level::rare: return "rare";
  }
  return "unknown";
}

Level parse_level(std::string_view s) {
  if (s == "ample") return Level::ample;
  if (s == "scarce") return Level::scarce;
  if (s == "rare") return Level::rare;
  fail(ErrorKind::config, "unknown level '" + std::string(s) + "'");
}

void Thresholds::validate() const {
  if (mode != ThresholdMode::fixed) return;
  require(scarce_min_ir > 0.0 && rare_min_ir > 0.0 && scarce_min_ir < rare_min_ir,
          ErrorKind::config, "thresholds must satisfy 0 < scarce_min_ir < rare_min_ir");
}

std::vector<double> imbalance_ratios(std::span<const std::size_t> counts) {
  require(!counts.empty(), ErrorKind::data, "no classes");
  for (std::size_t i = 0; i < counts.size(); ++i)
    require(counts[i] > 0, ErrorKind::data, "class " + std::to_string(i) + " has zero samples");
  const double n_max = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
  std::vector<double> irs;
  irs.reserve(counts.size());
  for (auto c : counts) irs.push_back(n_max / static_cast<double>(c));
  return irs;
}

namespace {

void derive_auto_gap(std::span<const double> irs, Thresholds& used) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  used.scarce_min_ir = inf;
  used.rare_min_ir = inf;
  if (irs.size() < 3) {
    log::warn("auto-gap leveling needs at least 3 classes; treating every class as ample");
    return;
  }
  std::vector<double> logs;
  for (double ir : irs) logs.push_back(std::log10(ir));
  std::vector<std::size_t> order(irs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return logs[a] < logs[b]; });
  // gap i lies between sorted positions i and i + 1
  std::vector<std::size_t> gaps(irs.size() - 1);
  std::iota(gaps.begin(), gaps.end(), std::size_t{0});
  auto width = [&](std::size_t g) { return logs[order[g + 1]] - logs[order[g]]; };
  std::stable_sort(gaps.begin(), gaps.end(),
                   [&](std::size_t a, std::size_t b) { return width(a) > width(b); });
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i < gaps.size() && cuts.size() < 2; ++i)
    if (width(gaps[i]) > 0.0) cuts.push_back(gaps[i]);
  std::sort(cuts.begin(), cuts.end());
  if (!cuts.empty()) used.scarce_min_ir = irs[order[cuts[0] + 1]];
  if (cuts.size() > 1) used.rare_min_ir = irs[order[cuts[1] + 1]];
}

}  // namespace

LevelPartition partition(std::span<const double> irs, const Thresholds& thresholds,
                         std::span<const std::string> names) {
  thresholds.validate();
  require(!irs.empty(), ErrorKind::data, "no classes to partition");
  require(names.empty() || names.size() == irs.size(), ErrorKind::shape, "one name per class");
  LevelPartition p;
  p.irs.assign(irs.begin(), irs.end());
  p.names.assign(names.begin(), names.end());
  for (double ir : irs) require(ir >= 1.0, ErrorKind::data, "imbalance ratio below 1");
  p.majority = static_cast<std::size_t>(std::min_element(irs.begin(), irs.end()) - irs.begin());
  p.used = thresholds;
  if (thresholds.mode == ThresholdMode::auto_gap) derive_auto_gap(irs, p.used);

  p.levels.resize(irs.size());
  for (std::size_t i = 0; i < irs.size(); ++i) {
    if (irs[i] < p.used.scarce_min_ir)
      p.levels[i] = Level::ample;
    else if (irs[i] < p.used.rare_min_ir)
      p.levels[i] = Level::scarce;
    else
      p.levels[i] = Level::rare;
  }
  for (const auto& [name, level] : thresholds.overrides) {
    auto it = std::find(p.names.begin(), p.names.end(), name);
    require(it != p.names.end(), ErrorKind::config, "level override for unknown class '" + name + "'");
    p.levels[static_cast<std::size_t>(it - p.names.begin())] = level;
  }
  require(p.levels[p.majority] == Level::ample, ErrorKind::policy,
          "the majority class must stay ample");
  return p;
}

std::vector<std::size_t> augmentation_targets(const LevelPartition& p,
                                              std::span<const std::size_t> counts) {
  require(counts.size() == p.size(), ErrorKind::shape, "one count per class");
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::size_t min_ample = none, min_scarce = none;
  bool any_rare = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (p.levels[i] == Level::ample) min_ample = std::min(min_ample, counts[i]);
    if (p.levels[i] == Level::scarce) min_scarce = std::min(min_scarce, counts[i]);
    any_rare = any_rare || p.levels[i] == Level::rare;
  }
  require(min_ample != none, ErrorKind::policy, "no ample class to size targets against");
  if (any_rare && min_scarce == none) {
    log::warn("rare classes but no scarce class; rare targets fall back to the smallest ample count");
    min_scarce = min_ample;
  }
  std::vector<std::size_t> targets(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    switch (p.levels[i]) {
      case Level::ample: targets[i] = counts[i]; break;
      case Level::scarce: targets[i] = std::max(counts[i], min_ample); break;
      case Level::rare: targets[i] = std::max(counts[i], min_scarce); break;
    }
  }
  return targets;
}

LevelPartition level_classes(std::span<const std::size_t> counts,
                             std::span<const std::string> names, const Thresholds& thresholds) {
  const auto irs = imbalance_ratios(counts);
  LevelPartition p = partition(irs, thresholds, names);
  p.counts.assign(counts.begin(), counts.end());
  p.targets = augmentation_targets(p, counts);
  return p;
}

std::string level_report_text(const LevelPartition& p) {
  std::ostringstream ss;
  ss << "mode: " << (p.used.mode == ThresholdMode::fixed ? "fixed" : "auto-gap")
     << ", scarce_min_ir=" << p.used.scarce_min_ir << ", rare_min_ir=" << p.used.rare_min_ir << '\n';
  ss << "majority: " << (p.names.empty() ? std::to_string(p.majority) : p.names[p.majority]) << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %12s %16s %8s %12s\n", "class", "count", "IR", "level",
                "target");
  ss << line;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(line, sizeof line, "%-24s %12zu %16.2f %8s %12zu\n",
                  p.names.empty() ? std::to_string(i).c_str() : p.names[i].c_str(),
                  p.counts.empty() ? std::size_t{0} : p.counts[i], p.irs[i],
                  std::string(to_string(p.levels[i])).c_str(),
                  p.targets.empty() ? std::size_t{0} : p.targets[i]);
    ss << line;
  }
  ss << "note: the Siamese autoencoder trains on scarce-class rows plus an equal-size "
        "sample of ample rows\n";
  return ss.str();
}

void write_level_report_csv(const std::filesystem::path& path, const LevelPartition& p) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  out << "class,count,ir,level,target\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << (p.names.empty() ? std::to_string(i) : p.names[i]) << ','
        << (p.counts.empty() ? 0 : p.counts[i]) << ',' << data::format_double(p.irs[i]) << ','
        << to_string(p.levels[i]) << ',' << (p.targets.empty() ? 0 : p.targets[i]) << '\n';
  }
}

LevelPartition read_level_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) &&
              data::trim(line) == "class,count,ir,level,target",
          ErrorKind::format, "bad level report header");
  LevelPartition p;
  while (std::getline(in, line)) {
    if (data::trim(line).empty()) continue;
    const auto f = data::split_csv_line(line);
    require(f.size() == 5, ErrorKind::format, "bad level report row");
    const auto count = data::parse_double(f[1]);
    const auto ir = data::parse_double(f[2]);
    const auto target = data::parse_double(f[4]);
    require(count && ir && target, ErrorKind::format, "bad level report number");
    p.names.emplace_back(f[0]);
    p.counts.push_back(static_cast<std::size_t>(*count));
    p.irs.push_back(*ir);
    p.levels.push_back(parse_level(f[3]));
    p.targets.push_back(static_cast<std::size_t>(*target));
  }
  if (!p.irs.empty())
    p.majority = static_cast<std::size_t>(std::min_element(p.irs.begin(), p.irs.end()) - p.irs.begin());
  return p;
}

}  // namespace imbaug::level
