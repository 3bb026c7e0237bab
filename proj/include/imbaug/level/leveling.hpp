#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imbaug::level {

// Ample classes are kept as-is, scarce classes are topped up by the
// conditional GAN, rare classes by neighbor interpolation.
enum class Level { ample, scarce, rare };

std::string_view to_string(Level level);
Level parse_level(std::string_view s);

enum class ThresholdMode { fixed, auto_gap };

struct Thresholds {
  double scarce_min_ir = 100.0;
  double rare_min_ir = 10000.0;
  ThresholdMode mode = ThresholdMode::fixed;
  std::map<std::string, Level> overrides;  // by class name

  void validate() const;
};

struct LevelPartition {
  std::vector<std::string> names;
  std::vector<std::size_t> counts;
  std::vector<double> irs;
  std::vector<Level> levels;
  std::vector<std::size_t> targets;  // filled by augmentation_targets
  std::size_t majority = 0;
  Thresholds used;  // thresholds actually applied (derived ones in auto-gap mode)

  std::size_t size() const { return irs.size(); }
};

// n_max / n_i for every class; every count must be positive.
std::vector<double> imbalance_ratios(std::span<const std::size_t> counts);

// ample if IR < scarce_min_ir, scarce if below rare_min_ir, rare otherwise.
// In auto-gap mode the boundaries sit at the two widest gaps between
// consecutive sorted log10(IR) values. names may be empty (overrides then
// cannot apply).
LevelPartition partition(std::span<const double> irs, const Thresholds& thresholds,
                         std::span<const std::string> names = {});

// ample: own count; scarce: smallest ample count; rare: smallest scarce count
// (smallest ample count, with a warning, when no scarce class exists). Never
// below the current count.
std::vector<std::size_t> augmentation_targets(const LevelPartition& partition,
                                              std::span<const std::size_t> counts);

// imbalance_ratios + partition + augmentation_targets on one set of counts.
LevelPartition level_classes(std::span<const std::size_t> counts,
                             std::span<const std::string> names, const Thresholds& thresholds);

std::string level_report_text(const LevelPartition& p);
// class,count,ir,level,target
void write_level_report_csv(const std::filesystem::path& path, const LevelPartition& p);
LevelPartition read_level_report_csv(const std::filesystem::path& path);

}  // namespace imbaug::level
