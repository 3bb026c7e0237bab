#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imbaug/data/dataset.hpp"

namespace imbaug::data {

// Lower-case ASCII letters and digits, every other run of bytes collapsed to
// a single space. Makes "Web Attack \x96 Brute Force" and
// "Web Attack - Brute Force" the same key.
std::string canonical_label_key(std::string_view raw);

// Subclass -> grouped label table.
class LabelMapping {
 public:
  LabelMapping() = default;

  // The CICIDS2017 grouping: BENIGN, DoS/DDoS, PortScan, Patator, Web Attack,
  // Bot, Infiltration, Heartbleed.
  static LabelMapping builtin();
  // Two-column text "subclass,group"; '#' starts a comment line.
  static LabelMapping load(const std::filesystem::path& path);

  void add(std::string_view subclass, std::string_view group);
  std::optional<std::string> lookup(std::string_view raw) const;
  // Group names in first-declared order.
  const std::vector<std::string>& groups() const { return groups_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // canonical key -> group
  std::vector<std::string> groups_;
};

// Rewrites labels to their groups. Group ids follow the mapping's declared
// order, restricted to groups present. In non-strict mode unmapped labels are
// kept as their own group, appended after the mapped ones.
Dataset map_labels(const Dataset& ds, const LabelMapping& mapping, bool strict = true);

}  // namespace imbaug::data
