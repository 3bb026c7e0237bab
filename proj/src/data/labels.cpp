#include "imbaug/data/labels.hpp"

#include <algorithm>
#include <fstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"

namespace imbaug::data {

std::string canonical_label_key(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : raw) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (!alnum) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  }
  return out;
}

LabelMapping LabelMapping::builtin() {
  LabelMapping m;
  m.add("BENIGN", "BENIGN");
  for (auto s : {"DoS", "DoS Hulk", "DDoS", "DoS GoldenEye", "DoS slowloris", "DoS Slowhttptest"})
    m.add(s, "DoS/DDoS");
  m.add("PortScan", "PortScan");
  m.add("FTP-Patator", "Patator");
  m.add("SSH-Patator", "Patator");
  for (auto s : {"Web Attack-Brute Force", "Web Attack-XSS", "Web Attack-Sql Injection"})
    m.add(s, "Web Attack");
  m.add("Bot", "Bot");
  m.add("Infiltration", "Infiltration");
  m.add("Heartbleed", "Heartbleed");
  return m;
}

LabelMapping LabelMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open mapping file " + path.string());
  LabelMapping m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_csv_line(t);
    require(fields.size() == 2 && !fields[0].empty() && !fields[1].empty(), ErrorKind::mapping,
            path.string() + ":" + std::to_string(lineno) + ": expected 'subclass,group'");
    m.add(fields[0], fields[1]);
  }
  return m;
}

void LabelMapping::add(std::string_view subclass, std::string_view group) {
  const auto key = canonical_label_key(subclass);
  for (const auto& [k, g] : entries_)
    require(k != key || g == group, ErrorKind::mapping,
            "subclass '" + std::string(subclass) + "' mapped to two groups");
  entries_.emplace_back(key, std::string(group));
  if (std::find(groups_.begin(), groups_.end(), group) == groups_.end())
    groups_.emplace_back(group);
}

std::optional<std::string> LabelMapping::lookup(std::string_view raw) const {
  const auto key = canonical_label_key(raw);
  for (const auto& [k, g] : entries_)
    if (k == key) return g;
  return std::nullopt;
}

Dataset map_labels(const Dataset& ds, const LabelMapping& mapping, bool strict) {
  ds.validate();
  std::vector<std::string> target_of(ds.label_names.size());
  std::vector<std::string> passthrough;
  for (std::size_t i = 0; i < ds.label_names.size(); ++i) {
    if (auto g = mapping.lookup(ds.label_names[i])) {
      target_of[i] = *g;
    } else {
      require(!strict, ErrorKind::mapping, "no mapping for label '" + ds.label_names[i] + "'");
      target_of[i] = ds.label_names[i];
      passthrough.push_back(ds.label_names[i]);
    }
  }
  std::vector<std::string> names;
  for (const auto& g : mapping.groups())
    if (std::find(target_of.begin(), target_of.end(), g) != target_of.end()) names.push_back(g);
  for (const auto& p : passthrough)
    if (std::find(names.begin(), names.end(), p) == names.end()) names.push_back(p);

  std::vector<int> new_id(ds.label_names.size());
  for (std::size_t i = 0; i < target_of.size(); ++i)
    new_id[i] = static_cast<int>(std::find(names.begin(), names.end(), target_of[i]) - names.begin());

  Dataset out;
  out.features = ds.features;
  out.feature_names = ds.feature_names;
  out.label_names = std::move(names);
  out.labels.reserve(ds.labels.size());
  for (int l : ds.labels) out.labels.push_back(new_id[static_cast<std::size_t>(l)]);
  return out;
}

}  // namespace imbaug::data
