#include "imbaug/data/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"

namespace imbaug::data {

std::vector<std::size_t> Dataset::counts() const {
  std::vector<std::size_t> c(label_names.size(), 0);
  for (int l : labels) ++c.at(static_cast<std::size_t>(l));
  return c;
}

int Dataset::label_id(std::string_view name) const {
  for (std::size_t i = 0; i < label_names.size(); ++i)
    if (label_names[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::size_t> Dataset::rows_of(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(i);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out = empty_like();
  out.features = select_rows(features, rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(labels.at(r));
  return out;
}

Dataset Dataset::empty_like() const {
  Dataset out;
  out.features = Matrix(0, cols());
  out.label_names = label_names;
  out.feature_names = feature_names;
  return out;
}

void Dataset::append(std::span<const double> row, int label) {
  require(label >= 0 && static_cast<std::size_t>(label) < label_names.size(), ErrorKind::label,
          "append with unknown label id");
  features.append_row(row);
  labels.push_back(label);
}

void Dataset::validate() const {
  require(labels.size() == features.rows(), ErrorKind::data, "label count differs from row count");
  require(feature_names.empty() || feature_names.size() == features.cols(), ErrorKind::data,
          "feature name count differs from column count");
  for (int l : labels)
    require(l >= 0 && static_cast<std::size_t>(l) < label_names.size(), ErrorKind::data,
            "label id without a name");
}

std::string IngestReport::summary() const {
  std::ostringstream ss;
  ss << "rows read " << rows_read << ", kept " << rows_kept << ", dropped " << dropped()
     << " (non-numeric " << dropped_non_numeric << ", non-finite " << dropped_non_finite
     << ", wrong width " << dropped_wrong_width << ")";
  return ss.str();
}

LoadResult parse_dataset(std::istream& in, const LoadOptions& options) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::schema, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  std::ptrdiff_t label_col = -1;
  std::vector<std::size_t> feature_cols;
  LoadResult result;
  auto& ds = result.dataset;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == trim(options.label_column)) {
      label_col = static_cast<std::ptrdiff_t>(i);
    } else if (std::find(options.ignore_columns.begin(), options.ignore_columns.end(),
                         header[i]) == options.ignore_columns.end()) {
      feature_cols.push_back(i);
      ds.feature_names.emplace_back(header[i]);
    }
  }
  require(label_col >= 0, ErrorKind::schema,
          "label column '" + options.label_column + "' not found in header");

  ds.label_names = options.known_labels;
  ds.features = Matrix(0, feature_cols.size());
  std::vector<double> row(feature_cols.size());
  auto& report = result.report;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++report.rows_read;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      ++report.dropped_wrong_width;
      continue;
    }
    bool numeric = true, finite = true;
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const auto v = parse_double(fields[feature_cols[j]]);
      if (!v) {
        numeric = false;
        break;
      }
      if (!std::isfinite(*v)) finite = false;
      row[j] = *v;
    }
    if (!numeric || !finite) {
      require(options.drop_non_finite, ErrorKind::input,
              "row " + std::to_string(report.rows_read) + " has a non-numeric or non-finite feature");
      ++(numeric ? report.dropped_non_finite : report.dropped_non_numeric);
      continue;
    }
    const std::string label(trim(fields[static_cast<std::size_t>(label_col)]));
    int id = ds.label_id(label);
    if (id < 0) {
      ds.label_names.push_back(label);
      id = static_cast<int>(ds.label_names.size() - 1);
    }
    ds.features.append_row(row);
    ds.labels.push_back(id);
  }
  report.rows_kept = ds.rows();
  require(ds.rows() > 0, ErrorKind::data, "no rows left after filtering (" + report.summary() + ")");
  return result;
}

LoadResult load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open " + path.string());
  return parse_dataset(in, options);
}

void write_dataset(std::ostream& out, const Dataset& ds, std::string_view label_column,
                   std::span<const std::string> provenance) {
  ds.validate();
  require(provenance.empty() || provenance.size() == ds.rows(), ErrorKind::shape,
          "provenance length differs from row count");
  for (std::size_t c = 0; c < ds.cols(); ++c) {
    out << (ds.feature_names.empty() ? "f" + std::to_string(c) : ds.feature_names[c]) << ',';
  }
  out << label_column;
  if (!provenance.empty()) out << ",Provenance";
  out << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (double v : ds.features.row(r)) out << format_double(v) << ',';
    out << ds.label_names[static_cast<std::size_t>(ds.labels[r])];
    if (!provenance.empty()) out << ',' << provenance[r];
    out << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds,
                   std::string_view label_column, std::span<const std::string> provenance) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  write_dataset(out, ds, label_column, provenance);
}

std::uint64_t fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(ds.rows());
  mix(ds.cols());
  for (double v : ds.features.values()) mix(std::bit_cast<std::uint64_t>(v));
  for (int l : ds.labels) {
    for (unsigned char c : ds.label_names[static_cast<std::size_t>(l)]) mix(c);
    mix(0xff);
  }
  return h;
}

}  // namespace imbaug::data
