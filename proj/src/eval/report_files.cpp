#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"
#include "imbaug/eval/metrics.hpp"

namespace imbaug::eval {
namespace fs = std::filesystem;

namespace {

using data::format_double;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::report, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!data::trim(line).empty()) lines.push_back(line);
  return lines;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_per_class_csv(const fs::path& path, const MetricsReport& report) {
  auto out = open_out(path);
  out << "class,precision,recall,f_beta,support\n";
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    out << report.classes()[c] << ',' << format_double(m.precision) << ','
        << format_double(m.recall) << ',' << format_double(m.f_beta) << ',' << m.support << '\n';
  }
}

void write_aggregate_csv(const fs::path& path, const MetricsReport& report) {
  auto out = open_out(path);
  out << "average,precision,recall,f_beta\n";
  const auto row = [&](const char* name, const Aggregate& a) {
    out << name << ',' << format_double(a.precision) << ',' << format_double(a.recall) << ','
        << format_double(a.f_beta) << '\n';
  };
  row("weighted", report.totals.weighted);
  row("macro", report.totals.macro);
}

void write_confusion_csv(const fs::path& path, const ConfusionMatrix& cm) {
  auto out = open_out(path);
  out << "true\\predicted";
  for (const auto& c : cm.classes) out << ',' << c;
  out << '\n';
  for (std::size_t t = 0; t < cm.size(); ++t) {
    out << cm.classes[t];
    for (auto v : cm.counts[t]) out << ',' << v;
    out << '\n';
  }
}

void write_delta_csv(const fs::path& path, const DeltaTable& table) {
  auto out = open_out(path);
  out << "method,baseline,class,precision,recall,f_beta\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < table.classes.size(); ++c) {
      const auto& m = row.per_class[c];
      out << row.method << ',' << table.baseline << ',' << table.classes[c] << ','
          << format_double(m.precision) << ',' << format_double(m.recall) << ','
          << format_double(m.f_beta) << '\n';
    }
    for (const auto& [name, a] : {std::pair{"(weighted)", row.totals.weighted},
                                  std::pair{"(macro)", row.totals.macro}}) {
      out << row.method << ',' << table.baseline << ',' << name << ',' << format_double(a.precision)
          << ',' << format_double(a.recall) << ',' << format_double(a.f_beta) << '\n';
    }
  }
}

void write_pca_csv(const fs::path& path, const Pca2d& pca, std::span<const int> labels,
                   const std::vector<std::string>& classes, std::span<const std::string> tags) {
  require(labels.size() == pca.projection.rows(), ErrorKind::shape, "one label per projected row");
  require(tags.empty() || tags.size() == labels.size(), ErrorKind::shape, "one tag per projected row");
  auto out = open_out(path);
  out << "pc1,pc2,label" << (tags.empty() ? "" : ",tag") << '\n';
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto id = static_cast<std::size_t>(labels[r]);
    require(id < classes.size(), ErrorKind::label, "label id outside the dictionary");
    out << format_double(pca.projection(r, 0)) << ',' << format_double(pca.projection(r, 1)) << ','
        << classes[id];
    if (!tags.empty()) out << ',' << tags[r];
    out << '\n';
  }
}

std::string summary_text(const MetricsReport& report) {
  std::ostringstream ss;
  const std::string fb = "F" + format_double(report.beta);
  ss << "method: " << report.method << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %10s %10s %10s %10s\n", "class", "precision", "recall",
                fb.c_str(), "support");
  ss << line;
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    std::snprintf(line, sizeof line, "%-24s %10.4f %10.4f %10.4f %10llu\n",
                  report.classes()[c].c_str(), m.precision, m.recall, m.f_beta,
                  static_cast<unsigned long long>(m.support));
    ss << line;
  }
  for (const auto& [name, a] : {std::pair{"weighted avg", report.totals.weighted},
                                std::pair{"macro avg", report.totals.macro}}) {
    std::snprintf(line, sizeof line, "%-24s %10.4f %10.4f %10.4f\n", name, a.precision, a.recall,
                  a.f_beta);
    ss << line;
  }
  return ss.str();
}

std::string delta_text(const DeltaTable& table) {
  std::ostringstream ss;
  ss << "differences against " << table.baseline << " (F-beta, precision, recall)\n";
  for (const auto& row : table.rows) {
    ss << row.method << ":\n";
    for (std::size_t c = 0; c < table.classes.size(); ++c) {
      const auto& m = row.per_class[c];
      ss << "  " << table.classes[c] << "  " << fmt("%+.4f", m.f_beta) << "  "
         << fmt("%+.4f", m.precision) << "  " << fmt("%+.4f", m.recall) << '\n';
    }
    ss << "  weighted avg  " << fmt("%+.4f", row.totals.weighted.f_beta) << '\n';
    ss << "  macro avg  " << fmt("%+.4f", row.totals.macro.f_beta) << '\n';
  }
  return ss.str();
}

void write_report(const fs::path& dir, const MetricsReport& report) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string());
  write_per_class_csv(dir / "per_class.csv", report);
  write_aggregate_csv(dir / "aggregate.csv", report);
  write_confusion_csv(dir / "confusion.csv", report.confusion);
  auto meta = open_out(dir / "metrics_meta.txt");
  meta << "method = " << report.method << "\nbeta = " << format_double(report.beta) << '\n';
  auto summary = open_out(dir / "summary.txt");
  summary << summary_text(report);
}

MetricsReport read_report(const fs::path& dir, const std::string& method) {
  const auto path = dir / "confusion.csv";
  require(fs::exists(path), ErrorKind::report, "no metrics report in " + dir.string());
  const auto lines = read_lines(path);
  require(!lines.empty(), ErrorKind::report, path.string() + " is empty");
  const auto header = data::split_csv_line(lines[0]);
  std::vector<std::string> classes(header.begin() + 1, header.end());
  require(!classes.empty() && lines.size() == classes.size() + 1, ErrorKind::report,
          path.string() + " is not a square confusion matrix");

  std::vector<int> truth, predicted;
  for (std::size_t t = 0; t < classes.size(); ++t) {
    const auto f = data::split_csv_line(lines[t + 1]);
    require(f.size() == classes.size() + 1 && f[0] == classes[t], ErrorKind::report,
            "malformed row " + std::to_string(t + 1) + " in " + path.string());
    for (std::size_t p = 0; p < classes.size(); ++p) {
      const auto v = data::parse_double(f[p + 1]);
      require(v && *v >= 0.0 && *v == std::floor(*v), ErrorKind::report,
              "bad count in " + path.string());
      for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(*v); ++k) {
        truth.push_back(static_cast<int>(t));
        predicted.push_back(static_cast<int>(p));
      }
    }
  }
  double beta = 1.0;
  if (fs::exists(dir / "metrics_meta.txt")) {
    for (const auto& line : read_lines(dir / "metrics_meta.txt")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos || data::trim(std::string_view(line).substr(0, eq)) != "beta") continue;
      const auto v = data::parse_double(data::trim(std::string_view(line).substr(eq + 1)));
      require(v.has_value(), ErrorKind::report, "bad beta in " + dir.string());
      beta = *v;
    }
  }
  return evaluate(truth, predicted, classes, method, beta);
}

}  // namespace imbaug::eval
