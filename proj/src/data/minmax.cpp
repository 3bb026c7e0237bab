#include <algorithm>
#include <fstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/data/preprocess.hpp"
#include "imbaug/error.hpp"

namespace imbaug::data {

NormalizationParams fit_minmax(const Matrix& train) {
  require(train.rows() > 0, ErrorKind::data, "fit_minmax on empty data");
  NormalizationParams p;
  p.min.assign(train.row(0).begin(), train.row(0).end());
  p.max = p.min;
  for (std::size_t r = 1; r < train.rows(); ++r) {
    auto row = train.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      p.min[c] = std::min(p.min[c], row[c]);
      p.max[c] = std::max(p.max[c], row[c]);
    }
  }
  p.fitted = true;
  return p;
}

NormalizationParams fit_minmax(const Dataset& train) { return fit_minmax(train.features); }

Matrix apply_minmax(const NormalizationParams& params, const Matrix& data) {
  require(params.fitted, ErrorKind::state, "normalization parameters not fitted");
  require(params.min.size() == data.cols(), ErrorKind::shape,
          "normalization fitted on " + std::to_string(params.min.size()) + " features, data has " +
              std::to_string(data.cols()));
  Matrix out(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    auto in = data.row(r);
    auto o = out.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) {
      const double range = params.max[c] - params.min[c];
      o[c] = range > 0.0 ? std::clamp((in[c] - params.min[c]) / range, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

Dataset apply_minmax(const NormalizationParams& params, const Dataset& data) {
  Dataset out = data.empty_like();
  out.features = apply_minmax(params, data.features);
  out.labels = data.labels;
  return out;
}

void save_normalization(const std::filesystem::path& path, const NormalizationParams& params) {
  require(params.fitted, ErrorKind::state, "saving unfitted normalization parameters");
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  out << "feature,min,max\n";
  for (std::size_t c = 0; c < params.min.size(); ++c)
    out << c << ',' << format_double(params.min[c]) << ',' << format_double(params.max[c]) << '\n';
}

NormalizationParams load_normalization(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && trim(line) == "feature,min,max",
          ErrorKind::format, "bad normalization header in " + path.string());
  NormalizationParams p;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    require(f.size() == 3, ErrorKind::format, "bad normalization row");
    const auto lo = parse_double(f[1]);
    const auto hi = parse_double(f[2]);
    require(lo && hi && *hi >= *lo, ErrorKind::format, "bad normalization values");
    p.min.push_back(*lo);
    p.max.push_back(*hi);
  }
  p.fitted = true;
  return p;
}

}  // namespace imbaug::data
