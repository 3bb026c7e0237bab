#include "imbaug/skn/skn.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/rng.hpp"
#include "imbaug/simd/kernels.hpp"

namespace imbaug::skn {
namespace {

std::size_t effective_k(std::size_t rows, std::size_t k) {
  require(rows >= 2, ErrorKind::neighbor, "nearest neighbors need at least two points");
  require(k >= 1, ErrorKind::config, "k must be at least 1");
  if (k > rows - 1) {
    log::warn("k=" + std::to_string(k) + " exceeds the " + std::to_string(rows - 1) +
              " available neighbors; clamping");
    return rows - 1;
  }
  return k;
}

std::vector<std::size_t> nearest(const Matrix& points, std::size_t query, std::size_t k) {
  const auto& kern = simd::kernels();
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(points.rows() - 1);
  const double* q = points.row(query).data();
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (i == query) continue;
    dist.emplace_back(kern.squared_distance(q, points.row(i).data(), points.cols()), i);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

}  // namespace

std::vector<std::size_t> knn(const Matrix& points, std::size_t query, std::size_t k) {
  require(query < points.rows(), ErrorKind::input, "query index out of range");
  return nearest(points, query, effective_k(points.rows(), k));
}

KnnIndex build_knn_index(const Matrix& points, std::size_t k) {
  KnnIndex index;
  index.k = effective_k(points.rows(), k);
  index.neighbors.reserve(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) index.neighbors.push_back(nearest(points, i, index.k));
  return index;
}

SknResult skn_synthesize(const Matrix& class_points, std::size_t count, const SknConfig& config) {
  require(class_points.rows() > 0, ErrorKind::data, "no samples to synthesize from");
  require(config.k >= 1, ErrorKind::config, "k must be at least 1");
  if (config.fixed_lambda)
    require(*config.fixed_lambda >= 0.0 && *config.fixed_lambda <= 1.0, ErrorKind::config,
            "lambda must lie in [0, 1]");
  SknResult result;
  result.samples = Matrix(0, class_points.cols());
  if (count == 0) return result;
  result.samples.reserve_rows(count);
  Rng rng(config.seed);
  const std::size_t d = class_points.cols();
  std::vector<double> row(d);

  if (class_points.rows() == 1) {
    log::warn("class has a single sample; synthesizing jittered copies instead of interpolating");
    auto x = class_points.row(0);
    for (std::size_t t = 0; t < count; ++t) {
      for (std::size_t f = 0; f < d; ++f) row[f] = std::clamp(x[f] + rng.uniform(-1e-3, 1e-3), 0.0, 1.0);
      result.samples.append_row(row);
    }
    return result;
  }

  const auto index = build_knn_index(class_points, config.k);
  result.draws.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t src = t % class_points.rows();
    const std::size_t nb = index.neighbors[src][rng.uniform_index(index.k)];
    const double lambda = config.fixed_lambda ? *config.fixed_lambda : rng.uniform();
    auto xi = class_points.row(src);
    auto xj = class_points.row(nb);
    for (std::size_t f = 0; f < d; ++f) row[f] = xi[f] + lambda * (xj[f] - xi[f]);
    result.samples.append_row(row);
    result.draws.push_back({src, nb, lambda});
  }
  return result;
}

}  // namespace imbaug::skn
