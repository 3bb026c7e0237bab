#include <cmath>

#include "imbaug/error.hpp"
#include "imbaug/eval/metrics.hpp"

namespace imbaug::eval {
namespace {

using Vec = std::vector<double>;

Vec mat_vec(const Vec& c, const Vec& v) {
  const std::size_t d = v.size();
  Vec out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += c[i * d + j] * v[j];
    out[i] = s;
  }
  return out;
}

double norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void fix_sign(Vec& v) {
  for (double x : v) {
    if (std::abs(x) < 1e-12) continue;
    if (x < 0.0)
      for (double& y : v) y = -y;
    return;
  }
}

// Dominant eigenpair of a symmetric PSD matrix.
std::pair<double, Vec> dominant(const Vec& c, std::size_t d) {
  Vec v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  double n = norm(v);
  for (double& x : v) x /= n;
  double lambda = 0.0;
  for (int it = 0; it < 200000; ++it) {
    Vec w = mat_vec(c, v);
    n = norm(w);
    if (n == 0.0) return {0.0, v};
    for (double& x : w) x /= n;
    lambda = 0.0;
    const Vec cw = mat_vec(c, w);
    for (std::size_t i = 0; i < d; ++i) lambda += w[i] * cw[i];
    double resid = 0.0;
    for (std::size_t i = 0; i < d; ++i) resid += (cw[i] - lambda * w[i]) * (cw[i] - lambda * w[i]);
    v = std::move(w);
    if (std::sqrt(resid) <= 1e-13 * std::max(1.0, std::abs(lambda))) break;
  }
  return {lambda, v};
}

}  // namespace

Pca2d pca2d(const Matrix& data) {
  require(data.rows() >= 2, ErrorKind::degenerate, "PCA needs at least two rows");
  require(data.cols() >= 2, ErrorKind::degenerate, "PCA to two dimensions needs two features");
  const std::size_t n = data.rows(), d = data.cols();
  Pca2d p;
  p.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) p.mean[j] += data(r, j);
  for (double& m : p.mean) m /= static_cast<double>(n);

  Vec cov(d * d, 0.0);
  Vec centered(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = data(r, j) - p.mean[j];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) cov[i * d + j] += centered[i] * centered[j];
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov[i * d + j] /= static_cast<double>(n - 1);
      cov[j * d + i] = cov[i * d + j];
    }
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += cov[i * d + i];
  const double tol = 1e-12 * std::max(1.0, trace);

  for (int k = 0; k < 2; ++k) {
    auto [lambda, v] = dominant(cov, d);
    require(lambda > tol, ErrorKind::degenerate,
            "data has fewer than two directions of nonzero variance");
    fix_sign(v);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov[i * d + j] -= lambda * v[i] * v[j];
    p.variance[static_cast<std::size_t>(k)] = lambda;
    p.components[static_cast<std::size_t>(k)] = std::move(v);
  }
  p.projection = project(p, data);
  return p;
}

Matrix project(const Pca2d& pca, const Matrix& data) {
  require(data.cols() == pca.mean.size(), ErrorKind::shape, "projection input has the wrong width");
  Matrix out(data.rows(), 2);
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t k = 0; k < 2; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < data.cols(); ++j) s += (data(r, j) - pca.mean[j]) * pca.components[k][j];
      out(r, k) = s;
    }
  return out;
}

}  // namespace imbaug::eval
