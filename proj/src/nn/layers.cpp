#include "imbaug/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imbaug/error.hpp"
#include "imbaug/simd/kernels.hpp"

namespace imbaug::nn {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::layernorm: return "layernorm";
    case LayerKind::leakyrelu: return "leakyrelu";
    case LayerKind::relu: return "relu";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::softmax: return "softmax";
  }
  return "unknown";
}

void Layer::zero_grad() {
  for (auto& p : params()) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

namespace {

void check_input(const Layer& layer, const Matrix& x) {
  require(x.cols() == layer.in_dim(), ErrorKind::shape,
          std::string(to_string(layer.kind())) + " layer expects " +
              std::to_string(layer.in_dim()) + " columns, got " + std::to_string(x.cols()));
}

void check_cache(const LayerCache& cache, const Matrix& grad_out) {
  require(cache.valid, ErrorKind::state, "backward called without a forward cache");
  require(grad_out.rows() == cache.output.rows() && grad_out.cols() == cache.output.cols(),
          ErrorKind::shape, "upstream gradient does not match cached output");
}

}  // namespace

// ---- Dense ---------------------------------------------------------------

Dense::Dense(std::size_t in, std::size_t out, Rng& rng)
    : weight_(in, out),
      bias_(out, 0.0),
      grad_weight_(in, out),
      grad_bias_(out, 0.0) {
  require(in > 0 && out > 0, ErrorKind::config, "dense layer with zero width");
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (double& w : weight_.values()) w = rng.uniform(-limit, limit);
}

Dense::Dense(Matrix weight, std::vector<double> bias)
    : weight_(std::move(weight)),
      bias_(std::move(bias)),
      grad_weight_(weight_.rows(), weight_.cols()),
      grad_bias_(bias_.size(), 0.0) {
  require(bias_.size() == weight_.cols(), ErrorKind::shape, "dense bias width mismatch");
}

Matrix Dense::infer(const Matrix& x) const {
  check_input(*this, x);
  Matrix y(x.rows(), out_dim());
  simd::kernels().gemm_nn(x.rows(), in_dim(), out_dim(), x.data(), weight_.data(), y.data());
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias_[c];
  }
  return y;
}

Matrix Dense::forward(const Matrix& x, Mode mode, LayerCache& cache) {
  Matrix y = infer(x);
  cache.input = x;
  cache.output = y;
  cache.mode = mode;
  cache.valid = true;
  return y;
}

Matrix Dense::backward(const Matrix& grad_out, const LayerCache& cache) {
  check_cache(cache, grad_out);
  const std::size_t batch = grad_out.rows();
  const auto& k = simd::kernels();
  k.gemm_tn_acc(batch, in_dim(), out_dim(), cache.input.data(), grad_out.data(),
                grad_weight_.data());
  for (std::size_t r = 0; r < batch; ++r) {
    auto g = grad_out.row(r);
    for (std::size_t c = 0; c < g.size(); ++c) grad_bias_[c] += g[c];
  }
  Matrix grad_in(batch, in_dim());
  k.gemm_nt(batch, out_dim(), in_dim(), grad_out.data(), weight_.data(), grad_in.data());
  return grad_in;
}

std::vector<ParamRef> Dense::params() {
  return {{weight_.values(), grad_weight_.values()}, {bias_, grad_bias_}};
}

// ---- BatchNorm -----------------------------------------------------------

BatchNorm::BatchNorm(std::size_t dim, double eps, double momentum)
    : eps_(eps),
      momentum_(momentum),
      gamma_(dim, 1.0),
      beta_(dim, 0.0),
      running_mean_(dim, 0.0),
      running_var_(dim, 1.0),
      grad_gamma_(dim, 0.0),
      grad_beta_(dim, 0.0) {
  require(dim > 0, ErrorKind::config, "batchnorm with zero width");
}

Matrix BatchNorm::infer(const Matrix& x) const {
  check_input(*this, x);
  Matrix y(x.rows(), x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const double inv = 1.0 / std::sqrt(running_var_[c] + eps_);
    for (std::size_t r = 0; r < x.rows(); ++r)
      y(r, c) = gamma_[c] * (x(r, c) - running_mean_[c]) * inv + beta_[c];
  }
  return y;
}

Matrix BatchNorm::forward(const Matrix& x, Mode mode, LayerCache& cache) {
  check_input(*this, x);
  cache.input = x;
  cache.mode = mode;
  cache.valid = true;
  const std::size_t n = x.rows(), d = x.cols();
  if (mode == Mode::eval || n == 0) {
    cache.inv_std.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) cache.inv_std[c] = 1.0 / std::sqrt(running_var_[c] + eps_);
    cache.output = infer(x);
    return cache.output;
  }

  cache.normalized = Matrix(n, d);
  cache.inv_std.assign(d, 0.0);
  Matrix y(n, d);
  const double nd = static_cast<double>(n);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, c);
    mean /= nd;
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = x(r, c) - mean;
      var += dv * dv;
    }
    var /= nd;
    const double inv = 1.0 / std::sqrt(var + eps_);
    cache.inv_std[c] = inv;
    for (std::size_t r = 0; r < n; ++r) {
      const double xh = (x(r, c) - mean) * inv;
      cache.normalized(r, c) = xh;
      y(r, c) = gamma_[c] * xh + beta_[c];
    }
    const double unbiased = n > 1 ? var * nd / (nd - 1.0) : var;
    running_mean_[c] = (1.0 - momentum_) * running_mean_[c] + momentum_ * mean;
    running_var_[c] = (1.0 - momentum_) * running_var_[c] + momentum_ * unbiased;
  }
  cache.output = y;
  return y;
}

Matrix BatchNorm::backward(const Matrix& grad_out, const LayerCache& cache) {
  check_cache(cache, grad_out);
  const std::size_t n = grad_out.rows(), d = grad_out.cols();
  Matrix grad_in(n, d);
  if (cache.mode == Mode::eval) {
    for (std::size_t c = 0; c < d; ++c) {
      const double inv = cache.inv_std[c];
      for (std::size_t r = 0; r < n; ++r) {
        const double xh = (cache.input(r, c) - running_mean_[c]) * inv;
        grad_gamma_[c] += grad_out(r, c) * xh;
        grad_beta_[c] += grad_out(r, c);
        grad_in(r, c) = grad_out(r, c) * gamma_[c] * inv;
      }
    }
    return grad_in;
  }
  const double nd = static_cast<double>(n);
  for (std::size_t c = 0; c < d; ++c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double g = grad_out(r, c);
      const double xh = cache.normalized(r, c);
      grad_gamma_[c] += g * xh;
      grad_beta_[c] += g;
      sum_g += g * gamma_[c];
      sum_gx += g * gamma_[c] * xh;
    }
    const double scale = cache.inv_std[c] / nd;
    for (std::size_t r = 0; r < n; ++r) {
      const double gxh = grad_out(r, c) * gamma_[c];
      grad_in(r, c) = scale * (nd * gxh - sum_g - cache.normalized(r, c) * sum_gx);
    }
  }
  return grad_in;
}

std::vector<ParamRef> BatchNorm::params() {
  return {{gamma_, grad_gamma_}, {beta_, grad_beta_}};
}

// ---- LayerNorm -----------------------------------------------------------

LayerNorm::LayerNorm(std::size_t dim, double eps)
    : eps_(eps), gamma_(dim, 1.0), beta_(dim, 0.0), grad_gamma_(dim, 0.0), grad_beta_(dim, 0.0) {
  require(dim > 0, ErrorKind::config, "layernorm with zero width");
}

Matrix LayerNorm::normalize(const Matrix& x, std::vector<double>* inv_std, Matrix* xhat) const {
  check_input(*this, x);
  const std::size_t n = x.rows(), d = x.cols();
  Matrix y(n, d);
  if (xhat) *xhat = Matrix(n, d);
  if (inv_std) inv_std->assign(n, 0.0);
  const double dd = static_cast<double>(d);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= dd;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= dd;
    const double inv = 1.0 / std::sqrt(var + eps_);
    if (inv_std) (*inv_std)[r] = inv;
    for (std::size_t c = 0; c < d; ++c) {
      const double xh = (row[c] - mean) * inv;
      if (xhat) (*xhat)(r, c) = xh;
      y(r, c) = gamma_[c] * xh + beta_[c];
    }
  }
  return y;
}

Matrix LayerNorm::infer(const Matrix& x) const { return normalize(x, nullptr, nullptr); }

Matrix LayerNorm::forward(const Matrix& x, Mode mode, LayerCache& cache) {
  cache.output = normalize(x, &cache.inv_std, &cache.normalized);
  cache.input = x;
  cache.mode = mode;
  cache.valid = true;
  return cache.output;
}

Matrix LayerNorm::backward(const Matrix& grad_out, const LayerCache& cache) {
  check_cache(cache, grad_out);
  const std::size_t n = grad_out.rows(), d = grad_out.cols();
  const double dd = static_cast<double>(d);
  Matrix grad_in(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double g = grad_out(r, c);
      const double xh = cache.normalized(r, c);
      grad_gamma_[c] += g * xh;
      grad_beta_[c] += g;
      sum_g += g * gamma_[c];
      sum_gx += g * gamma_[c] * xh;
    }
    const double scale = cache.inv_std[r] / dd;
    for (std::size_t c = 0; c < d; ++c) {
      const double gxh = grad_out(r, c) * gamma_[c];
      grad_in(r, c) = scale * (dd * gxh - sum_g - cache.normalized(r, c) * sum_gx);
    }
  }
  return grad_in;
}

std::vector<ParamRef> LayerNorm::params() {
  return {{gamma_, grad_gamma_}, {beta_, grad_beta_}};
}

// ---- Activations ---------------------------------------------------------

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = std::exp(in[c] - mx);
      sum += o[c];
    }
    for (double& v : o) v /= sum;
  }
  return out;
}

Activation::Activation(LayerKind kind, std::size_t dim, double slope)
    : kind_(kind), dim_(dim), slope_(slope) {
  require(kind != LayerKind::dense && kind != LayerKind::batchnorm &&
              kind != LayerKind::layernorm,
          ErrorKind::config, "not an activation kind");
  require(dim > 0, ErrorKind::config, "activation with zero width");
}

Matrix Activation::infer(const Matrix& x) const {
  check_input(*this, x);
  if (kind_ == LayerKind::softmax) return softmax_rows(x);
  Matrix y(x.rows(), x.cols());
  auto in = x.values();
  auto out = y.values();
  switch (kind_) {
    case LayerKind::leakyrelu:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : slope_ * in[i];
      break;
    case LayerKind::relu:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
      break;
    case LayerKind::sigmoid:
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = sigmoid(in[i]);
      break;
    default: break;
  }
  return y;
}

Matrix Activation::forward(const Matrix& x, Mode mode, LayerCache& cache) {
  cache.output = infer(x);
  cache.input = x;
  cache.mode = mode;
  cache.valid = true;
  return cache.output;
}

Matrix Activation::backward(const Matrix& grad_out, const LayerCache& cache) {
  check_cache(cache, grad_out);
  Matrix grad_in(grad_out.rows(), grad_out.cols());
  auto g = grad_out.values();
  auto x = cache.input.values();
  auto y = cache.output.values();
  auto gi = grad_in.values();
  switch (kind_) {
    case LayerKind::leakyrelu:
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] = x[i] > 0.0 ? g[i] : slope_ * g[i];
      break;
    case LayerKind::relu:
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] = x[i] > 0.0 ? g[i] : 0.0;
      break;
    case LayerKind::sigmoid:
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] = g[i] * y[i] * (1.0 - y[i]);
      break;
    case LayerKind::softmax:
      for (std::size_t r = 0; r < grad_out.rows(); ++r) {
        auto gr = grad_out.row(r);
        auto yr = cache.output.row(r);
        double s = 0.0;
        for (std::size_t c = 0; c < gr.size(); ++c) s += gr[c] * yr[c];
        auto out = grad_in.row(r);
        for (std::size_t c = 0; c < gr.size(); ++c) out[c] = yr[c] * (gr[c] - s);
      }
      break;
    default: break;
  }
  return grad_in;
}

}  // namespace imbaug::nn
