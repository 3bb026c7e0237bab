#include "imbaug/gan/scgan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"
#include "imbaug/nn/losses.hpp"

namespace imbaug::gan {

void ScganConfig::validate() const {
  require(noise_dim > 0, ErrorKind::config, "noise dimension must be positive");
  require(batch_size >= 2, ErrorKind::config, "GAN batch size must be at least 2");
  require(lr > 0.0, ErrorKind::config, "GAN learning rate must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0, ErrorKind::config, "beta1 must lie in [0, 1)");
}

void FilterPolicy::validate() const {
  require(eta >= 0.0 && eta <= 1.0, ErrorKind::config, "eta must lie in [0, 1]");
  require(max_attempt_factor >= 1, ErrorKind::config, "attempt factor must be at least 1");
}

void ScganModel::set_mode(nn::Mode mode) {
  generator.set_mode(mode);
  discriminator.set_mode(mode);
}

nn::Checkpoint ScganModel::to_checkpoint() const {
  nn::Checkpoint ckpt;
  ckpt.metadata["model"] = "scgan";
  ckpt.metadata["class"] = class_name;
  ckpt.metadata["data_dim"] = std::to_string(data_dim);
  ckpt.metadata["code_dim"] = std::to_string(code_dim);
  ckpt.metadata["noise_dim"] = std::to_string(noise_dim);
  ckpt.networks.emplace_back("generator", generator);
  ckpt.networks.emplace_back("discriminator", discriminator);
  return ckpt;
}

ScganModel ScganModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  require(ckpt.meta("model") == "scgan", ErrorKind::format, "checkpoint is not a GAN model");
  ScganModel m;
  m.generator = ckpt.network("generator");
  m.discriminator = ckpt.network("discriminator");
  m.class_name = ckpt.meta("class");
  m.data_dim = std::stoul(ckpt.meta("data_dim"));
  m.code_dim = std::stoul(ckpt.meta("code_dim"));
  m.noise_dim = std::stoul(ckpt.meta("noise_dim"));
  require(m.generator.in_dim() == m.code_dim + m.noise_dim && m.generator.out_dim() == m.data_dim &&
              m.discriminator.in_dim() == m.data_dim + m.code_dim,
          ErrorKind::format, "GAN checkpoint dimensions disagree");
  return m;
}

ScganModel make_scgan(std::size_t data_dim, std::size_t code_dim, const ScganConfig& config) {
  config.validate();
  require(data_dim > 0 && code_dim > 0, ErrorKind::config, "GAN dimensions must be positive");
  Rng rng(derive_seed(config.seed, "scgan-init"));
  ScganModel m;
  m.data_dim = data_dim;
  m.code_dim = code_dim;
  m.noise_dim = config.noise_dim;

  std::size_t width = code_dim + config.noise_dim;
  for (auto h : config.generator_hidden) {
    m.generator.dense(width, h, rng).batchnorm(h).activation(nn::LayerKind::leakyrelu, h);
    width = h;
  }
  m.generator.dense(width, data_dim, rng).activation(nn::LayerKind::sigmoid, data_dim);

  width = data_dim + code_dim;
  for (auto h : config.discriminator_hidden) {
    m.discriminator.dense(width, h, rng).layernorm(h).activation(nn::LayerKind::leakyrelu, h);
    width = h;
  }
  m.discriminator.dense(width, 1, rng).activation(nn::LayerKind::sigmoid, 1);
  return m;
}

namespace {

Matrix noise_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix z(rows, cols);
  for (auto& v : z.values()) v = rng.normal();
  return z;
}

std::vector<double> column(const Matrix& m) {
  return std::vector<double>(m.values().begin(), m.values().end());
}

Matrix as_column(const std::vector<double>& v) { return Matrix(v.size(), 1, v); }

constexpr std::size_t kRecalibrationBatches = 64;

}  // namespace

ScganTrainer::ScganTrainer(ScganModel& model, const ScganConfig& config)
    : model_(model),
      adam_g_(nn::AdamConfig{.lr = config.lr, .beta1 = config.beta1}),
      adam_d_(nn::AdamConfig{.lr = config.lr, .beta1 = config.beta1}) {
  config.validate();
}

StepRecord ScganTrainer::discriminator_step(const Matrix& real, const Matrix& conditions, Rng& rng) {
  require(real.rows() == conditions.rows() && real.rows() >= 1, ErrorKind::shape,
          "one condition per real row required");
  require(real.cols() == model_.data_dim && conditions.cols() == model_.code_dim, ErrorKind::shape,
          "GAN batch has the wrong width");
  const std::size_t b = real.rows();

  const Matrix z = noise_matrix(b, model_.noise_dim, rng);
  g_tape_.clear();
  fake_ = model_.generator.forward(hconcat(conditions, z), g_tape_);
  conditions_ = conditions;

  model_.discriminator.zero_grad();
  nn::Tape real_tape, fake_tape;
  const auto d_real = column(model_.discriminator.forward(hconcat(real, conditions), real_tape));
  const auto d_fake = column(model_.discriminator.forward(hconcat(fake_, conditions), fake_tape));
  const auto losses = nn::adversarial_losses(d_real, d_fake);
  model_.discriminator.backward(real_tape, as_column(nn::discriminator_real_grad(d_real)));
  model_.discriminator.backward(fake_tape, as_column(nn::discriminator_fake_grad(d_fake)));
  nn::adam_step(adam_d_, model_.discriminator.params());
  pending_ = true;

  StepRecord rec;
  rec.d_real = d_real;
  rec.d_fake = d_fake;
  rec.loss_d = losses.discriminator;
  return rec;
}

double ScganTrainer::generator_step() {
  require(pending_, ErrorKind::state, "generator step needs a preceding discriminator step");
  pending_ = false;
  nn::Tape d_tape;
  const auto d_fake = column(model_.discriminator.forward(hconcat(fake_, conditions_), d_tape));
  const auto losses = nn::adversarial_losses(d_fake, d_fake);
  const Matrix grad_in = model_.discriminator.backward(d_tape, as_column(nn::generator_grad(d_fake)));
  model_.discriminator.zero_grad();  // D is not updated here

  model_.generator.zero_grad();
  model_.generator.backward(g_tape_, column_block(grad_in, 0, model_.data_dim));
  nn::adam_step(adam_g_, model_.generator.params());
  return losses.generator;
}

ScganTrainResult train_scgan(const Matrix& class_data, const san::SanModel& san,
                             const ScganConfig& config, const std::string& class_name) {
  config.validate();
  require(class_data.rows() >= 2, ErrorKind::data,
          "GAN training needs at least two rows of class '" + class_name + "'");
  const Matrix codes = san::encode(san, class_data);
  ScganTrainResult result{make_scgan(class_data.cols(), codes.cols(), config), {}};
  ScganModel& model = result.model;
  model.class_name = class_name;
  model.set_mode(nn::Mode::train);
  ScganTrainer trainer(model, config);

  Rng rng(derive_seed(config.seed, "scgan-train"));
  std::vector<std::size_t> order(class_data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double sum_d = 0.0, sum_g = 0.0;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      if (e - b < 2) continue;
      const std::span<const std::size_t> idx(order.data() + b, e - b);
      auto rec = trainer.discriminator_step(select_rows(class_data, idx), select_rows(codes, idx), rng);
      rec.loss_g = trainer.generator_step();
      rec.epoch = epoch;
      rec.step = step++;
      require(std::isfinite(rec.loss_d) && std::isfinite(rec.loss_g), ErrorKind::diverged,
              "GAN loss for class '" + class_name + "' became non-finite in epoch " +
                  std::to_string(epoch + 1));
      if (config.on_step) config.on_step(rec);
      sum_d += rec.loss_d;
      sum_g += rec.loss_g;
      ++steps;
    }
    const double n = steps ? static_cast<double>(steps) : 1.0;
    result.history.discriminator.push_back(sum_d / n);
    result.history.generator.push_back(sum_g / n);
  }
  // Running statistics trail the weights during training; re-estimate them
  // from training-sized batches so eval-mode generation matches train mode.
  const std::size_t rows = std::min(config.batch_size, class_data.rows());
  std::vector<Matrix> batches;
  for (std::size_t i = 0; i < kRecalibrationBatches; ++i) {
    Matrix cond(rows, codes.cols());
    for (std::size_t r = 0; r < rows; ++r) {
      auto src = codes.row(rng.uniform_index(codes.rows()));
      std::copy(src.begin(), src.end(), cond.row(r).begin());
    }
    batches.push_back(hconcat(cond, noise_matrix(rows, model.noise_dim, rng)));
  }
  model.generator.recalibrate_batchnorm(batches);
  model.set_mode(nn::Mode::eval);
  return result;
}

Generated generate(const ScganModel& model, const Matrix& condition_pool, std::size_t count, Rng& rng) {
  require(condition_pool.rows() > 0, ErrorKind::data, "no conditions to generate from");
  require(condition_pool.cols() == model.code_dim, ErrorKind::shape, "condition width mismatch");
  Generated out;
  out.conditions = Matrix(count, model.code_dim);
  for (std::size_t i = 0; i < count; ++i) {
    auto src = condition_pool.row(rng.uniform_index(condition_pool.rows()));
    std::copy(src.begin(), src.end(), out.conditions.row(i).begin());
  }
  const Matrix z = noise_matrix(count, model.noise_dim, rng);
  out.samples = count ? model.generator.infer(hconcat(out.conditions, z)) : Matrix(0, model.data_dim);
  return out;
}

std::vector<double> discriminator_scores(const ScganModel& model, const Matrix& samples,
                                         const Matrix& conditions) {
  require(samples.rows() == conditions.rows(), ErrorKind::shape, "one condition per sample required");
  require(samples.cols() == model.data_dim && conditions.cols() == model.code_dim, ErrorKind::shape,
          "scoring input has the wrong width");
  if (samples.rows() == 0) return {};
  return column(model.discriminator.infer(hconcat(samples, conditions)));
}

FilterResult filter_generated(const ScganModel& model, const Matrix& samples, const Matrix& conditions,
                              const FilterPolicy& policy) {
  policy.validate();
  FilterResult out;
  out.scores = discriminator_scores(model, samples, conditions);
  for (std::size_t i = 0; i < out.scores.size(); ++i)
    if (out.scores[i] >= policy.eta) out.kept_rows.push_back(i);
  out.kept = select_rows(samples, out.kept_rows);
  out.kept_conditions = select_rows(conditions, out.kept_rows);
  return out;
}

SynthesisResult synthesize_to_target(const ScganModel& model, const Matrix& condition_pool,
                                     std::size_t count, const FilterPolicy& policy, std::uint64_t seed) {
  policy.validate();
  SynthesisResult out;
  out.samples = Matrix(0, model.data_dim);
  out.conditions = Matrix(0, model.code_dim);
  if (count == 0) return out;
  Rng rng(seed);
  const std::size_t budget = count * policy.max_attempt_factor;
  while (out.accepted < count && out.generated < budget) {
    const std::size_t want = std::clamp<std::size_t>(2 * (count - out.accepted), 64, 4096);
    const std::size_t batch = std::min(want, budget - out.generated);
    const auto gen = generate(model, condition_pool, batch, rng);
    const auto kept = filter_generated(model, gen.samples, gen.conditions, policy);
    out.generated += batch;
    for (std::size_t i = 0; i < kept.kept_rows.size() && out.accepted < count; ++i) {
      out.samples.append_row(kept.kept.row(i));
      out.conditions.append_row(kept.kept_conditions.row(i));
      out.scores.push_back(kept.scores[kept.kept_rows[i]]);
      ++out.accepted;
    }
  }
  if (out.accepted < count) {
    fail(ErrorKind::yield, "only " + std::to_string(out.accepted) + " of " + std::to_string(count) +
                               " samples for class '" + model.class_name + "' passed eta=" +
                               data::format_double(policy.eta) + " after " +
                               std::to_string(out.generated) + " attempts (acceptance rate " +
                               data::format_double(out.acceptance_rate()) + ")");
  }
  return out;
}

}  // namespace imbaug::gan
