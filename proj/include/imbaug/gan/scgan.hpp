#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "imbaug/nn/adam.hpp"
#include "imbaug/nn/checkpoint.hpp"
#include "imbaug/nn/network.hpp"
#include "imbaug/rng.hpp"
#include "imbaug/san/san.hpp"

namespace imbaug::gan {

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  std::vector<double> d_real;  // D(x | s) per real row, before the D update
  std::vector<double> d_fake;  // D(G(z | s) | s), before the D update
  double loss_d = 0.0;
  double loss_g = 0.0;
};

struct ScganConfig {
  std::size_t noise_dim = 16;
  std::size_t epochs = 300;
  std::size_t batch_size = 16;
  double lr = 2e-4;
  double beta1 = 0.9;
  std::vector<std::size_t> generator_hidden{32, 64, 128};
  std::vector<std::size_t> discriminator_hidden{64, 8};
  std::uint64_t seed = 0;
  std::function<void(const StepRecord&)> on_step;  // optional instrumentation

  void validate() const;
};

struct FilterPolicy {
  double eta = 0.45;  // keep samples whose discriminator score is >= eta
  std::size_t max_attempt_factor = 50;  // generation budget = factor * requested count

  void validate() const;
};

// Conditional GAN for one class. Generator input is [SAN code | noise] and it
// ends in a sigmoid so samples live in the normalized feature space.
// Discriminator input is [sample | SAN code].
struct ScganModel {
  nn::Network generator;
  nn::Network discriminator;
  std::size_t data_dim = 0;
  std::size_t code_dim = 0;
  std::size_t noise_dim = 0;
  std::string class_name;

  void set_mode(nn::Mode mode);
  nn::Checkpoint to_checkpoint() const;
  static ScganModel from_checkpoint(const nn::Checkpoint& ckpt);
};

ScganModel make_scgan(std::size_t data_dim, std::size_t code_dim, const ScganConfig& config);

// Explicit alternation: a discriminator step updates only D, a generator step
// only G. The generator step reuses the fake batch of the preceding D step.
class ScganTrainer {
 public:
  ScganTrainer(ScganModel& model, const ScganConfig& config);

  StepRecord discriminator_step(const Matrix& real, const Matrix& conditions, Rng& rng);
  double generator_step();

 private:
  ScganModel& model_;
  nn::AdamState adam_g_;
  nn::AdamState adam_d_;
  nn::Tape g_tape_;
  Matrix fake_;
  Matrix conditions_;
  bool pending_ = false;
};

struct LossHistory {
  std::vector<double> discriminator;  // mean per epoch
  std::vector<double> generator;
};

struct ScganTrainResult {
  ScganModel model;  // eval mode
  LossHistory history;
};

// Trains on the rows of one class; conditions are their SAN codes.
ScganTrainResult train_scgan(const Matrix& class_data, const san::SanModel& san,
                             const ScganConfig& config, const std::string& class_name = "");

struct Generated {
  Matrix samples;
  Matrix conditions;
};

// Each condition is the SAN code of a class row drawn uniformly from
// `condition_pool`; noise is standard normal.
Generated generate(const ScganModel& model, const Matrix& condition_pool, std::size_t count, Rng& rng);

std::vector<double> discriminator_scores(const ScganModel& model, const Matrix& samples,
                                         const Matrix& conditions);

struct FilterResult {
  Matrix kept;
  Matrix kept_conditions;
  std::vector<double> scores;       // every candidate
  std::vector<std::size_t> kept_rows;
};

FilterResult filter_generated(const ScganModel& model, const Matrix& samples, const Matrix& conditions,
                              const FilterPolicy& policy);

struct SynthesisResult {
  Matrix samples;
  Matrix conditions;
  std::vector<double> scores;  // of the kept samples
  std::size_t generated = 0;
  std::size_t accepted = 0;
  double acceptance_rate() const {
    return generated ? static_cast<double>(accepted) / static_cast<double>(generated) : 0.0;
  }
};

// Generates and filters in batches until `count` samples pass; throws a yield
// error, reporting the acceptance rate, once the budget is spent.
SynthesisResult synthesize_to_target(const ScganModel& model, const Matrix& condition_pool,
                                     std::size_t count, const FilterPolicy& policy, std::uint64_t seed);

}  // namespace imbaug::gan
