#include "imbaug/app/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"
#include "imbaug/pipeline/run_store.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::app {
namespace {

constexpr std::string_view kOverridePrefix = "level.override.";

std::string key_error(const std::string& key, const std::string& value, const char* want) {
  return "config key '" + key + "': '" + value + "' is not " + want;
}

double as_double(const std::string& key, const std::string& v) {
  const auto d = data::parse_double(v);
  require(d.has_value(), ErrorKind::config, key_error(key, v, "a number"));
  return *d;
}

std::uint64_t as_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  require(ec == std::errc() && ptr == end && !v.empty(), ErrorKind::config,
          key_error(key, v, "a non-negative integer"));
  return out;
}

std::size_t as_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(as_u64(key, v));
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::config, key_error(key, v, "a boolean"));
}

std::string b(bool v) { return v ? "true" : "false"; }
std::string d(double v) { return data::format_double(v); }
std::string u(std::uint64_t v) { return std::to_string(v); }

}  // namespace

void RunConfig::validate() const {
  require(train_ratio > 0.0 && train_ratio < 1.0, ErrorKind::config, "train_ratio must lie in (0, 1)");
  require(level_counts == "full" || level_counts == "train", ErrorKind::config,
          "level.counts must be 'full' or 'train'");
  require(beta > 0.0, ErrorKind::config, "beta must be positive");
  require(skn_k >= 1, ErrorKind::config, "skn.k must be at least 1");
  thresholds.validate();
  san.validate();
  scgan.validate();
  filter.validate();
  classifier.validate();
}

std::filesystem::path RunConfig::run_dir() const {
  const std::string name =
      run_name.empty() ? std::string(pipeline::to_string(method)) + "-seed" + std::to_string(seed) : run_name;
  return std::filesystem::path(out) / name;
}

pipeline::AugmentConfig RunConfig::augment_config() const {
  pipeline::AugmentConfig a;
  a.method = method;
  a.san = san;
  a.scgan = scgan;
  a.filter = filter;
  a.skn_k = skn_k;
  a.seed = derive_seed(seed, "augment");
  return a;
}

pipeline::ClassifierConfig RunConfig::classifier_config() const {
  auto c = classifier;
  c.seed = derive_seed(seed, "classifier");
  return c;
}

RunConfig config_from_kv(const std::map<std::string, std::string>& kv, RunConfig c) {
  for (const auto& [key, v] : kv) {
    if (key == "data") c.data = v;
    else if (key == "label_column") c.label_column = v;
    else if (key == "mapping") c.mapping = v;
    else if (key == "strict_mapping") c.strict_mapping = as_bool(key, v);
    else if (key == "drop_non_finite") c.drop_non_finite = as_bool(key, v);
    else if (key == "train_ratio") c.train_ratio = as_double(key, v);
    else if (key == "stratified") c.stratified = as_bool(key, v);
    else if (key == "level.mode") {
      if (v == "fixed") c.thresholds.mode = level::ThresholdMode::fixed;
      else if (v == "auto-gap") c.thresholds.mode = level::ThresholdMode::auto_gap;
      else fail(ErrorKind::config, key_error(key, v, "'fixed' or 'auto-gap'"));
    }
    else if (key == "level.scarce_min_ir") c.thresholds.scarce_min_ir = as_double(key, v);
    else if (key == "level.rare_min_ir") c.thresholds.rare_min_ir = as_double(key, v);
    else if (key == "level.counts") c.level_counts = v;
    else if (key.starts_with(kOverridePrefix))
      c.thresholds.overrides[key.substr(kOverridePrefix.size())] = level::parse_level(v);
    else if (key == "method") c.method = pipeline::parse_method(v);
    else if (key == "san.epochs") c.san.epochs = as_size(key, v);
    else if (key == "san.lr") c.san.lr = as_double(key, v);
    else if (key == "san.batch_size") c.san.batch_size = as_size(key, v);
    else if (key == "san.margin") c.san.margin = as_double(key, v);
    else if (key == "san.alpha") c.san.alpha = as_double(key, v);
    else if (key == "san.pairs_per_epoch") c.san.pairs_per_epoch = as_size(key, v);
    else if (key == "san.dissimilar_fraction") c.san.dissimilar_fraction = as_double(key, v);
    else if (key == "san.code_dim") c.san.code_dim = as_size(key, v);
    else if (key == "scgan.epochs") c.scgan.epochs = as_size(key, v);
    else if (key == "scgan.lr") c.scgan.lr = as_double(key, v);
    else if (key == "scgan.beta1") c.scgan.beta1 = as_double(key, v);
    else if (key == "scgan.batch_size") c.scgan.batch_size = as_size(key, v);
    else if (key == "scgan.noise_dim") c.scgan.noise_dim = as_size(key, v);
    else if (key == "filter.eta") c.filter.eta = as_double(key, v);
    else if (key == "filter.max_attempt_factor") c.filter.max_attempt_factor = as_size(key, v);
    else if (key == "skn.k") c.skn_k = as_size(key, v);
    else if (key == "clf.epochs") c.classifier.epochs = as_size(key, v);
    else if (key == "clf.batch_size") c.classifier.batch_size = as_size(key, v);
    else if (key == "clf.lr") c.classifier.lr = as_double(key, v);
    else if (key == "clf.patience") c.classifier.patience = as_size(key, v);
    else if (key == "beta") c.beta = as_double(key, v);
    else if (key == "seed") c.seed = as_u64(key, v);
    else if (key == "out") c.out = v;
    else if (key == "run_name") c.run_name = v;
    else fail(ErrorKind::config, "unknown config key '" + key + "'");
  }
  return c;
}

std::map<std::string, std::string> config_to_kv(const RunConfig& c) {
  std::map<std::string, std::string> kv{
      {"data", c.data},
      {"label_column", c.label_column},
      {"mapping", c.mapping},
      {"strict_mapping", b(c.strict_mapping)},
      {"drop_non_finite", b(c.drop_non_finite)},
      {"train_ratio", d(c.train_ratio)},
      {"stratified", b(c.stratified)},
      {"level.mode", c.thresholds.mode == level::ThresholdMode::fixed ? "fixed" : "auto-gap"},
      {"level.scarce_min_ir", d(c.thresholds.scarce_min_ir)},
      {"level.rare_min_ir", d(c.thresholds.rare_min_ir)},
      {"level.counts", c.level_counts},
      {"method", std::string(pipeline::to_string(c.method))},
      {"san.epochs", u(c.san.epochs)},
      {"san.lr", d(c.san.lr)},
      {"san.batch_size", u(c.san.batch_size)},
      {"san.margin", d(c.san.margin)},
      {"san.alpha", d(c.san.alpha)},
      {"san.pairs_per_epoch", u(c.san.pairs_per_epoch)},
      {"san.dissimilar_fraction", d(c.san.dissimilar_fraction)},
      {"san.code_dim", u(c.san.code_dim)},
      {"scgan.epochs", u(c.scgan.epochs)},
      {"scgan.lr", d(c.scgan.lr)},
      {"scgan.beta1", d(c.scgan.beta1)},
      {"scgan.batch_size", u(c.scgan.batch_size)},
      {"scgan.noise_dim", u(c.scgan.noise_dim)},
      {"filter.eta", d(c.filter.eta)},
      {"filter.max_attempt_factor", u(c.filter.max_attempt_factor)},
      {"skn.k", u(c.skn_k)},
      {"clf.epochs", u(c.classifier.epochs)},
      {"clf.batch_size", u(c.classifier.batch_size)},
      {"clf.lr", d(c.classifier.lr)},
      {"clf.patience", u(c.classifier.patience)},
      {"beta", d(c.beta)},
      {"seed", u(c.seed)},
      {"out", c.out},
      {"run_name", c.run_name},
  };
  for (const auto& [name, lvl] : c.thresholds.overrides)
    kv[std::string(kOverridePrefix) + name] = std::string(level::to_string(lvl));
  return kv;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::config, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_kv(pipeline::parse_key_values(ss.str()), std::move(base));
}

}  // namespace imbaug::app
