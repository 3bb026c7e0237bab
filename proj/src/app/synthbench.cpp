#include "imbaug/app/synthbench.hpp"

#include <cmath>
#include <numeric>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"
#include "imbaug/pipeline/run_store.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::app {

void SynthSpec::validate() const {
  require(counts.size() >= 2, ErrorKind::config, "synthbench needs at least two classes");
  for (auto c : counts) require(c > 0, ErrorKind::config, "every class needs at least one sample");
  require(names.empty() || names.size() == counts.size(), ErrorKind::config,
          "one name per class count");
  require(dim >= 2, ErrorKind::config, "synthbench needs at least two features");
  require(components >= 1, ErrorKind::config, "at least one component per class");
  require(noise > 0.0 && std::isfinite(noise), ErrorKind::config, "noise must be positive");
  require(separation >= 0.0, ErrorKind::config, "separation must be non-negative");
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto f : data::split_csv_line(s))
    if (!f.empty()) out.emplace_back(f);
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const auto d = data::parse_double(v);
  require(d && *d >= 0.0 && *d == std::floor(*d), ErrorKind::config,
          "synthbench '" + key + "': '" + v + "' is not a non-negative integer");
  return static_cast<std::size_t>(*d);
}

}  // namespace

SynthSpec synth_spec_from_text(const std::string& text, SynthSpec s) {
  for (const auto& [key, v] : pipeline::parse_key_values(text)) {
    if (key == "counts") {
      s.counts.clear();
      for (const auto& c : split_list(v)) s.counts.push_back(to_size(key, c));
    } else if (key == "names") {
      s.names = split_list(v);
    } else if (key == "dim") {
      s.dim = to_size(key, v);
    } else if (key == "components") {
      s.components = to_size(key, v);
    } else if (key == "noise" || key == "separation") {
      const auto d = data::parse_double(v);
      require(d.has_value(), ErrorKind::config, "synthbench '" + key + "' must be a number");
      (key == "noise" ? s.noise : s.separation) = *d;
    } else if (key == "seed") {
      s.seed = to_size(key, v);
    } else {
      fail(ErrorKind::config, "unknown synthbench key '" + key + "'");
    }
  }
  return s;
}

data::Dataset synthesize_benchmark(const SynthSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, "synthbench"));
  const std::size_t d = spec.dim;

  std::vector<std::vector<double>> majority_centers(spec.components, std::vector<double>(d));
  for (auto& c : majority_centers)
    for (auto& v : c) v = rng.uniform(0.0, 10.0);

  data::Dataset ds;
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t k = 0; k < spec.counts.size(); ++k)
    ds.label_names.push_back(spec.names.empty() ? "C" + std::to_string(k) : spec.names[k]);
  ds.features = Matrix(0, d);

  std::vector<double> row(d);
  for (std::size_t k = 0; k < spec.counts.size(); ++k) {
    auto centers = majority_centers;
    if (k > 0) {
      for (std::size_t m = 0; m < centers.size(); ++m) {
        std::vector<double> dir(d);
        double norm = 0.0;
        for (auto& v : dir) {
          v = rng.normal();
          norm += v * v;
        }
        norm = std::sqrt(norm);
        const auto& base = majority_centers[(k + m) % majority_centers.size()];
        for (std::size_t j = 0; j < d; ++j) centers[m][j] = base[j] + spec.separation * dir[j] / norm;
      }
    }
    for (std::size_t i = 0; i < spec.counts[k]; ++i) {
      const auto& c = centers[rng.uniform_index(centers.size())];
      for (std::size_t j = 0; j < d; ++j) row[j] = c[j] + spec.noise * rng.normal();
      ds.append(row, static_cast<int>(k));
    }
  }

  std::vector<std::size_t> order(ds.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  return ds.subset(order);
}

}  // namespace imbaug::app
