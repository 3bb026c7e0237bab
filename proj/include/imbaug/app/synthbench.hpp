#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "imbaug/data/dataset.hpp"

namespace imbaug::app {

// Gaussian-mixture stand-in for an imbalanced flow table. Class 0 is the
// majority; every other class sits `separation` away from one of the
// majority's components in a random direction.
struct SynthSpec {
  std::vector<std::size_t> counts{20000, 150, 12};
  std::vector<std::string> names;  // default C0, C1, ...
  std::size_t dim = 20;
  std::size_t components = 2;  // per class
  double noise = 1.0;          // per-feature standard deviation
  double separation = 6.0;
  std::uint64_t seed = 0;

  void validate() const;
};

SynthSpec synth_spec_from_text(const std::string& text, SynthSpec base = {});
data::Dataset synthesize_benchmark(const SynthSpec& spec);

}  // namespace imbaug::app
