#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbaug/data/preprocess.hpp"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/rng.hpp"

namespace imbaug::data {

void SplitSpec::validate() const {
  require(train_ratio > 0.0 && train_ratio < 1.0, ErrorKind::config,
          "train ratio must lie strictly inside (0, 1)");
}

std::size_t train_count(std::size_t n, double ratio) {
  const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
  return std::min(k, n);
}

SplitResult stratified_split(const Dataset& ds, const SplitSpec& spec) {
  spec.validate();
  ds.validate();
  Rng rng(spec.seed);
  SplitResult out;

  auto take = [&](std::vector<std::size_t> rows, const std::string& what) {
    if (rows.size() == 1) {
      log::warn(what + " has a single sample; it goes to the training split only");
      out.train_rows.push_back(rows[0]);
      return;
    }
    rng.shuffle(rows.begin(), rows.end());
    const auto k = train_count(rows.size(), spec.train_ratio);
    out.train_rows.insert(out.train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k));
    out.test_rows.insert(out.test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end());
  };

  if (spec.stratified) {
    for (std::size_t c = 0; c < ds.class_count(); ++c) {
      auto rows = ds.rows_of(static_cast<int>(c));
      if (!rows.empty()) take(std::move(rows), "class '" + ds.label_names[c] + "'");
    }
  } else {
    std::vector<std::size_t> rows(ds.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    take(std::move(rows), "dataset");
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = ds.subset(out.train_rows);
  out.test = ds.subset(out.test_rows);
  return out;
}

}  // namespace imbaug::data
