#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/simd/kernels.hpp"
#include "imbaug/skn/skn.hpp"
#include "oracles.hpp"

using namespace imbaug;
using namespace imbaug::skn;

TEST_CASE("interpolation is bit-identical to the brute-force reference") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.uniform_index(30), d = 1 + rng.uniform_index(12);
    const std::size_t k = 1 + rng.uniform_index(8), count = rng.uniform_index(200);
    const Matrix pts = oracle::random_matrix(n, d, rng, 0.0, 1.0);
    const std::uint64_t seed = rng.next_u64();
    log::Capture quiet;
    const auto got = skn_synthesize(pts, count, {k, seed, std::nullopt});
    CHECK(got.samples == oracle::brute_force_interpolation(pts, count, k, seed));
  }
}

TEST_CASE("the reference agrees under both kernel tables") {
  const auto before = simd::active_isa();
  Rng rng(5);
  const Matrix pts = oracle::random_matrix(40, 9, rng, 0.0, 1.0);
  for (auto isa : {simd::Isa::scalar, simd::Isa::avx2}) {
    if (!simd::isa_available(isa)) continue;
    simd::force_isa(isa);
    CHECK(skn_synthesize(pts, 300, {5, 77, std::nullopt}).samples ==
          oracle::brute_force_interpolation(pts, 300, 5, 77));
  }
  simd::force_isa(before);
}

TEST_CASE("samples lie on the segment to a true neighbor and inside the bounding box") {
  Rng rng(8);
  const Matrix pts = oracle::random_matrix(60, 6, rng, 0.0, 1.0);
  const auto res = skn_synthesize(pts, 10000, {5, 3, std::nullopt});
  REQUIRE(res.samples.rows() == 10000);
  REQUIRE(res.draws.size() == 10000);
  const auto index = build_knn_index(pts, 5);
  for (std::size_t t = 0; t < res.samples.rows(); ++t) {
    const auto& dr = res.draws[t];
    CHECK(dr.source == t % pts.rows());
    const auto& nb = index.neighbors[dr.source];
    CHECK(std::find(nb.begin(), nb.end(), dr.neighbor) != nb.end());
    CHECK(dr.lambda >= 0.0);
    CHECK(dr.lambda < 1.0);
    for (std::size_t f = 0; f < pts.cols(); ++f) {
      const double a = pts(dr.source, f), b = pts(dr.neighbor, f), x = res.samples(t, f);
      CHECK(x >= std::min(a, b));
      CHECK(x <= std::max(a, b));
    }
  }
}

TEST_CASE("fixed lambda endpoints reproduce the source and the neighbor") {
  Rng rng(2);
  const Matrix pts = oracle::random_matrix(10, 3, rng, 0.0, 1.0);
  const auto at0 = skn_synthesize(pts, 10, {3, 1, 0.0});
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t f = 0; f < 3; ++f) CHECK(at0.samples(t, f) == pts(t, f));
  const auto at1 = skn_synthesize(pts, 10, {3, 1, 1.0});
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t f = 0; f < 3; ++f) CHECK(at1.samples(t, f) == pts(at1.draws[t].neighbor, f));
  CHECK_THROWS_AS(skn_synthesize(pts, 1, {3, 1, 1.5}), Error);
}

TEST_CASE("knn orders by distance and breaks ties by index") {
  const Matrix pts{{0.0}, {1.0}, {-1.0}, {2.0}, {0.5}};
  CHECK(knn(pts, 0, 3) == std::vector<std::size_t>{4, 1, 2});
  const Matrix line{{0.0}, {1.0}, {2.0}};
  CHECK(knn(line, 1, 2) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("k larger than the class is clamped with a warning") {
  const Matrix pts{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  log::Capture cap;
  const auto idx = build_knn_index(pts, 10);
  CHECK(idx.k == 2);
  CHECK(cap.warnings().size() == 1);
}

TEST_CASE("single-row classes get jittered copies") {
  const Matrix one{{0.5, 0.0, 1.0}};
  log::Capture cap;
  const auto res = skn_synthesize(one, 20, {5, 9, std::nullopt});
  CHECK(res.samples.rows() == 20);
  CHECK(res.draws.empty());
  CHECK(cap.warnings().size() == 1);
  for (std::size_t t = 0; t < 20; ++t) {
    CHECK(std::abs(res.samples(t, 0) - 0.5) <= 1e-3);
    CHECK(res.samples(t, 1) >= 0.0);
    CHECK(res.samples(t, 2) <= 1.0);
  }
}

TEST_CASE("degenerate requests") {
  const Matrix pts{{0.0}, {1.0}};
  CHECK(skn_synthesize(pts, 0, {}).samples.rows() == 0);
  CHECK_THROWS_AS(skn_synthesize(Matrix(0, 2), 5, {}), Error);
  CHECK_THROWS_AS(skn_synthesize(pts, 5, {0, 1, std::nullopt}), Error);
  try {
    knn(Matrix{{1.0}}, 0, 1);
    FAIL("knn on one point");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::neighbor);
  }
}

TEST_CASE("same seed, same output; different seed, different output") {
  Rng rng(4);
  const Matrix pts = oracle::random_matrix(15, 4, rng, 0.0, 1.0);
  const auto a = skn_synthesize(pts, 50, {5, 10, std::nullopt});
  CHECK(a.samples == skn_synthesize(pts, 50, {5, 10, std::nullopt}).samples);
  CHECK_FALSE(a.samples == skn_synthesize(pts, 50, {5, 11, std::nullopt}).samples);
}
