#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/matrix.hpp"
#include "imbaug/rng.hpp"

using namespace imbaug;

TEST_CASE("matrix construction and row access") {
  Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6.0);
  CHECK(m.row(1)[0] == 4.0);
  m.append_row(std::vector<double>{7, 8, 9});
  CHECK(m.rows() == 3);
  CHECK_THROWS_AS(m.append_row(std::vector<double>{1}), Error);

  Matrix grow;
  grow.append_row(std::vector<double>{1, 2});
  CHECK(grow.cols() == 2);
}

TEST_CASE("hconcat, select_rows and column_block") {
  const Matrix a{{1, 2}, {3, 4}}, b{{5}, {6}};
  const Matrix ab = hconcat(a, b);
  CHECK(ab == Matrix{{1, 2, 5}, {3, 4, 6}});
  CHECK(column_block(ab, 1, 2) == Matrix{{2, 5}, {4, 6}});
  const std::vector<std::size_t> idx{1, 1, 0};
  CHECK(select_rows(a, idx) == Matrix{{3, 4}, {3, 4}, {1, 2}});
  CHECK_THROWS_AS(hconcat(a, Matrix(3, 1)), Error);
  CHECK_THROWS_AS(column_block(a, 1, 2), Error);
  const std::vector<std::size_t> bad{2};
  CHECK_THROWS_AS(select_rows(a, bad), Error);
}

TEST_CASE("all_finite") {
  Matrix m(2, 2, 1.0);
  CHECK(m.all_finite());
  m(0, 1) = std::nan("");
  CHECK_FALSE(m.all_finite());
}

TEST_CASE("rng is reproducible and uniform draws stay in range") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs = differs || x != c.uniform();
  }
  CHECK(differs);
}

TEST_CASE("uniform_index covers the range without bias") {
  Rng rng(3);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[rng.uniform_index(7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  CHECK_THROWS_AS(rng.uniform_index(0), Error);
}

TEST_CASE("normal draws have unit moments") {
  Rng rng(5);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.shuffle(w.begin(), w.end());
  CHECK(w != v);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}

TEST_CASE("derived seeds separate stages and indices") {
  std::set<std::uint64_t> seen;
  for (const char* stage : {"split", "san", "scgan", "skn"})
    for (std::uint64_t i = 0; i < 10; ++i) seen.insert(derive_seed(1, stage, i));
  CHECK(seen.size() == 40);
  CHECK(derive_seed(1, "san") == derive_seed(1, "san", 0));
  CHECK(derive_seed(1, "san") != derive_seed(2, "san"));
}

TEST_CASE("errors carry their kind") {
  try {
    fail(ErrorKind::yield, "nothing passed");
    FAIL("fail() returned");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::yield);
    CHECK(std::string(e.what()).find("nothing passed") != std::string::npos);
  }
  CHECK_NOTHROW(require(true, ErrorKind::shape, "x"));
  CHECK(to_string(ErrorKind::diverged) == "training-diverged");
}

TEST_CASE("log capture collects warnings") {
  log::Capture cap;
  log::warn("first");
  log::info("ignored");
  log::warn("second");
  REQUIRE(cap.warnings().size() == 2);
  CHECK(cap.warnings()[1] == "second");
}
