#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "imbaug/error.hpp"
#include "imbaug/eval/metrics.hpp"
#include "imbaug/rng.hpp"
#include "oracles.hpp"

using namespace imbaug;
using namespace imbaug::eval;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kAbc{"a", "b", "c"};

// truth a a a a b b b c c / pred a a a b b b a c a
MetricsReport worked_example() {
  const std::vector<int> truth{0, 0, 0, 0, 1, 1, 1, 2, 2};
  const std::vector<int> pred{0, 0, 0, 1, 1, 1, 0, 2, 0};
  return evaluate(truth, pred, kAbc, "m");
}

}  // namespace

TEST_CASE("confusion counts and marginals") {
  const auto r = worked_example();
  const auto& cm = r.confusion;
  CHECK(cm.counts == std::vector<std::vector<std::uint64_t>>{{3, 1, 0}, {1, 2, 0}, {1, 0, 1}});
  CHECK(cm.total() == 9);
  CHECK(cm.support(0) == 4);
  CHECK(cm.predicted(0) == 5);
  CHECK_THROWS_AS(confusion(std::vector<int>{0, 1}, std::vector<int>{0}, kAbc), Error);
  CHECK_THROWS_AS(confusion(std::vector<int>{0}, std::vector<int>{3}, kAbc), Error);
}

TEST_CASE("per-class metrics on a hand-worked confusion") {
  const auto r = worked_example();
  const auto& m = r.per_class;
  CHECK(m[0].precision == doctest::Approx(3.0 / 5.0));
  CHECK(m[0].recall == doctest::Approx(3.0 / 4.0));
  CHECK(m[0].f_beta == doctest::Approx(2.0 * 0.6 * 0.75 / 1.35));
  CHECK(m[1].precision == doctest::Approx(2.0 / 3.0));
  CHECK(m[1].recall == doctest::Approx(2.0 / 3.0));
  CHECK(m[2].precision == doctest::Approx(1.0));
  CHECK(m[2].recall == doctest::Approx(0.5));
  CHECK(m[2].f_beta == doctest::Approx(2.0 / 3.0));
  CHECK(m[2].support == 2);

  const double macro_f = (m[0].f_beta + m[1].f_beta + m[2].f_beta) / 3.0;
  const double weighted_f = (4 * m[0].f_beta + 3 * m[1].f_beta + 2 * m[2].f_beta) / 9.0;
  CHECK(r.totals.macro.f_beta == doctest::Approx(macro_f));
  CHECK(r.totals.weighted.f_beta == doctest::Approx(weighted_f));
  // weighted recall equals accuracy
  CHECK(r.totals.weighted.recall == doctest::Approx(6.0 / 9.0));
}

TEST_CASE("f_beta formula and degenerate ratios") {
  CHECK(f_beta(0.5, 0.5, 1.0) == doctest::Approx(0.5));
  CHECK(f_beta(1.0, 0.5, 2.0) == doctest::Approx(5.0 * 0.5 / (4.0 + 0.5)));
  CHECK(f_beta(1.0, 0.5, 0.5) == doctest::Approx(1.25 * 0.5 / (0.25 + 0.5)));
  CHECK(f_beta(0.0, 0.0, 1.0) == 0.0);

  // class b never predicted and never present: every ratio is 0/0 -> 0
  const auto r = evaluate(std::vector<int>{0, 0, 2}, std::vector<int>{0, 2, 2}, kAbc, "m");
  CHECK(r.per_class[1].precision == 0.0);
  CHECK(r.per_class[1].recall == 0.0);
  CHECK(r.per_class[1].f_beta == 0.0);
  CHECK(r.per_class[1].support == 0);
}

TEST_CASE("aggregate of published-style columns") {
  std::vector<ClassMetrics> m(2);
  m[0] = {0.9, 0.8, 0.85, 10};
  m[1] = {0.5, 0.4, 0.45, 30};
  const auto a = aggregate(m);
  CHECK(a.macro.f_beta == doctest::Approx(0.65));
  CHECK(a.weighted.f_beta == doctest::Approx((8.5 + 13.5) / 40.0));
  CHECK(a.macro.precision == doctest::Approx(0.7));
}

TEST_CASE("compare gives per-class differences and rejects mismatched classes") {
  const auto base = evaluate(std::vector<int>{0, 1, 2}, std::vector<int>{0, 0, 0}, kAbc, "baseline");
  const auto better = evaluate(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 0}, kAbc, "s2cgan");
  const std::vector<MetricsReport> others{better, base};
  const auto t = compare(base, others);
  CHECK(t.baseline == "baseline");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].method == "s2cgan");
  CHECK(t.rows[0].per_class[1].f_beta == doctest::Approx(1.0));
  CHECK(t.rows[0].totals.macro.f_beta ==
        doctest::Approx(better.totals.macro.f_beta - base.totals.macro.f_beta));
  for (const auto& c : t.rows[1].per_class) CHECK(c.f_beta == 0.0);
  CHECK(delta_text(t).find("s2cgan") != std::string::npos);

  const auto other = evaluate(std::vector<int>{0, 1}, std::vector<int>{0, 1}, {"a", "x"}, "ros");
  const std::vector<MetricsReport> bad{other};
  try {
    compare(base, bad);
    FAIL("mismatched classes accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::report);
  }
}

TEST_CASE("pca matches an eigen decomposition of the covariance") {
  Rng rng(12);
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = 50 + rng.uniform_index(50), d = 3 + rng.uniform_index(6);
    Matrix x = oracle::random_matrix(n, d, rng, -1.0, 1.0);
    // stretch two directions so the top eigenvalues are well separated
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) *= 6.0;
      x(i, 1) *= 3.0;
    }
    const auto p = pca2d(x);

    Eigen::MatrixXd e(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(i, j);
    const Eigen::RowVectorXd mean = e.colwise().mean();
    const Eigen::MatrixXd centered = e.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    for (int k = 0; k < 2; ++k) {
      const Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - k;
      Eigen::VectorXd v = solver.eigenvectors().col(col);
      Eigen::Index first = 0;
      while (std::abs(v(first)) < 1e-12) ++first;
      if (v(first) < 0) v = -v;
      CHECK(p.variance[k] == doctest::Approx(solver.eigenvalues()(col)).epsilon(1e-6));
      for (std::size_t j = 0; j < d; ++j)
        CHECK(std::abs(p.components[k][j] - v(static_cast<Eigen::Index>(j))) < 1e-5);
    }
    for (std::size_t j = 0; j < d; ++j) CHECK(p.mean[j] == doctest::Approx(mean(static_cast<Eigen::Index>(j))));
    CHECK(p.projection.rows() == n);
    CHECK(project(p, x) == p.projection);
  }
}

TEST_CASE("degenerate pca inputs") {
  CHECK_THROWS_AS(pca2d(Matrix{{1.0, 2.0}}), Error);
  CHECK_THROWS_AS(pca2d(Matrix{{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}), Error);
  // one non-constant direction only
  CHECK_THROWS_AS(pca2d(Matrix{{0.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}), Error);
}

TEST_CASE("report files round trip") {
  const auto r = worked_example();
  const auto dir = fs::temp_directory_path() / "imbaug_eval_report_test";
  fs::remove_all(dir);
  write_report(dir, r);
  CHECK(fs::exists(dir / "per_class.csv"));
  CHECK(fs::exists(dir / "aggregate.csv"));
  CHECK(fs::exists(dir / "confusion.csv"));
  const auto back = read_report(dir, "m");
  CHECK(back.classes() == kAbc);
  CHECK(back.confusion.counts == r.confusion.counts);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(back.per_class[c].precision == r.per_class[c].precision);
    CHECK(back.per_class[c].f_beta == r.per_class[c].f_beta);
    CHECK(back.per_class[c].support == r.per_class[c].support);
  }
  CHECK(back.totals.macro.f_beta == r.totals.macro.f_beta);
  CHECK(summary_text(r).find("macro avg") != std::string::npos);
  fs::remove_all(dir);
  CHECK_THROWS_AS(read_report(dir, "m"), Error);
}
