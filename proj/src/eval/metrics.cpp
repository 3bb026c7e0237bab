#include "imbaug/eval/metrics.hpp"

#include "imbaug/error.hpp"

namespace imbaug::eval {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts)
    for (auto v : row) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::support(std::size_t c) const {
  std::uint64_t t = 0;
  for (auto v : counts.at(c)) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::predicted(std::size_t c) const {
  std::uint64_t t = 0;
  for (const auto& row : counts) t += row.at(c);
  return t;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                          const std::vector<std::string>& classes) {
  require(truth.size() == predicted.size(), ErrorKind::shape,
          "truth has " + std::to_string(truth.size()) + " labels, predictions " +
              std::to_string(predicted.size()));
  require(!classes.empty(), ErrorKind::label, "empty class dictionary");
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(), std::vector<std::uint64_t>(classes.size(), 0));
  const auto n = static_cast<int>(classes.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] >= 0 && truth[i] < n, ErrorKind::label,
            "true label id " + std::to_string(truth[i]) + " outside the dictionary");
    require(predicted[i] >= 0 && predicted[i] < n, ErrorKind::label,
            "predicted label id " + std::to_string(predicted[i]) + " outside the dictionary");
    ++cm.counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  return cm;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  return den > 0.0 ? (1.0 + b2) * precision * recall / den : 0.0;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm, double beta) {
  require(beta > 0.0, ErrorKind::config, "beta must be positive");
  std::vector<ClassMetrics> out(cm.size());
  for (std::size_t c = 0; c < cm.size(); ++c) {
    const auto tp = static_cast<double>(cm.counts[c][c]);
    const auto support = cm.support(c);
    const auto predicted = cm.predicted(c);
    auto& m = out[c];
    m.support = support;
    m.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    m.recall = support ? tp / static_cast<double>(support) : 0.0;
    m.f_beta = f_beta(m.precision, m.recall, beta);
  }
  return out;
}

Aggregates aggregate(std::span<const ClassMetrics> per_class) {
  Aggregates a;
  if (per_class.empty()) return a;
  double total = 0.0;
  for (const auto& m : per_class) {
    const auto w = static_cast<double>(m.support);
    total += w;
    a.weighted.precision += w * m.precision;
    a.weighted.recall += w * m.recall;
    a.weighted.f_beta += w * m.f_beta;
    a.macro.precision += m.precision;
    a.macro.recall += m.recall;
    a.macro.f_beta += m.f_beta;
  }
  if (total > 0.0) {
    a.weighted.precision /= total;
    a.weighted.recall /= total;
    a.weighted.f_beta /= total;
  }
  const auto n = static_cast<double>(per_class.size());
  a.macro.precision /= n;
  a.macro.recall /= n;
  a.macro.f_beta /= n;
  return a;
}

MetricsReport evaluate(std::span<const int> truth, std::span<const int> predicted,
                       const std::vector<std::string>& classes, const std::string& method,
                       double beta) {
  MetricsReport r;
  r.method = method;
  r.beta = beta;
  r.confusion = confusion(truth, predicted, classes);
  r.per_class = per_class_metrics(r.confusion, beta);
  r.totals = aggregate(r.per_class);
  return r;
}

namespace {

Aggregate minus(const Aggregate& a, const Aggregate& b) {
  return {a.precision - b.precision, a.recall - b.recall, a.f_beta - b.f_beta};
}

}  // namespace

DeltaTable compare(const MetricsReport& baseline, std::span<const MetricsReport> others) {
  DeltaTable t;
  t.baseline = baseline.method;
  t.classes = baseline.classes();
  for (const auto& r : others) {
    require(r.classes() == baseline.classes(), ErrorKind::report,
            "report '" + r.method + "' covers different classes than '" + baseline.method + "'");
    require(r.beta == baseline.beta, ErrorKind::report,
            "report '" + r.method + "' uses a different beta than '" + baseline.method + "'");
    DeltaRow row;
    row.method = r.method;
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
      const auto& a = r.per_class[c];
      const auto& b = baseline.per_class[c];
      row.per_class.push_back(
          {a.precision - b.precision, a.recall - b.recall, a.f_beta - b.f_beta, a.support});
    }
    row.totals.weighted = minus(r.totals.weighted, baseline.totals.weighted);
    row.totals.macro = minus(r.totals.macro, baseline.totals.macro);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace imbaug::eval
