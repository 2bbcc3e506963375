#include "haam/evalkit.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "haam/error.hpp"

namespace haam {

MetricsReport score(std::span<const int> pred, std::span<const int> truth, std::span<const Index> indices,
                    int n_classes, std::string split) {
  if (indices.empty()) throw InvalidInput("score: empty index set");
  if (pred.size() != truth.size()) throw InvalidInput("score: prediction and truth lengths differ");

  MetricsReport r;
  r.split = std::move(split);
  r.confusion.setZero(n_classes, n_classes);
  for (Index i : indices) {
    const int t = truth[static_cast<std::size_t>(i)];
    const int p = pred[static_cast<std::size_t>(i)];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) throw InvalidInput("score: class index out of range");
    ++r.confusion(t, p);
  }

  const auto total = static_cast<double>(indices.size());
  const auto correct = static_cast<double>(r.confusion.trace());
  r.accuracy = correct / total;

  // Single-label: every miss is one FP and one FN, so micro P = R = accuracy.
  std::int64_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  r.per_class_f1.assign(static_cast<std::size_t>(n_classes), 0.0);
  for (int c = 0; c < n_classes; ++c) {
    const std::int64_t tp = r.confusion(c, c);
    const std::int64_t fp = r.confusion.col(c).sum() - tp;
    const std::int64_t fn = r.confusion.row(c).sum() - tp;
    tp_sum += tp;
    fp_sum += fp;
    fn_sum += fn;
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.per_class_f1[static_cast<std::size_t>(c)] =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  double macro = 0.0;
  for (double f : r.per_class_f1) macro += f;
  r.f1_macro = macro / n_classes;
  const auto denom = static_cast<double>(2 * tp_sum + fp_sum + fn_sum);
  r.f1_micro = denom > 0.0 ? 2.0 * static_cast<double>(tp_sum) / denom : 0.0;
  return r;
}

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("summarize: no values");
  MetricSummary s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

RunSummary summarize_runs(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw InvalidInput("summarize_runs: no runs");
  std::vector<double> macro, micro, acc;
  for (const auto& r : reports) {
    macro.push_back(r.f1_macro);
    micro.push_back(r.f1_micro);
    acc.push_back(r.accuracy);
  }
  return {summarize(macro), summarize(micro), summarize(acc), static_cast<int>(reports.size())};
}

std::string to_key_value(const MetricsReport& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "split=" << r.split << '\n'
      << "accuracy=" << r.accuracy << '\n'
      << "f1_micro=" << r.f1_micro << '\n'
      << "f1_macro=" << r.f1_macro << '\n';
  for (std::size_t c = 0; c < r.per_class_f1.size(); ++c) out << "f1_class_" << c << '=' << r.per_class_f1[c] << '\n';
  return out.str();
}

}  // namespace haam
