#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "haam/types.hpp"

namespace haam {

struct MetricsReport {
  double f1_macro = 0.0;
  double f1_micro = 0.0;
  double accuracy = 0.0;
  std::vector<double> per_class_f1;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> confusion;  // rows = truth, cols = prediction
  std::string split;
};

/// Per-class precision/recall/F1 over `indices`. An undefined precision or
/// recall counts as 0, so a class never predicted and never present scores 0
/// and still enters the macro average.
MetricsReport score(std::span<const int> pred, std::span<const int> truth, std::span<const Index> indices,
                    int n_classes, std::string split = "test");

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single run
};

struct RunSummary {
  MetricSummary f1_macro;
  MetricSummary f1_micro;
  MetricSummary accuracy;
  int runs = 0;
};

MetricSummary summarize(std::span<const double> values);
RunSummary summarize_runs(std::span<const MetricsReport> reports);

/// `key=value` lines, one per scalar metric.
std::string to_key_value(const MetricsReport& r);

}  // namespace haam
