// Small statistics helpers for experiment reports.
#pragma once

#include <span>
#include <utility>
#include <vector>

namespace pace {

struct MeanCi {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Normal-approximation 95% confidence interval.
MeanCi mean_ci95(std::span<const double> samples);

double student_t_cdf(double t, int dof);

struct PairedTestResult {
  double mean_diff = 0.0;  // mean(b - a)
  double t = 0.0;
  int dof = 0;
  double p_one_sided = 1.0;  // P(reject H0) under H1: mean(a) < mean(b)
};

// One-sided paired t-test of H1: mean(a) < mean(b).
PairedTestResult paired_one_sided_less(std::span<const double> a, std::span<const double> b);

// Mutual information (nats) of a joint sample of (x, y) labels.
double mutual_information(std::span<const std::pair<int, int>> samples);

}  // namespace pace
