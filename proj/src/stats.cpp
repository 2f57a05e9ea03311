#include "pace/stats.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace pace {

namespace {

// Continued-fraction evaluation of the regularized incomplete beta I_x(a, b).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = 3e-14;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double incbeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

MeanCi mean_ci95(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("mean_ci95 needs samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var = samples.size() > 1 ? var / (n - 1.0) : 0.0;
  const double half = 1.959963984540054 * std::sqrt(var / n);
  return {mean, mean - half, mean + half};
}

double student_t_cdf(double t, int dof) {
  if (dof <= 0) throw std::invalid_argument("t distribution needs dof >= 1");
  const double x = static_cast<double>(dof) / (static_cast<double>(dof) + t * t);
  const double tail = 0.5 * incbeta(0.5 * dof, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

PairedTestResult paired_one_sided_less(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("paired test needs two equal samples of size >= 2");
  }
  const std::size_t n = a.size();
  std::vector<double> diffs(n);
  for (std::size_t i = 0; i < n; ++i) diffs[i] = b[i] - a[i];

  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double d : diffs) var += (d - mean) * (d - mean);
  var /= static_cast<double>(n - 1);

  PairedTestResult result;
  result.mean_diff = mean;
  result.dof = static_cast<int>(n) - 1;
  if (var == 0.0) {
    result.t = mean > 0.0 ? 1e9 : (mean < 0.0 ? -1e9 : 0.0);
  } else {
    result.t = mean / std::sqrt(var / static_cast<double>(n));
  }
  // Large positive t favours H1 (b systematically exceeds a).
  result.p_one_sided = 1.0 - student_t_cdf(result.t, result.dof);
  return result;
}

double mutual_information(std::span<const std::pair<int, int>> samples) {
  if (samples.empty()) return 0.0;
  std::map<int, double> px, py;
  std::map<std::pair<int, int>, double> pxy;
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (const auto& [x, y] : samples) {
    px[x] += inv;
    py[y] += inv;
    pxy[{x, y}] += inv;
  }
  double mi = 0.0;
  for (const auto& [xy, p] : pxy) {
    mi += p * std::log(p / (px[xy.first] * py[xy.second]));
  }
  return mi;
}

}  // namespace pace
