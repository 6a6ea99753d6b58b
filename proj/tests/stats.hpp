#pragma once

// Small statistical helpers shared by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace mc::stats {

// Asymptotic Kolmogorov tail P(K > x).
inline double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
    s += term;
    if (std::fabs(term) < 1e-16) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

// One-sample KS p-value against a continuous CDF.
inline double ks_pvalue(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

// Two-sample KS p-value.
inline double ks2_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
}

// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < sum * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Continued fraction (modified Lentz).
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

// Pearson chi-square goodness-of-fit p-value for counts against probabilities.
inline double chi2_pvalue(const std::vector<double>& counts, const std::vector<double>& probs) {
  double n = 0.0;
  for (double c : counts) n += c;
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    const double e = n * probs[i];
    stat += (counts[i] - e) * (counts[i] - e) / e;
    ++cells;
  }
  return gamma_q(0.5 * (cells - 1), 0.5 * stat);
}

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// Stationary distribution check: max_j |sum_i p_i P(i, j) - p_j|.
template <class MatT>
double stationarity_error(const std::vector<double>& p, const MatT& P) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * P(i, j);
    worst = std::max(worst, std::fabs(s - p[j]));
  }
  return worst;
}

// max_{i,j} |p_i P(i, j) - p_j P(j, i)|
template <class MatT>
double detailed_balance_error(const std::vector<double>& p, const MatT& P) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      worst = std::max(worst, std::fabs(p[i] * P(i, j) - p[j] * P(j, i)));
  return worst;
}

}  // namespace mc::stats
