#include "gazeqa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gazeqa::stats {

namespace {

// Continued fraction for the regularized incomplete beta, evaluated with the
// modified Lentz scheme. Converges quickly for x < (a + 1) / (a + b + 2);
// incomplete_beta() applies the symmetry transform for the other half.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-16) break;
  }
  return h;
}

double t_pdf(double t, double df) {
  const double ln = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                    0.5 * std::log(df * std::numbers::pi) -
                    (df + 1.0) / 2.0 * std::log1p(t * t / df);
  return std::exp(ln);
}

}  // namespace

double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("sample_sd: need >= 2 values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("percentile: p outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

double median(std::vector<double> values) {
  return percentile(std::move(values), 0.5);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
  if (!(df >= 1.0)) throw std::domain_error("t_cdf: df must be >= 1");
  if (std::isnan(t)) throw std::domain_error("t_cdf: t is NaN");
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double t_two_sided_p(double t, double df) {
  if (!(df >= 1.0)) throw std::domain_error("t_two_sided_p: df must be >= 1");
  if (std::isnan(t)) throw std::domain_error("t_two_sided_p: t is NaN");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("t_quantile: p must lie in (0, 1)");
  if (!(df >= 1.0)) throw std::domain_error("t_quantile: df must be >= 1");
  if (p == 0.5) return 0.0;

  const double q = p > 0.5 ? p : 1.0 - p;  // solve on the upper half
  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (t_cdf(hi, df) < q && guard++ < 2000) hi *= 2.0;

  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (t_cdf(mid, df) < q)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  // Newton polish; the bracket above already pins ~15 digits, this just
  // tightens the last bits when the pdf is well-scaled.
  for (int i = 0; i < 3; ++i) {
    const double f = t_cdf(t, df) - q;
    const double d = t_pdf(t, df);
    if (d <= 0.0) break;
    const double next = t - f / d;
    if (next > lo && next < hi) t = next;
  }
  return p > 0.5 ? t : -t;
}

}  // namespace gazeqa::stats
