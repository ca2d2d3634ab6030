#include <cmath>
#include <limits>
#include <stdexcept>

#include "reibun/evalstats.hpp"

namespace reibun {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;

// Continued fraction for I_x(a, b), modified Lentz; valid for x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
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
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double front(double a, double b, double x) {
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) return front(a, b, x) * beta_cf(a, b, x) / a;
  return 1.0 - front(b, a, 1.0 - x) * beta_cf(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double df1, double df2) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return incomplete_beta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2));
}

double f_sf(double x, double df1, double df2) {
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x));
}

double f_quantile(double p, double df1, double df2) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("f_quantile: p outside (0, 1)");
  // Solve on the beta scale, y = df1 x / (df1 x + df2), where the
  // function is bounded; bisection until the bracket stops shrinking.
  const double a = df1 / 2.0;
  const double b = df2 / 2.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 2000; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    if (incomplete_beta(a, b, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double y = lo + (hi - lo) / 2.0;
  return df2 * y / (df1 * (1.0 - y));
}

}  // namespace reibun
