#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace frontlab {

/// Golden-section search for the minimum of f on [lo, hi].
/// Returns (argmin, min).  Assumes f is unimodal on the bracket.
inline std::pair<double, double> golden_min(const std::function<double(double)>& f,
                                            double lo, double hi, double xtol = 1e-12) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

inline std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                            double lo, double hi, double xtol = 1e-12) {
  auto [x, v] = golden_min([&](double t) { return -f(t); }, lo, hi, xtol);
  return {x, -v};
}

/// Scalar bisection for a sign change of f on [lo, hi]; requires
/// f(lo) and f(hi) of opposite sign.
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                          double xtol = 1e-12) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid; flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Least-squares line fit y ~ a + b x.  Returns (a, b, rms residual).
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms_residual = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  LineFit f;
  const double det = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

}  // namespace frontlab
