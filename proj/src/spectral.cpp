#include "frontlab/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "frontlab/optimize.hpp"

namespace frontlab {

namespace {

cplx transport_branch(cplx kc, double c0, BranchSign sign) {
  const double offset = (sign == BranchSign::plus) ? 1.0 - c0 : 1.0 + c0;
  return -kc * kc - offset + cplx(0.0, 1.0) * c0 * kc;
}

cplx pattern_branch(cplx kc, double c0, double alpha) {
  const cplx q = 1.0 - kc * kc;
  return -q * q + alpha + cplx(0.0, 1.0) * c0 * kc;
}

}  // namespace

std::pair<cplx, cplx> dispersion_homogeneous(double k, const FrontModelParams& p,
                                             BranchSign sign, double beta) {
  const cplx kc(k, beta);
  return {transport_branch(kc, p.c0, sign), pattern_branch(kc, p.c0, p.alpha)};
}

double weighted_spectrum_bound(double beta, double epsilon, const FrontModelParams& p) {
  if (beta < 0.0) throw std::invalid_argument("weight beta must be >= 0");
  const double alpha = epsilon * epsilon;
  // transport branches: Re = -k^2 + b^2 - (1 -+ c0) - c0 b, maximal at k = 0
  const double u_plus = beta * beta - (1.0 - p.c0) - p.c0 * beta;
  const double u_minus = beta * beta - (1.0 + p.c0) - p.c0 * beta;
  auto re_v = [&](double k) {
    return pattern_branch(cplx(k, beta), p.c0, alpha).real();
  };
  auto [kmax, v_sup] = golden_max(re_v, 0.0, 4.0, 1e-12);
  (void)kmax;
  return std::max({u_plus, u_minus, v_sup});
}

double weighted_spectrum_bound_formula(double beta, double epsilon, const FrontModelParams& p) {
  const double alpha = epsilon * epsilon;
  const double u_plus = beta * beta - (1.0 - p.c0) - p.c0 * beta;
  const double u_minus = beta * beta - (1.0 + p.c0) - p.c0 * beta;
  const double v_sup = alpha - p.c0 * beta + 4.0 * beta * beta * (1.0 + 2.0 * beta * beta);
  return std::max({u_plus, u_minus, v_sup});
}

WeightWindow find_weight_window(const FrontModelParams& p, double c1_slope) {
  p.validate();
  if (!(c1_slope > 0.0 && c1_slope < p.c0))
    throw std::invalid_argument("weight window requires 0 < c1_slope < c0");

  auto gap = [&](double beta) {
    return weighted_spectrum_bound(beta, std::sqrt(c1_slope * beta), p);
  };

  // The bound behaves like (c1 - c0) beta < 0 near 0 and turns positive once
  // the quartic weight correction wins; locate the first sign change.
  const double beta_cap = 2.0;
  double lo = 1e-6, hi = lo;
  if (gap(lo) >= 0.0) return {};  // only possible for invalid c0
  double step = 0.01;
  bool bracketed = false;
  for (double b = lo + step; b <= beta_cap; b += step) {
    if (gap(b) >= 0.0) {
      hi = b;
      bracketed = true;
      break;
    }
    lo = b;
  }
  WeightWindow w;
  w.c1_slope = c1_slope;
  w.beta0 = bracketed ? bisect_root(gap, lo, hi, 1e-6) : beta_cap;
  w.nu = -gap(0.5 * w.beta0);
  return w;
}

std::vector<std::pair<cplx, double>> polynomial_roots(const std::vector<cplx>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 1 || coeffs[deg] == cplx(0.0, 0.0))
    throw std::invalid_argument("polynomial_roots: invalid degree");

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs[i] / coeffs[deg];

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("polynomial_roots: eigensolver did not converge");

  auto eval = [&](cplx z) {
    cplx v = 0.0;
    for (int i = deg; i >= 0; --i) v = v * z + coeffs[i];
    return v;
  };
  auto deriv = [&](cplx z) {
    cplx v = 0.0;
    for (int i = deg; i >= 1; --i) v = v * z + double(i) * coeffs[i];
    return v;
  };

  std::vector<std::pair<cplx, double>> roots;
  roots.reserve(deg);
  for (int i = 0; i < deg; ++i) {
    cplx z = es.eigenvalues()(i);
    for (int it = 0; it < 2; ++it) {  // Newton polish
      cplx d = deriv(z);
      if (std::abs(d) < 1e-14) break;
      z -= eval(z) / d;
    }
    roots.push_back({z, std::abs(eval(z))});
  }
  return roots;
}

SpatialEigenReport spatial_eigenvalues(int m, double c, double alpha,
                                       const FrontModelParams& p, BranchSign sign) {
  if (!(c > 0.0)) throw std::invalid_argument("spatial eigenvalues require c > 0");
  const double omega = c;
  const cplx im_term(0.0, omega * m);

  SpatialEigenReport rep;
  rep.mode_index = m;

  // quadratic factor: l^2 + c l - (1 -+ c0) - i omega m = 0
  const double offset = (sign == BranchSign::plus) ? 1.0 - p.c0 : 1.0 + p.c0;
  const cplx disc = std::sqrt(cplx(c * c + 4.0 * offset, 0.0) + 4.0 * im_term);
  rep.transport_roots[0] = 0.5 * (-c + disc);
  rep.transport_roots[1] = 0.5 * (-c - disc);
  for (int i = 0; i < 2; ++i) {
    const cplx l = rep.transport_roots[i];
    rep.residuals[i] = std::abs(l * (l + c) - offset - im_term);
  }

  // quartic factor: l^4 + 2 l^2 - c l + (1 - alpha + i omega m) = 0
  std::vector<cplx> coeffs = {cplx(1.0 - alpha, 0.0) + im_term, cplx(-c, 0.0),
                              cplx(2.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)};
  auto roots = polynomial_roots(coeffs);
  const double scale = std::max(1.0, std::abs(coeffs[0]));
  for (int i = 0; i < 4; ++i) {
    rep.pattern_roots[i] = roots[i].first;
    rep.residuals[2 + i] = roots[i].second;
    if (roots[i].second > 1e-8 * scale)
      throw std::runtime_error("spatial eigenvalues: root residual too large");
  }

  auto classify = [&](cplx l) {
    if (std::abs(l.real()) <= rep.tol_center)
      ++rep.n_center;
    else if (l.real() < 0.0)
      ++rep.n_stable;
    else
      ++rep.n_unstable;
  };
  for (const cplx& l : rep.transport_roots) classify(l);
  for (const cplx& l : rep.pattern_roots) classify(l);
  return rep;
}

cplx hopf_root_expansion(double alpha, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("hopf root requires c > 0");
  // Track the m = 1 quartic root from lambda = i, stepping alpha gradually.
  auto newton_from = [&](cplx l0, double a) {
    cplx l = l0;
    for (int it = 0; it < 50; ++it) {
      const cplx q = 1.0 + l * l;
      const cplx f = -q * q + c * l - cplx(0.0, c) + a;
      const cplx df = -4.0 * q * l + c;
      const cplx step = f / df;
      l -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return l;
  };
  const int nsteps = 8;
  cplx l(0.0, 1.0);
  for (int s = 1; s <= nsteps; ++s) {
    const double a = alpha * s / nsteps;
    const cplx next = newton_from(l, a);
    if (std::abs(next - l) > 0.5)
      throw std::runtime_error("hopf root tracking left the basin (alpha too large)");
    l = next;
  }
  const cplx q = 1.0 + l * l;
  if (std::abs(-q * q + c * l - cplx(0.0, c) + alpha) > 1e-10)
    throw std::runtime_error("hopf root tracking did not converge");
  return l - cplx(0.0, 1.0);
}

std::pair<cplx, cplx> pulse_continuous_spectrum(double k, const PulseModelParams& p) {
  const double drift = p.c1i * k * k + p.nu0;
  const double rad = drift * drift - p.alpha1 * p.alpha1;
  if (rad < 0.0)
    throw std::domain_error("pulse spectrum: (c1i k^2 + nu0)^2 < alpha1^2");
  const double re = -p.alpha0 - p.c1r * k * k;
  const double im = std::sqrt(rad);
  return {cplx(re, im), cplx(re, -im)};
}

}  // namespace frontlab
