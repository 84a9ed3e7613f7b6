#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "frontlab/optimize.hpp"
#include "frontlab/spectral.hpp"

using namespace frontlab;

namespace {
FrontModelParams make_params(double c0, double gamma, double alpha) {
  FrontModelParams p;
  p.c0 = c0;
  p.gamma = gamma;
  p.alpha = alpha;
  return p;
}
}  // namespace

TEST_CASE("dispersion branches satisfy their defining polynomials") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uk(-3.0, 3.0), uc(0.05, 0.95), ua(-0.5, 0.5),
      ub(0.0, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const double k = uk(rng), c0 = uc(rng), alpha = ua(rng), beta = ub(rng);
    FrontModelParams p = make_params(c0, 0.3, alpha);
    const cplx kc(k, beta);
    for (BranchSign sign : {BranchSign::plus, BranchSign::minus}) {
      auto [l1, l2] = dispersion_homogeneous(k, p, sign, beta);
      const double off = (sign == BranchSign::plus) ? 1.0 - c0 : 1.0 + c0;
      const cplx r1 = l1 + kc * kc + off - cplx(0.0, 1.0) * c0 * kc;
      const cplx q = 1.0 - kc * kc;
      const cplx r2 = l2 + q * q - alpha - cplx(0.0, 1.0) * c0 * kc;
      CHECK(std::abs(r1) < 1e-12);
      CHECK(std::abs(r2) < 1e-12);
    }
  }
}

TEST_CASE("dispersion reference values") {
  // transport branch at k = 0
  auto [l1, l2a] = dispersion_homogeneous(0.0, make_params(0.5, 0.3, 0.0), BranchSign::plus);
  (void)l2a;
  CHECK(l1.real() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(l1.imag() == 0.0);

  // pattern branch at the critical wavenumber
  auto [l1b, l2] = dispersion_homogeneous(1.0, make_params(0.5, 0.3, 0.1), BranchSign::plus);
  (void)l1b;
  CHECK(l2.real() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(l2.imag() == doctest::Approx(0.5).epsilon(1e-14));

  // weighted pattern branch: eps^2 - c0 b + 4 k^2 b^2 - (1 - k^2 + b^2)^2
  auto [l1c, l2w] = dispersion_homogeneous(1.0, make_params(0.5, 0.3, 0.0), BranchSign::plus, 0.1);
  (void)l1c;
  CHECK(l2w.real() == doctest::Approx(-0.0101).epsilon(1e-12));
}

TEST_CASE("conjugate symmetry of unweighted branches") {
  FrontModelParams p = make_params(0.5, 0.3, 0.07);
  for (double k : {0.3, 1.1, 2.7}) {
    for (BranchSign s : {BranchSign::plus, BranchSign::minus}) {
      auto [a1, a2] = dispersion_homogeneous(k, p, s, 0.0);
      auto [b1, b2] = dispersion_homogeneous(-k, p, s, 0.0);
      CHECK(std::abs(b1 - std::conj(a1)) < 1e-14);
      CHECK(std::abs(b2 - std::conj(a2)) < 1e-14);
    }
  }
}

TEST_CASE("weighted spectrum bound: search agrees with the closed form") {
  FrontModelParams p = make_params(0.5, 0.3, 0.0);
  for (double beta : {0.0, 0.02, 0.05, 0.1, 0.2}) {
    for (double eps : {0.0, 0.05, 0.2}) {
      const double searched = weighted_spectrum_bound(beta, eps, p);
      const double formula = weighted_spectrum_bound_formula(beta, eps, p);
      CHECK(std::abs(searched - formula) < 1e-9);

      // independent oracle: dense grid maximization over k in [0, 4]
      double grid_max = -1e300;
      for (int i = 0; i <= 40000; ++i) {
        const double k = 4.0 * i / 40000;
        FrontModelParams pe = p;
        pe.alpha = eps * eps;
        auto [l1p, l2] = dispersion_homogeneous(k, pe, BranchSign::plus, beta);
        auto [l1m, l2b] = dispersion_homogeneous(k, pe, BranchSign::minus, beta);
        (void)l2b;
        grid_max = std::max({grid_max, l1p.real(), l1m.real(), l2.real()});
      }
      CHECK(std::abs(searched - grid_max) < 1e-6);
    }
  }
}

TEST_CASE("weighted spectrum bound: unweighted lower bound and unit slope in eps^2") {
  FrontModelParams p = make_params(0.5, 0.3, 0.0);
  CHECK(weighted_spectrum_bound(0.0, 0.1, p) >= 0.01 - 1e-12);
  CHECK(weighted_spectrum_bound(0.1, 0.0, p) <= -0.0092 + 1e-9);

  const double b = 0.05;
  const double f0 = weighted_spectrum_bound(b, 0.0, p);
  const double f1 = weighted_spectrum_bound(b, 0.1, p);
  const double f2 = weighted_spectrum_bound(b, 0.2, p);
  CHECK(f1 - f0 == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(f2 - f0 == doctest::Approx(0.04).epsilon(1e-6));
}

TEST_CASE("weight window at the reference parameters") {
  FrontModelParams p = make_params(0.5, 0.3, 0.0);
  WeightWindow w = find_weight_window(p, 0.25);
  CHECK(w.beta0 > 0.0);
  CHECK(w.nu > 0.0);

  // independent scalar root of (c1 - c0) + 4 b (1 + 2 b^2) = 0
  auto gap_formula = [&](double b) { return (0.25 - 0.5) + 4.0 * b * (1.0 + 2.0 * b * b); };
  const double root = bisect_root(gap_formula, 1e-4, 1.0, 1e-10);
  CHECK(w.beta0 == doctest::Approx(root).epsilon(1e-4));

  // the bound at beta0/2 under eps^2 = c1 beta is strictly negative
  const double mid = 0.5 * w.beta0;
  CHECK(weighted_spectrum_bound(mid, std::sqrt(0.25 * mid), p) < 0.0);
  CHECK(weighted_spectrum_bound(mid, std::sqrt(0.25 * mid), p) == doctest::Approx(-w.nu));

  // eps = 0 window: root of -c0 + 4 b (1 + 2 b^2), beyond 0.1 for c0 = 0.5
  auto gap0 = [&](double b) { return -0.5 + 4.0 * b * (1.0 + 2.0 * b * b); };
  const double root0 = bisect_root(gap0, 1e-4, 1.0, 1e-10);
  CHECK(root0 > 0.1);

  // shrinking but positive window as c1 -> c0
  WeightWindow w2 = find_weight_window(p, 0.45);
  CHECK(w2.beta0 > 0.0);
  CHECK(w2.beta0 < w.beta0);

  CHECK_THROWS_AS(find_weight_window(p, 0.6), std::invalid_argument);
}

TEST_CASE("spatial eigenvalues: quadratic factor closed form") {
  FrontModelParams p = make_params(0.5, 0.3, 0.0);
  SpatialEigenReport rep = spatial_eigenvalues(0, 0.5, 0.0, p, BranchSign::plus);
  // l^2 + 0.5 l - 0.5 = 0 -> {0.5, -1}
  std::vector<double> roots = {rep.transport_roots[0].real(), rep.transport_roots[1].real()};
  std::sort(roots.begin(), roots.end());
  CHECK(roots[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(rep.transport_roots[0].imag()) < 1e-12);
}

TEST_CASE("spatial eigenvalues: center-root census at onset") {
  FrontModelParams p = make_params(0.5, 0.3, 0.0);
  int total_center = 0;
  for (int m = -10; m <= 10; ++m) {
    SpatialEigenReport rep = spatial_eigenvalues(m, 0.5, 0.0, p, BranchSign::plus);
    CHECK(rep.n_stable + rep.n_center + rep.n_unstable == 6);
    total_center += rep.n_center;
    if (m == 1) {
      bool found = false;
      for (const cplx& l : rep.pattern_roots)
        if (std::abs(l - cplx(0.0, 1.0)) < 1e-9) found = true;
      CHECK(found);
      CHECK(rep.n_center == 1);
    } else if (m == -1) {
      CHECK(rep.n_center == 1);
    } else {
      CHECK(rep.n_center == 0);
    }
  }
  CHECK(total_center == 2);
}

TEST_CASE("spatial eigenvalues: Vieta identities for the quartic") {
  FrontModelParams p = make_params(0.5, 0.3, 0.0);
  for (int m : {-3, 0, 2, 7}) {
    for (double alpha : {-0.2, 0.0, 0.1}) {
      SpatialEigenReport rep = spatial_eigenvalues(m, 0.7, alpha, p, BranchSign::minus);
      cplx sum = 0.0, prod = 1.0;
      for (const cplx& l : rep.pattern_roots) {
        sum += l;
        prod *= l;
      }
      // l^4 + 2 l^2 - c l + (1 - alpha + i c m): sum = 0, product = constant
      CHECK(std::abs(sum) < 1e-10);
      CHECK(std::abs(prod - cplx(1.0 - alpha, 0.7 * m)) < 1e-10);
    }
  }
}

TEST_CASE("spatial eigenvalues: hyperbolicity below onset") {
  FrontModelParams p = make_params(0.5, 0.3, 0.0);
  double min_re = 1e300;
  for (int m = -10; m <= 10; ++m) {
    for (BranchSign s : {BranchSign::plus, BranchSign::minus}) {
      SpatialEigenReport rep = spatial_eigenvalues(m, 0.5, -0.05, p, s);
      CHECK(rep.n_center == 0);
      for (const cplx& l : rep.transport_roots) min_re = std::min(min_re, std::abs(l.real()));
      for (const cplx& l : rep.pattern_roots) min_re = std::min(min_re, std::abs(l.real()));
    }
  }
  CHECK(min_re > 0.01);
}

TEST_CASE("root of the first temporal harmonic tracked from onset") {
  CHECK(std::abs(hopf_root_expansion(0.0, 0.5)) < 1e-12);

  // quartic-oracle cross check at alpha = 1e-3
  const cplx mu = hopf_root_expansion(1e-3, 0.5);
  {
    std::vector<cplx> coeffs = {cplx(1.0 - 1e-3, 0.5), cplx(-0.5, 0.0), cplx(2.0, 0.0),
                                cplx(0.0, 0.0), cplx(1.0, 0.0)};
    auto roots = polynomial_roots(coeffs);
    double best = 1e300;
    cplx oracle;
    for (auto& [z, res] : roots) {
      (void)res;
      if (std::abs(z - cplx(0.0, 1.0)) < best) {
        best = std::abs(z - cplx(0.0, 1.0));
        oracle = z - cplx(0.0, 1.0);
      }
    }
    CHECK(std::abs(mu - oracle) < 1e-10);
  }
  CHECK(mu.real() == doctest::Approx(-2e-3).epsilon(0.02));

  // Richardson check of mu(alpha)/alpha -> -1/c
  const cplx r1 = hopf_root_expansion(1e-3, 0.5) / 1e-3;
  const cplx r2 = hopf_root_expansion(1e-4, 0.5) / 1e-4;
  const cplx limit = (10.0 * r2 - r1) / 9.0;
  CHECK(std::abs(limit - cplx(-2.0, 0.0)) < 0.01 * 2.0);

  // leaving the basin is reported
  CHECK_THROWS_AS(hopf_root_expansion(50.0, 0.5), std::runtime_error);
}

TEST_CASE("pulse continuous spectrum") {
  PulseModelParams p;  // (0.6, 0.8, 1, 0.1 + 10i)
  auto [l1, l2] = pulse_continuous_spectrum(0.0, p);
  CHECK(std::abs(l1 - cplx(-0.6, 0.6)) < 1e-15);
  CHECK(std::abs(l2 - cplx(-0.6, -0.6)) < 1e-15);

  // real part strictly decreasing in k^2 for c1r > 0, max at k = 0
  double prev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double k = 0.1 * i;
    auto [a, b] = pulse_continuous_spectrum(k, p);
    CHECK(a.real() == b.real());
    CHECK(a.real() <= -p.alpha0 + 1e-14);
    if (i > 0) CHECK(a.real() < prev);
    prev = a.real();
  }
}
