#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "frontlab/model.hpp"

namespace frontlab {

// ---------------------------------------------------------------------------
// Dispersion relations of the homogeneous front states
// ---------------------------------------------------------------------------

/// Sampled complex eigenvalue curves over a wavenumber grid.
struct SpectrumCurve {
  std::vector<double> wavenumbers;
  std::vector<std::string> labels;               // one per branch
  std::vector<std::vector<cplx>> values;         // values[branch][i]
  double weight = 0.0;                           // exponential weight beta used
};

/// Both dispersion branches of the linearization at (+-1, 0), evaluated at
/// the complexified wavenumber k + i*beta (beta = 0 is the unweighted case):
///   first  = -(k+ib)^2 - (1 -+ c0) + c0 i (k+ib)
///   second = -(1 - (k+ib)^2)^2 + alpha + c0 i (k+ib)
std::pair<cplx, cplx> dispersion_homogeneous(double k, const FrontModelParams& p,
                                             BranchSign sign, double beta = 0.0);

/// Supremum over real k of the real part of the weighted essential spectrum,
/// with the pattern-branch growth rate set to epsilon^2.  The transport
/// branches are maximized in closed form, the pattern branch by 1-D search
/// over k in [0, 4] (all branches fall off like -k^2 or -k^4 beyond).
double weighted_spectrum_bound(double beta, double epsilon, const FrontModelParams& p);

/// Same supremum from the closed-form maximization
///   eps^2 - c0 b + 4 b^2 (1 + 2 b^2)   (pattern branch, exact max)
/// used to cross-check the search.
double weighted_spectrum_bound_formula(double beta, double epsilon, const FrontModelParams& p);

/// Admissible exponential-weight window: for 0 < beta < beta0 and
/// eps^2 <= c1_slope * beta the weighted essential spectrum has a gap.
struct WeightWindow {
  double beta0 = 0.0;     // upper end of the admissible weight interval
  double c1_slope = 0.0;  // slope in the admissibility condition eps^2 <= c1*beta
  double nu = 0.0;        // spectral margin achieved at beta = beta0/2
};
WeightWindow find_weight_window(const FrontModelParams& p, double c1_slope);

// ---------------------------------------------------------------------------
// Spatial-dynamics eigenvalues
// ---------------------------------------------------------------------------

/// Roots of the order-m spatial eigenvalue conditions at the homogeneous
/// states: 2 from  l(l + c) - (1 -+ c0) - i c m = 0  and 4 from
/// -(1 + l^2)^2 + c l - i c m + alpha = 0, classified by sign of Re.
struct SpatialEigenReport {
  int mode_index = 0;
  std::array<cplx, 2> transport_roots;
  std::array<cplx, 4> pattern_roots;
  std::array<double, 6> residuals;  // defining-polynomial residual per root
  int n_stable = 0, n_center = 0, n_unstable = 0;
  double tol_center = 1e-9;
};
SpatialEigenReport spatial_eigenvalues(int m, double c, double alpha,
                                       const FrontModelParams& p, BranchSign sign);

/// Root of the m = 1 quartic continued from lambda = i at alpha = 0,
/// returned as mu = lambda - i (so mu ~ -alpha/c for small alpha).
/// Throws when the continuation leaves the basin of that root.
cplx hopf_root_expansion(double alpha, double c);

/// All complex roots of sum_j coeffs[j] z^j via the companion matrix,
/// polished by one Newton step each.  Residuals returned alongside.
std::vector<std::pair<cplx, double>> polynomial_roots(const std::vector<cplx>& coeffs);

// ---------------------------------------------------------------------------
// Pulse background spectrum
// ---------------------------------------------------------------------------

/// The two continuous-spectrum branches of the linearized amplitude pair:
/// -alpha0 - c1r k^2 +- i sqrt((c1i k^2 + nu0)^2 - alpha1^2).
std::pair<cplx, cplx> pulse_continuous_spectrum(double k, const PulseModelParams& p);

}  // namespace frontlab
