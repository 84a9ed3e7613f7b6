#pragma once

#include <Eigen/Dense>

#include "frontlab/model.hpp"

namespace frontlab {

// ---------------------------------------------------------------------------
// Discrete Bloch-wave transform
// ---------------------------------------------------------------------------

/// Fiber decomposition of a real field on a domain of M cells of length
/// 2*pi: fibers[f][c][p] with fiber index f in FFT order (ell_f = r/M,
/// r = f for f < M/2, r = f - M otherwise), component c, cell point p.
/// Normalized so that for localized fields the zero fiber matches the
/// continuous transform sum_n e^{inx} u~(n+ell) pointwise; Parseval reads
/// ||u||^2 = (1/M) sum_f int_cell |fiber_f|^2.
struct BlochField {
  int cell_count = 0;      // M
  int points_per_cell = 0; // P
  int ncomp = 0;
  std::vector<std::vector<std::vector<cplx>>> fibers;

  double ell(int f) const {
    int r = (f <= (cell_count - 1) / 2) ? f : f - cell_count;
    return double(r) / cell_count;
  }
  /// Fiber index holding ell = 0.
  int zero_fiber() const { return 0; }
};

BlochField bloch_transform(const Field& u);
Field inverse_bloch(const BlochField& b, const GridSpec& g);

/// Fiber-integrated squared norm: (1/M) sum_f int_0^{2pi} |fiber|^2 dx.
double bloch_norm_sq(const BlochField& b);

// ---------------------------------------------------------------------------
// Fiber operators around a periodic pattern
// ---------------------------------------------------------------------------

/// Fourier-Galerkin truncation of the fiber operator
///   [ (d_x + i ell)^2 + f1 ,  1 ;  f2 , -(1 + (d_x + i ell)^2)^2 + f3 ]
/// with f1, f2, f3 the reaction Jacobian at the pattern.  Size 2(2K+1),
/// modes |n| <= K, component-major layout.
struct BlochOperator {
  double ell = 0.0;
  int K = 16;
  Eigen::MatrixXcd matrix;
  Field pattern;  // the cell field used for the coefficients
  FrontModelParams params;

  int block_size() const { return 2 * K + 1; }
  int dim() const { return 2 * block_size(); }
};

/// Assembles the operator; rejects patterns whose equilibrium residual
/// exceeds `residual_gate`.
BlochOperator assemble_bloch_operator(const Field& pattern, double ell,
                                      const FrontModelParams& p, int K,
                                      double residual_gate = 1e-8);

struct BlochEigenSystem {
  std::vector<cplx> values;       // sorted by descending real part
  Eigen::MatrixXcd vectors;       // columns matching values
  std::vector<double> residuals;  // ||M v - mu v|| / ||v||
};

/// Top `count` eigenvalues of the dense fiber matrix (count <= dim).
BlochEigenSystem bloch_eigenvalues(const BlochOperator& op, int count);

/// Leading eigenpair with its adjoint, normalized to <psi, phi> = 1 in the
/// cell L2 inner product; at ell = 0 additionally ||phi|| = 1 with the
/// phase fixed along the pattern-derivative direction.
struct CriticalEigenpair {
  cplx mu;
  Eigen::VectorXcd phi;      // Fourier coefficients, component-major
  Eigen::VectorXcd psi;
  double c_N = 0.0;          // phi(0) = c_N * dx U_per (ell = 0 only)
  int K = 0;
  double gap = 0.0;          // |mu1 - mu2|

  /// Apply the rank-one spectral projection <psi, f> phi to coefficients.
  Eigen::VectorXcd project(const Eigen::VectorXcd& f) const;
};
CriticalEigenpair critical_eigenpair(const BlochOperator& op);

/// Synthesize component c of a coefficient vector on the P-point cell grid.
std::vector<cplx> synthesize_cell(const Eigen::VectorXcd& coeffs, int K, int comp, int P);
/// Analyze a complex cell field into the coefficient layout (modes |n|<=K).
Eigen::VectorXcd analyze_cell(const std::vector<std::vector<cplx>>& comps, int K);

/// Cell L2 inner product of coefficient vectors: 2*pi sum conj(a) b.
cplx cell_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// Scalar diffusive amplitude <psi0, v_hat(0, .)> of a transformed field.
cplx project_diffusive_amplitude(const BlochField& v, const CriticalEigenpair& pair_at_zero);

// ---------------------------------------------------------------------------
// Spectrum sweeps and the diffusion coefficient
// ---------------------------------------------------------------------------

struct BlochSweep {
  std::vector<double> ells;
  std::vector<cplx> mu1, mu2;
  std::vector<double> res1, res2;
  bool branch_crossing = false;  // eigenvector-overlap tracking failed
};

/// Track the two leading branches over the given ells (must contain 0;
/// tracking proceeds outward by eigenvector overlap >= 0.9).
BlochSweep sweep_bloch_spectrum(const Field& pattern, const FrontModelParams& p,
                                const std::vector<double>& ells, int K);

struct DiffusionFit {
  double d = 0.0;          // mu1(ell) ~ -d ell^2 + e ell^4
  double quartic = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares fit of Re mu1 against -ell^2 with a quartic correction.
DiffusionFit fit_diffusion_coefficient(const std::vector<std::pair<double, cplx>>& samples);

}  // namespace frontlab
