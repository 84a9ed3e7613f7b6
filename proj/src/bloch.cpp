#include "frontlab/bloch.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace frontlab {

namespace {

int signed_fiber(int f, int M) { return (f <= (M - 1) / 2) ? f : f - M; }

int signed_mode(int q, int P) { return (q <= (P - 1) / 2) ? q : q - P; }

}  // namespace

BlochField bloch_transform(const Field& u) {
  u.grid.validate(true);
  const int M = u.grid.cell_count();
  const int P = u.grid.points_per_cell();
  const int N = u.grid.points;

  BlochField out;
  out.cell_count = M;
  out.points_per_cell = P;
  out.ncomp = u.components();
  out.fibers.assign(M, std::vector<std::vector<cplx>>(out.ncomp, std::vector<cplx>(P, 0.0)));

  Fft global(N);
  Fft cell(P);
  std::vector<cplx> chat, slots(P), fiber;

  for (int c = 0; c < out.ncomp; ++c) {
    global.forward(u[c], chat);
    // regroup the signed spectrum n in [-N/2, N/2) as n = m*M + r
    std::vector<std::vector<cplx>> coeff(M, std::vector<cplx>(P, 0.0));
    for (int n = -N / 2; n < (N + 1) / 2; ++n) {
      cplx v;
      if (n >= 0)
        v = chat[n];
      else if (n == -N / 2)
        v = chat[N / 2];  // unpaired Nyquist, stored at the negative end
      else
        v = std::conj(chat[-n]);
      const int f = ((n % M) + M) % M;
      const int m = (n - signed_fiber(f, M)) / M;
      coeff[f][((m % P) + P) % P] = v;
    }
    for (int f = 0; f < M; ++f) {
      cell.inverse_c(coeff[f], fiber);  // unnormalized sum over modes
      for (int p = 0; p < P; ++p) out.fibers[f][c][p] = double(M) * fiber[p];
    }
  }
  return out;
}

Field inverse_bloch(const BlochField& b, const GridSpec& g) {
  const int M = b.cell_count, P = b.points_per_cell, N = M * P;
  if (g.points != N || g.cell_count() != M)
    throw std::invalid_argument("inverse bloch: grid does not match the fiber layout");

  Fft global(N);
  Fft cell(P);
  Field out(g, b.ncomp);
  std::vector<cplx> half(N / 2 + 1), coeff;

  for (int c = 0; c < b.ncomp; ++c) {
    std::fill(half.begin(), half.end(), cplx(0.0, 0.0));
    for (int f = 0; f < M; ++f) {
      cell.forward_c(b.fibers[f][c], coeff);
      const int r = signed_fiber(f, M);
      for (int q = 0; q < P; ++q) {
        // the slot's signed mode can land one period off for fibers whose
        // valid m-range includes +P/2; fold n back into [-N/2, N/2)
        int n = signed_mode(q, P) * M + r;
        if (n < -N / 2) n += N;
        if (n >= (N + 1) / 2 && n != N / 2) n -= N;
        const cplx v = coeff[q] / double(M);
        if (n >= 0 && n <= N / 2)
          half[n] = v;
        else if (n == -N / 2)
          half[N / 2] = v;
      }
    }
    global.inverse(half, out[c]);
  }
  return out;
}

double bloch_norm_sq(const BlochField& b) {
  double s = 0.0;
  for (const auto& fib : b.fibers)
    for (const auto& comp : fib)
      for (const cplx& z : comp) s += std::norm(z);
  return s * kTwoPi / (double(b.points_per_cell) * b.cell_count);
}

// ---------------------------------------------------------------------------
// Fiber operators
// ---------------------------------------------------------------------------

BlochOperator assemble_bloch_operator(const Field& pattern, double ell,
                                      const FrontModelParams& p, int K,
                                      double residual_gate) {
  if (pattern.components() != 2)
    throw std::invalid_argument("bloch operator: pattern must have 2 components");
  if (std::abs(pattern.grid.length() - kTwoPi) > 1e-9)
    throw std::invalid_argument("bloch operator: pattern must live on one 2*pi cell");
  if (K < 8) throw std::invalid_argument("bloch operator: K must be >= 8");
  if (std::abs(ell) > 0.5 + 1e-12)
    throw std::invalid_argument("bloch operator: |ell| must be <= 1/2");
  const int P = pattern.size();
  if (P < 4 * K + 4) throw std::invalid_argument("bloch operator: cell grid too coarse for K");

  {
    const double res = front_equilibrium_residual(pattern, p, P / 3);
    if (res > residual_gate)
      throw std::invalid_argument("bloch operator: pattern equilibrium residual " +
                                  std::to_string(res) + " exceeds gate");
  }

  const ReactionJacobian jac = front_linearization(pattern, p);
  Fft fft(P);
  std::vector<cplx> f1h, f2h, f3h;
  fft.forward(jac.j11, f1h);
  fft.forward(jac.j21, f2h);
  fft.forward(jac.j22, f3h);
  auto coef = [&](const std::vector<cplx>& ch, int q) -> cplx {
    if (q >= 0) return ch[q];
    return std::conj(ch[-q]);
  };

  BlochOperator op;
  op.ell = ell;
  op.K = K;
  op.pattern = pattern;
  op.params = p;
  const int B = op.block_size();
  op.matrix = Eigen::MatrixXcd::Zero(2 * B, 2 * B);
  for (int n = -K; n <= K; ++n) {
    const int row = n + K;
    const double kn = n + ell;
    const double sh = 1.0 - kn * kn;
    op.matrix(row, row) += -kn * kn;
    op.matrix(row, B + row) = 1.0;
    op.matrix(B + row, B + row) += -sh * sh;
    for (int m = -K; m <= K; ++m) {
      const int col = m + K;
      const cplx f1 = coef(f1h, n - m);
      const cplx f2 = coef(f2h, n - m);
      const cplx f3 = coef(f3h, n - m);
      op.matrix(row, col) += f1;
      op.matrix(B + row, col) += f2;
      op.matrix(B + row, B + col) += f3;
    }
  }
  return op;
}

BlochEigenSystem bloch_eigenvalues(const BlochOperator& op, int count) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.matrix, true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("bloch eigensolver did not converge (dim " +
                             std::to_string(op.dim()) + ", ell " + std::to_string(op.ell) + ")");
  const int dim = op.dim();
  count = std::min(count, dim);
  std::vector<int> idx(dim);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return es.eigenvalues()(a).real() > es.eigenvalues()(b).real();
  });

  BlochEigenSystem sys;
  sys.vectors.resize(dim, count);
  for (int i = 0; i < count; ++i) {
    const int j = idx[i];
    sys.values.push_back(es.eigenvalues()(j));
    Eigen::VectorXcd v = es.eigenvectors().col(j);
    sys.vectors.col(i) = v;
    sys.residuals.push_back((op.matrix * v - es.eigenvalues()(j) * v).norm() / v.norm());
  }
  return sys;
}

std::vector<cplx> synthesize_cell(const Eigen::VectorXcd& coeffs, int K, int comp, int P) {
  std::vector<cplx> out(P, 0.0);
  const int B = 2 * K + 1;
  for (int n = -K; n <= K; ++n) {
    const cplx c = coeffs(comp * B + n + K);
    for (int p = 0; p < P; ++p) {
      const double x = kTwoPi * p / P;
      out[p] += c * std::polar(1.0, n * x);
    }
  }
  return out;
}

Eigen::VectorXcd analyze_cell(const std::vector<std::vector<cplx>>& comps, int K) {
  const int P = static_cast<int>(comps[0].size());
  const int B = 2 * K + 1;
  Eigen::VectorXcd out(static_cast<int>(comps.size()) * B);
  Fft fft(P);
  std::vector<cplx> ch;
  for (size_t c = 0; c < comps.size(); ++c) {
    fft.forward_c(comps[c], ch);
    for (int n = -K; n <= K; ++n)
      out(static_cast<int>(c) * B + n + K) = ch[((n % P) + P) % P];
  }
  return out;
}

cplx cell_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return kTwoPi * a.dot(b);  // Eigen's dot conjugates the left argument
}

CriticalEigenpair critical_eigenpair(const BlochOperator& op) {
  BlochEigenSystem sys = bloch_eigenvalues(op, 2);
  const double restol = std::max(sys.residuals[0], sys.residuals[1]);
  const double gap = std::abs(sys.values[0] - sys.values[1]);
  if (gap < std::max(10.0 * restol, 1e-8))
    throw std::runtime_error("critical eigenpair: leading eigenvalue not isolated (gap " +
                             std::to_string(gap) + ")");

  CriticalEigenpair pair;
  pair.K = op.K;
  pair.mu = sys.values[0];
  pair.gap = gap;
  pair.phi = sys.vectors.col(0);

  // adjoint eigenvector for conj(mu)
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.matrix.adjoint(), true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("critical eigenpair: adjoint eigensolver failed");
  int best = 0;
  double bestdist = 1e300;
  for (int i = 0; i < op.dim(); ++i) {
    const double d = std::abs(es.eigenvalues()(i) - std::conj(pair.mu));
    if (d < bestdist) {
      bestdist = d;
      best = i;
    }
  }
  if (bestdist > 1e-6)
    throw std::runtime_error("critical eigenpair: adjoint eigenvalue mismatch");
  pair.psi = es.eigenvectors().col(best);

  // normalize phi in cell L2; at ell = 0 align the phase with dx U_per
  pair.phi /= std::sqrt(cell_inner(pair.phi, pair.phi).real());
  if (op.ell == 0.0) {
    const int P = op.pattern.size();
    std::vector<std::vector<cplx>> der(2, std::vector<cplx>(P));
    Fft fft(P);
    for (int c = 0; c < 2; ++c) {
      auto d = spectral_derivative(fft, op.pattern.grid, op.pattern[c], 1);
      for (int j = 0; j < P; ++j) der[c][j] = d[j];
    }
    Eigen::VectorXcd derc = analyze_cell(der, op.K);
    const cplx overlap = cell_inner(derc, pair.phi);
    if (std::abs(overlap) > 1e-12) pair.phi *= std::conj(overlap) / std::abs(overlap);
    pair.c_N = 1.0 / std::sqrt(cell_inner(derc, derc).real());
  }

  const cplx s = cell_inner(pair.psi, pair.phi);
  if (std::abs(s) < 1e-12)
    throw std::runtime_error("critical eigenpair: degenerate normalization <psi, phi>");
  pair.psi /= std::conj(s);
  return pair;
}

Eigen::VectorXcd CriticalEigenpair::project(const Eigen::VectorXcd& f) const {
  return cell_inner(psi, f) * phi;
}

cplx project_diffusive_amplitude(const BlochField& v, const CriticalEigenpair& pair_at_zero) {
  const auto& fiber = v.fibers[v.zero_fiber()];
  Eigen::VectorXcd coeffs = analyze_cell(fiber, pair_at_zero.K);
  return cell_inner(pair_at_zero.psi, coeffs);
}

// ---------------------------------------------------------------------------
// Sweeps and the diffusion fit
// ---------------------------------------------------------------------------

BlochSweep sweep_bloch_spectrum(const Field& pattern, const FrontModelParams& p,
                                const std::vector<double>& ells, int K) {
  BlochSweep sweep;
  sweep.ells = ells;
  sweep.mu1.resize(ells.size());
  sweep.mu2.resize(ells.size());
  sweep.res1.resize(ells.size());
  sweep.res2.resize(ells.size());

  std::vector<size_t> order(ells.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return std::abs(ells[a]) < std::abs(ells[b]); });

  // previous tracked eigenvectors per sign of ell
  Eigen::VectorXcd prev1[2], prev2[2];
  bool have_prev[2] = {false, false};

  for (size_t oi : order) {
    const double ell = ells[oi];
    BlochOperator op = assemble_bloch_operator(pattern, ell, p, K);
    BlochEigenSystem sys = bloch_eigenvalues(op, 6);
    const int side = (ell >= 0.0) ? 0 : 1;

    int i1 = 0, i2 = 1;
    if (have_prev[side]) {
      double best1 = -1.0, best2 = -1.0;
      for (int i = 0; i < static_cast<int>(sys.values.size()); ++i) {
        const Eigen::VectorXcd v = sys.vectors.col(i).normalized();
        const double o1 = std::abs(prev1[side].dot(v));
        const double o2 = std::abs(prev2[side].dot(v));
        if (o1 > best1) { best1 = o1; i1 = i; }
        if (o2 > best2) { best2 = o2; i2 = i; }
      }
      if (i1 == i2 || best1 < 0.9 || best2 < 0.9) {
        sweep.branch_crossing = true;
        if (i1 == i2) i2 = (i1 == 0) ? 1 : 0;
      }
    }
    sweep.mu1[oi] = sys.values[i1];
    sweep.mu2[oi] = sys.values[i2];
    sweep.res1[oi] = sys.residuals[i1];
    sweep.res2[oi] = sys.residuals[i2];
    prev1[side] = sys.vectors.col(i1).normalized();
    prev2[side] = sys.vectors.col(i2).normalized();
    have_prev[side] = true;
    if (ell == 0.0) {
      prev1[1] = prev1[0];
      prev2[1] = prev2[0];
      have_prev[1] = true;
    }
  }
  return sweep;
}

DiffusionFit fit_diffusion_coefficient(const std::vector<std::pair<double, cplx>>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("diffusion fit: need at least two samples");
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (const auto& [ell, mu] : samples) {
    const double x1 = -ell * ell, x2 = ell * ell * ell * ell;
    const double y = mu.real();
    a11 += x1 * x1;
    a12 += x1 * x2;
    a22 += x2 * x2;
    b1 += x1 * y;
    b2 += x2 * y;
  }
  const double det = a11 * a22 - a12 * a12;
  DiffusionFit fit;
  if (std::abs(det) < 1e-30) {  // degenerate: single |ell|, drop the quartic term
    fit.d = b1 / a11;
    fit.quartic = 0.0;
  } else {
    fit.d = (a22 * b1 - a12 * b2) / det;
    fit.quartic = (a11 * b2 - a12 * b1) / det;
  }
  double ss = 0.0;
  for (const auto& [ell, mu] : samples) {
    const double model = -fit.d * ell * ell + fit.quartic * ell * ell * ell * ell;
    const double r = mu.real() - model;
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / samples.size());
  return fit;
}

}  // namespace frontlab
