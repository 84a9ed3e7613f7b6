#include "frontlab/newton.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace frontlab {

namespace {

// Cosine analysis on the P-point cell grid: f(x) = sum_n a_n cos(n x).
std::vector<double> cosine_coefficients(const Fft& fft, const std::vector<double>& f, int kmax) {
  std::vector<cplx> c;
  fft.forward(f, c);
  std::vector<double> a(kmax + 1);
  a[0] = c[0].real();
  for (int n = 1; n <= kmax; ++n) a[n] = 2.0 * c[n].real();
  return a;
}

void cosine_synthesize(const std::vector<double>& a, const GridSpec& cell,
                       std::vector<double>& out) {
  const int p = cell.points;
  out.assign(p, a[0]);
  for (size_t n = 1; n < a.size(); ++n)
    for (int j = 0; j < p; ++j) out[j] += a[n] * std::cos(double(n) * cell.x(j));
}

}  // namespace

NewtonResult newton_periodic_equilibrium(const Field& initial_cell, const FrontModelParams& p,
                                         int cos_modes) {
  p.validate();
  const GridSpec cell = initial_cell.grid;
  if (std::abs(cell.length() - kTwoPi) > 1e-9)
    throw std::invalid_argument("newton: cell must span one 2*pi period");
  const int P = cell.points;
  const int K = cos_modes;
  if (P < 8 * K / 3 + 2) throw std::invalid_argument("newton: cell grid too coarse for cos_modes");
  const int dim = 2 * (K + 1);

  Fft fft(P);
  const double h = cell.spacing();

  // unknowns: cosine coefficients, u then v
  Eigen::VectorXd z(dim);
  {
    auto au = cosine_coefficients(fft, initial_cell[0], K);
    auto av = cosine_coefficients(fft, initial_cell[1], K);
    for (int n = 0; n <= K; ++n) {
      z(n) = au[n];
      z(K + 1 + n) = av[n];
    }
  }

  Field u(cell, 2);
  auto synthesize = [&](const Eigen::VectorXd& zz) {
    std::vector<double> a(K + 1);
    for (int n = 0; n <= K; ++n) a[n] = zz(n);
    cosine_synthesize(a, cell, u[0]);
    for (int n = 0; n <= K; ++n) a[n] = zz(K + 1 + n);
    cosine_synthesize(a, cell, u[1]);
  };

  auto grid_residual = [&](Field& r) {
    // residual for the Newton right-hand side (full grid evaluation)
    r = front_rhs(u, p, 0.0, fft);
    // convergence metric: linear operator restricted to the state's support
    return front_equilibrium_residual(u, p, K);
  };
  (void)h;

  NewtonResult res;
  Field rgrid(cell, 2);

  synthesize(z);
  double rnorm = grid_residual(rgrid);
  res.residual_history.push_back(rnorm);

  const double tol = 1e-11;
  int stall = 0;
  Eigen::MatrixXd jac(dim, dim);
  Eigen::VectorXd rhs(dim);

  for (int it = 0; it < 30 && rnorm > tol; ++it) {
    // residual in coefficient space
    auto ru = cosine_coefficients(fft, rgrid[0], K);
    auto rv = cosine_coefficients(fft, rgrid[1], K);
    for (int n = 0; n <= K; ++n) {
      rhs(n) = ru[n];
      rhs(K + 1 + n) = rv[n];
    }

    // Jacobian: linear symbols on the diagonal, reaction Jacobian as
    // multiplication operators analyzed column by column.
    const ReactionJacobian dn = front_linearization(u, p);
    std::vector<double> colgrid(P), prod(P);
    for (int blk = 0; blk < 2; ++blk) {
      for (int n = 0; n <= K; ++n) {
        for (int j = 0; j < P; ++j) colgrid[j] = std::cos(double(n) * cell.x(j));
        const int col = blk * (K + 1) + n;
        // u-row of DN * E
        for (int j = 0; j < P; ++j)
          prod[j] = (blk == 0 ? dn.j11[j] : dn.j12[j]) * colgrid[j];
        auto cu = cosine_coefficients(fft, prod, K);
        // v-row of DN * E
        for (int j = 0; j < P; ++j)
          prod[j] = (blk == 0 ? dn.j21[j] : dn.j22[j]) * colgrid[j];
        auto cv = cosine_coefficients(fft, prod, K);
        for (int m = 0; m <= K; ++m) {
          jac(m, col) = cu[m];
          jac(K + 1 + m, col) = cv[m];
        }
        // linear part is diagonal per mode
        const double n2 = double(n) * double(n);
        if (blk == 0) jac(n, col) += -n2;
        else jac(K + 1 + n, col) += -(1.0 - n2) * (1.0 - n2);
      }
    }

    Eigen::VectorXd dz = jac.partialPivLu().solve(rhs);
    z -= dz;
    synthesize(z);
    const double rnew = grid_residual(rgrid);
    res.residual_history.push_back(rnew);
    ++res.iterations;
    if (rnew >= rnorm) {
      if (++stall >= 5) break;  // divergence: 5 iterations without reduction
    } else {
      stall = 0;
    }
    rnorm = rnew;
  }

  res.pattern = u;
  res.residual_norm = rnorm;
  res.converged = rnorm <= 1e-10;
  res.u_cos_amplitude = z(1);
  res.v_cos_amplitude = z(K + 2);
  double nonconst = 0.0;
  for (int n = 1; n <= K; ++n)
    nonconst = std::max({nonconst, std::abs(z(n)), std::abs(z(K + 1 + n))});
  res.trivial_branch = res.converged && nonconst < 1e-8;
  return res;
}

NewtonResult newton_pattern(double epsilon, FrontModelParams p, BranchSign sign,
                            int points_per_cell, int cos_modes) {
  p.alpha = epsilon * epsilon;
  Field seed = turing_ansatz_field(epsilon, p, sign, points_per_cell, true);
  NewtonResult res = newton_periodic_equilibrium(seed, p, cos_modes);
  if (res.converged && !res.trivial_branch) return res;

  // continuation from smaller amplitude
  const int nsteps = 6;
  Field guess = turing_ansatz_field(epsilon / nsteps, p, sign, points_per_cell, true);
  for (int s = 1; s <= nsteps; ++s) {
    const double eps_s = epsilon * s / nsteps;
    FrontModelParams ps = p;
    ps.alpha = eps_s * eps_s;
    res = newton_periodic_equilibrium(guess, ps, cos_modes);
    if (!res.converged || res.trivial_branch) return res;
    guess = res.pattern;
  }
  return res;
}

}  // namespace frontlab
