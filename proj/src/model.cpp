#include "frontlab/model.hpp"

#include <cmath>

namespace frontlab {

CouplingCase coupling_from_string(const std::string& s) {
  if (s == "I" || s == "i" || s == "1") return CouplingCase::I;
  if (s == "II" || s == "ii" || s == "2") return CouplingCase::II;
  if (s == "III" || s == "iii" || s == "3") return CouplingCase::III;
  throw std::invalid_argument("unknown coupling case: " + s);
}

std::string to_string(CouplingCase c) {
  switch (c) {
    case CouplingCase::I: return "I";
    case CouplingCase::II: return "II";
    default: return "III";
  }
}

double FrontModelParams::epsilon() const {
  if (alpha < 0.0) throw std::domain_error("epsilon undefined for alpha < 0");
  return std::sqrt(alpha);
}

void FrontModelParams::validate() const {
  if (!(c0 > 0.0 && c0 < 1.0)) throw std::invalid_argument("front model: need 0 < c0 < 1");
  if (gamma < 0.0) throw std::invalid_argument("front model: need gamma >= 0");
}

double FrontModelParams::F(double u) const {
  switch (coupling_case) {
    case CouplingCase::I: return 1.0 - u * u;
    case CouplingCase::II: return 1.0 - u;
    default: return 1.0 + u;
  }
}

double FrontModelParams::dF(double u) const {
  switch (coupling_case) {
    case CouplingCase::I: return -2.0 * u;
    case CouplingCase::II: return -1.0;
    default: return 1.0;
  }
}

double PulseModelParams::epsilon() const {
  if (alpha2 < 0.0) throw std::domain_error("epsilon undefined for alpha2 < 0");
  return std::sqrt(alpha2);
}

void PulseModelParams::validate() const {
  if (!(nu0 > alpha1 && alpha1 > 0.0))
    throw std::invalid_argument("pulse model: need nu0 > alpha1 > 0");
  if (c1r < 0.0) throw std::invalid_argument("pulse model: need c1r >= 0");
}

// ---------------------------------------------------------------------------
// Front system
// ---------------------------------------------------------------------------

namespace {
void check_resolution(const GridSpec& g) {
  if (g.spacing() > 0.125)
    throw std::invalid_argument("grid too coarse: fewer than 8 points per unit length");
}
}  // namespace

Field front_rhs(const Field& state, const FrontModelParams& p, double frame_speed,
                const Fft& fft) {
  if (state.components() != 2) throw std::invalid_argument("front state must have 2 components");
  check_resolution(state.grid);
  if (frame_speed < 0.0) throw std::invalid_argument("frame_speed must be >= 0");

  const GridSpec& g = state.grid;
  const int n = g.points;
  Field out(g, 2);

  std::vector<cplx> cu, cv;
  fft.forward(state[0], cu);
  fft.forward(state[1], cv);
  const int nh = fft.spectrum_size();
  const bool has_nyquist = (n % 2 == 0);
  for (int m = 0; m < nh; ++m) {
    const double k = g.wavenumber(m);
    // the unpaired Nyquist mode carries no odd-derivative (transport) part
    const double ck = (has_nyquist && m == nh - 1) ? 0.0 : frame_speed * k;
    const cplx transport(0.0, ck);
    cu[m] *= -k * k + transport;
    const double q = 1.0 - k * k;
    cv[m] *= -q * q + transport;
  }
  fft.inverse(cu, out[0]);
  fft.inverse(cv, out[1]);

  for (int j = 0; j < n; ++j) {
    const double u = state[0][j];
    const double v = state[1][j];
    out[0][j] += 0.5 * (u - p.c0) * (1.0 - u * u) + v;
    out[1][j] += p.alpha * v - v * v * v - p.gamma * v * p.F(u);
  }
  return out;
}

Field front_rhs(const Field& state, const FrontModelParams& p, double frame_speed) {
  Fft fft(state.grid.points);
  return front_rhs(state, p, frame_speed, fft);
}

ReactionJacobian front_linearization(const Field& base, const FrontModelParams& p) {
  if (base.components() != 2) throw std::invalid_argument("front state must have 2 components");
  const int n = base.size();
  ReactionJacobian jac;
  jac.j11.resize(n);
  jac.j12.assign(n, 1.0);
  jac.j21.resize(n);
  jac.j22.resize(n);
  for (int j = 0; j < n; ++j) {
    const double u = base[0][j];
    const double v = base[1][j];
    jac.j11[j] = 0.5 * (1.0 + 2.0 * p.c0 * u - 3.0 * u * u);
    jac.j21[j] = -p.gamma * v * p.dF(u);
    jac.j22[j] = p.alpha - 3.0 * v * v - p.gamma * p.F(u);
  }
  return jac;
}

double front_profile(double y) { return std::tanh(0.5 * y); }

double front_profile_derivative(double y) {
  const double h = front_profile(y);
  return 0.5 * (1.0 - h * h);
}

void exact_front(double y, double out[2]) {
  out[0] = front_profile(y);
  out[1] = 0.0;
}

double front_ode_residual(double y, double c0) {
  const double h = front_profile(y);
  const double hp = 0.5 * (1.0 - h * h);
  const double hpp = -h * hp;
  return hpp + c0 * hp + 0.5 * (h - c0) * (1.0 - h * h);
}

double front_equilibrium_residual(const Field& cell, const FrontModelParams& p, int mode_cap) {
  if (cell.components() != 2) throw std::invalid_argument("front state must have 2 components");
  const GridSpec& g = cell.grid;
  if (std::abs(g.length() - kTwoPi) > 1e-9)
    throw std::invalid_argument("equilibrium residual: expected one 2*pi cell");
  Fft fft(g.points);
  std::vector<cplx> cu, cv;
  fft.forward(cell[0], cu);
  fft.forward(cell[1], cv);
  const int nh = fft.spectrum_size();
  for (int m = 0; m < nh; ++m) {
    if (m > mode_cap) {
      cu[m] = cv[m] = 0.0;
      continue;
    }
    const double k = g.wavenumber(m);
    const double q = 1.0 - k * k;
    cu[m] *= -k * k;
    cv[m] *= -q * q;
  }
  Field lin(g, 2);
  fft.inverse(cu, lin[0]);
  fft.inverse(cv, lin[1]);
  double s = 0.0;
  for (int j = 0; j < g.points; ++j) {
    const double u = cell[0][j], v = cell[1][j];
    const double ru = lin[0][j] + 0.5 * (u - p.c0) * (1.0 - u * u) + v;
    const double rv = lin[1][j] + p.alpha * v - v * v * v - p.gamma * v * p.F(u);
    s += ru * ru + rv * rv;
  }
  return std::sqrt(s * g.spacing());
}

TuringCoefficients turing_coefficients(const FrontModelParams& p, BranchSign sign) {
  p.validate();
  const double s = (sign == BranchSign::minus) ? p.c0 : -p.c0;
  const double al = p.alpha;
  if (!(al > -(1.0 + s)))
    throw std::invalid_argument("turing coefficients require alpha > -(1 + c0) on this branch");
  if (!(1.0 + s + 2.0 * al > 0.0) || !(1.0 + al > 0.0))
    throw std::invalid_argument("turing coefficients: degenerate response denominator");

  TuringCoefficients t{};
  t.A = 1.0 / (2.0 + s + al);
  t.b = -p.gamma * t.A / (9.0 + al);
  t.d_res = -p.gamma * t.A / (1.0 + al);
  const double quad = 0.25 * (3.0 + s) * t.A * t.A;
  t.B = (t.b + quad) / (5.0 + s + 2.0 * al);
  t.D = (t.d_res + quad) / (1.0 + s + 2.0 * al);
  t.a = 0.75 + p.gamma * (t.B + 2.0 * t.D + t.A * (t.b + 2.0 * t.d_res) - 0.75 * t.A * t.A);
  if (al > 0.0 && t.a > 0.0) {
    const double r = std::sqrt(al) / std::sqrt(t.a);
    t.r_plus = r;
    t.r_minus = -r;
  } else {
    t.r_plus = t.r_minus = 0.0;
  }
  return t;
}

void TuringAnsatz::evaluate(double x, double out[2]) const {
  const double c1 = std::cos(x), c2 = std::cos(2.0 * x);
  out[0] = base + u_amp * c1 + u_cos2 * c2 + u_mean;
  out[1] = v_amp * c1 + v_cos2 * c2 + v_mean;
}

TuringAnsatz turing_ansatz(double epsilon, const FrontModelParams& p, BranchSign sign,
                           bool second_order) {
  if (epsilon < 0.0) throw std::invalid_argument("turing ansatz: epsilon must be >= 0");
  const TuringCoefficients t = turing_coefficients(p, sign);
  if (!t.supercritical())
    throw std::domain_error("turing ansatz: subcritical/degenerate branch (a <= 0)");
  const double r = epsilon * t.amplitude_factor();

  TuringAnsatz out{};
  out.v_amp = r;
  out.u_amp = r * t.A;
  if (sign == BranchSign::minus) {
    out.base = -1.0;
    if (second_order) {
      out.u_cos2 = r * r * t.B;
      out.u_mean = r * r * t.D;
      out.v_cos2 = r * r * t.b;
      out.v_mean = r * r * t.d_res;
    }
  } else {
    out.base = 1.0;
    if (second_order) {
      out.u_cos2 = -r * r * t.B;
      out.u_mean = -r * r * t.D;
      out.v_cos2 = -r * r * t.b;
      out.v_mean = -r * r * t.d_res;
    }
  }
  return out;
}

Field turing_ansatz_field(double epsilon, const FrontModelParams& p, BranchSign sign,
                          int points_per_cell, bool second_order) {
  GridSpec cell = cell_grid(points_per_cell);
  Field out(cell, 2);
  const TuringAnsatz ans = turing_ansatz(epsilon, p, sign, second_order);
  double val[2];
  for (int j = 0; j < points_per_cell; ++j) {
    ans.evaluate(cell.x(j), val);
    out[0][j] = val[0];
    out[1][j] = val[1];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pulse system
// ---------------------------------------------------------------------------

Field pulse_rhs(const Field& state, const PulseModelParams& p, const Fft& fft) {
  if (state.components() != 3) throw std::invalid_argument("pulse state must have 3 components");
  check_resolution(state.grid);
  p.validate();

  const GridSpec& g = state.grid;
  const int n = g.points;
  Field out(g, 3);

  std::vector<cplx> c1h, c2h, cvh;
  fft.forward(state[0], c1h);
  fft.forward(state[1], c2h);
  fft.forward(state[2], cvh);
  const int nh = fft.spectrum_size();
  const bool has_nyquist = (n % 2 == 0);
  std::vector<cplx> r1(nh), r2(nh);
  for (int m = 0; m < nh; ++m) {
    const double k = g.wavenumber(m);
    const double k2 = k * k;
    // 2x2 constant-coefficient block of the amplitude pair
    const double s11 = p.alpha1 - p.alpha0 - p.c1r * k2;
    const double s12 = p.c1i * k2 + p.nu0;
    const double s21 = -(p.c1i * k2 + p.nu0);
    const double s22 = -(p.alpha1 + p.alpha0) - p.c1r * k2;
    r1[m] = s11 * c1h[m] + s12 * c2h[m];
    r2[m] = s21 * c1h[m] + s22 * c2h[m];
    const double q = 1.0 - k2;
    const double ck = (has_nyquist && m == nh - 1) ? 0.0 : p.c0 * k;
    cvh[m] *= -q * q + cplx(0.0, ck);
  }
  fft.inverse(r1, out[0]);
  fft.inverse(r2, out[1]);
  fft.inverse(cvh, out[2]);

  for (int j = 0; j < n; ++j) {
    const double u1 = state[0][j];
    const double u2 = state[1][j];
    const double v = state[2][j];
    const double usq = u1 * u1 + u2 * u2;
    out[0][j] += p.mu1 * v - 4.0 * usq * u2;
    out[1][j] += 4.0 * usq * u1;
    out[2][j] += p.alpha2 * v - v * v * v + p.mu2 * u1 * v;
  }
  return out;
}

Field pulse_rhs(const Field& state, const PulseModelParams& p) {
  Fft fft(state.grid.points);
  return pulse_rhs(state, p, fft);
}

PulseShape exact_pulse_shape(const PulseModelParams& p) {
  p.validate();
  const double ratio = p.alpha0 / p.alpha1;
  if (std::abs(ratio) > 1.0)
    throw std::domain_error("exact pulse: requires |alpha0/alpha1| <= 1");
  if (p.c1i == 0.0) throw std::domain_error("exact pulse: requires c1i != 0");
  PulseShape s{};
  s.theta = 0.5 * std::acos(ratio);  // sin(2 theta) >= 0 on this branch
  const double sin2t = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
  s.b2 = (p.nu0 + p.alpha1 * sin2t) / p.c1i;
  if (s.b2 <= 0.0) throw std::domain_error("exact pulse: no pulse for these parameters (b2 <= 0)");
  s.b1 = 0.5 * p.c1i * s.b2;
  return s;
}

std::complex<double> exact_pulse(double x, const PulseModelParams& p) {
  const PulseShape s = exact_pulse_shape(p);
  const double sech = 1.0 / std::cosh(std::sqrt(s.b2) * x);
  return std::sqrt(s.b1) * sech * std::polar(1.0, s.theta);
}

std::complex<double> exact_pulse_residual(double x, const PulseModelParams& p) {
  const PulseShape s = exact_pulse_shape(p);
  const double sech = 1.0 / std::cosh(std::sqrt(s.b2) * x);
  const cplx phase = std::polar(1.0, s.theta);
  const cplx A = std::sqrt(s.b1) * sech * phase;
  // sech'' = sech - 2 sech^3 gives the analytic second derivative
  const cplx Axx = s.b2 * std::sqrt(s.b1) * (sech - 2.0 * sech * sech * sech) * phase;
  const cplx c1(p.c1r, p.c1i);
  const cplx linear(-p.alpha0, -p.nu0);
  return c1 * Axx + linear * A + p.alpha1 * std::conj(A) +
         cplx(0.0, 4.0) * std::norm(A) * A;
}

}  // namespace frontlab
