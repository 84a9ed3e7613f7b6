#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

#include "frontlab/fft.hpp"
#include "frontlab/grid.hpp"

namespace frontlab {

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

/// Coupling term selector for the front system: the v-equation carries
/// -gamma*v*F(u) with F as below.
enum class CouplingCase { I, II, III };  // F(u) = 1-u^2, 1-u, 1+u

CouplingCase coupling_from_string(const std::string& s);
std::string to_string(CouplingCase c);

struct FrontModelParams {
  double c0 = 0.5;       // dimensionless front speed, 0 < c0 < 1
  double gamma = 0.5;    // coupling strength >= 0
  double alpha = 0.0;    // bifurcation parameter (alpha = eps^2 past onset)
  CouplingCase coupling_case = CouplingCase::I;

  double epsilon() const;  // sqrt(alpha), requires alpha >= 0
  void validate() const;

  double F(double u) const;   // coupling function
  double dF(double u) const;  // its derivative
};

struct PulseModelParams {
  double alpha0 = 0.6;
  double alpha1 = 0.8;
  double nu0 = 1.0;
  double c1r = 0.1;      // Re of the complex diffusion coefficient
  double c1i = 10.0;     // Im of the complex diffusion coefficient
  double c0 = 1.0;       // comoving frame speed
  double mu1 = 1.0;      // linear coupling v -> u1
  double mu2 = -1.0;     // nonlinear coupling u1*v in the v-equation
  double alpha2 = 0.0025;  // bifurcation parameter of the pattern equation

  double epsilon() const;
  void validate() const;
};

/// Closed-form bifurcation coefficients of the 2*pi-periodic branch, all
/// evaluated from the model parameters.  The quadratic-response coefficient
/// that the derivation calls d is stored as d_res to keep it apart from the
/// diffusion coefficient of the pattern's critical Bloch branch.
struct TuringCoefficients {
  double A;        // u/v amplitude ratio of the critical mode, 1/(2+c0+alpha)
  double b;        // cos(2x) response, v component
  double d_res;    // mean response, v component
  double B;        // cos(2x) response, u component
  double D;        // mean response, u component
  double a;        // cubic Landau coefficient; a > 0 means supercritical
  double r_plus;   // equilibrium amplitude +eps/sqrt(a) (0 when alpha <= 0)
  double r_minus;  // equilibrium amplitude -eps/sqrt(a)

  bool supercritical() const { return a > 0.0; }
  /// Leading-order v amplitude per unit eps (the branch amplitude factor).
  double amplitude_factor() const { return 1.0 / std::sqrt(a); }
};

enum class BranchSign { plus, minus };

// ---------------------------------------------------------------------------
// Front system (Chaffee-Infante u coupled to Swift-Hohenberg v)
// ---------------------------------------------------------------------------

/// Semidiscrete time derivative in a frame moving with frame_speed:
///   u_t = u_yy + c_f u_y + (u - c0)(1 - u^2)/2 + v
///   v_t = -(1 + d_yy)^2 v + c_f v_y + alpha v - v^3 - gamma v F(u).
/// frame_speed = 0 recovers the laboratory frame.
Field front_rhs(const Field& state, const FrontModelParams& p, double frame_speed,
                const Fft& fft);

/// Owns its transform workspace; convenience overload.
Field front_rhs(const Field& state, const FrontModelParams& p, double frame_speed);

/// Pointwise 2x2 Jacobian of the reaction terms at the given base state.
/// Entries: j11 = (1 + 2 c0 u - 3 u^2)/2, j12 = 1,
///          j21 = -gamma v F'(u),          j22 = alpha - 3 v^2 - gamma F(u).
struct ReactionJacobian {
  std::vector<double> j11, j12, j21, j22;
};
ReactionJacobian front_linearization(const Field& base, const FrontModelParams& p);

/// The traveling-front profile (tanh(y/2), 0); exact steady state of the
/// comoving system for every c0.
void exact_front(double y, double out[2]);
double front_profile(double y);               // tanh(y/2)
double front_profile_derivative(double y);    // (1 - h^2)/2, algebraic identity

/// Residual of the front ODE h'' + c0 h' + (h - c0)(1 - h^2)/2 evaluated with
/// the algebraic derivative identities (vanishes identically).
double front_ode_residual(double y, double c0);

/// Cell L2 norm of the equilibrium residual L U + N(U) of a 2*pi-periodic
/// state, with the linear operator applied on Fourier modes |n| <= mode_cap
/// (the state's own support; keeps the fourth-order symbol from amplifying
/// rounding noise in empty high modes).
double front_equilibrium_residual(const Field& cell, const FrontModelParams& p, int mode_cap);

/// Closed-form bifurcation coefficients; sign selects the branch around
/// (+1,0) or (-1,0) via the c0 -> -c0 symmetry.  Requires alpha > -(1+c0).
/// The closed forms are those of the quadratic coupling at the (-1,0) state
/// (the derivation's setting); they are exact for CouplingCase::I.
TuringCoefficients turing_coefficients(const FrontModelParams& p, BranchSign sign);

/// Leading-order periodic pattern on [0, 2*pi); with second_order, the
/// quadratic response (B, D, b, d_res) is included.
struct TuringAnsatz {
  double base;       // +-1
  double u_amp;      // coefficient of cos x in u
  double v_amp;      // coefficient of cos x in v
  double u_cos2, u_mean, v_cos2, v_mean;  // second-order terms (0 at leading order)

  void evaluate(double x, double out[2]) const;
};
TuringAnsatz turing_ansatz(double epsilon, const FrontModelParams& p, BranchSign sign,
                           bool second_order = false);

/// Sample the ansatz on a cell grid with points_per_cell points over [0, 2*pi).
Field turing_ansatz_field(double epsilon, const FrontModelParams& p, BranchSign sign,
                          int points_per_cell, bool second_order = false);

// ---------------------------------------------------------------------------
// Pulse system (non-symmetric Ginzburg-Landau coupled to Swift-Hohenberg)
// ---------------------------------------------------------------------------

/// Semidiscrete time derivative of the 3-component pulse system in the frame
/// moving with p.c0 (the frame in which the pulse is steady):
///   u1_t = (a1-a0) u1 + c1r u1'' - c1i u2'' + nu0 u2 + mu1 v - 4|u|^2 u2
///   u2_t = c1i u1'' - nu0 u1 - (a1+a0) u2 + c1r u2'' + 4|u|^2 u1
///   v_t  = -(1 + d_xx)^2 v + c0 v_x + alpha2 v - v^3 + mu2 u1 v.
Field pulse_rhs(const Field& state, const PulseModelParams& p, const Fft& fft);
Field pulse_rhs(const Field& state, const PulseModelParams& p);

/// Closed-form sech pulse of the uncoupled amplitude equation (exact for
/// c1r = 0): A(x) = sqrt(b1) sech(sqrt(b2) x) exp(i theta).
struct PulseShape {
  double b1;
  double b2;
  double theta;  // in (0, pi/2), chosen with sin(2 theta) >= 0
};
PulseShape exact_pulse_shape(const PulseModelParams& p);
std::complex<double> exact_pulse(double x, const PulseModelParams& p);

/// Pointwise residual of the amplitude equation at the closed-form pulse,
/// using the analytic second derivative (zero up to rounding when c1r = 0).
std::complex<double> exact_pulse_residual(double x, const PulseModelParams& p);

}  // namespace frontlab
