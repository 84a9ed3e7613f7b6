#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "frontlab/model.hpp"

namespace frontlab {

enum class Scheme { semi_implicit_euler, semi_implicit_bdf2 };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

struct StepperConfig {
  double dt = 0.01;
  Scheme scheme = Scheme::semi_implicit_euler;
  bool dealias = false;  // 2/3-rule mask on the explicit terms
};

/// Semidiscrete problem in the split form  u_t = Lambda u + N(u):
/// Lambda is constant-coefficient and diagonal in Fourier space (with an
/// optional 2x2 block coupling the first two components), N is evaluated
/// pointwise on the grid each step.
struct SplitProblem {
  int ncomp = 2;
  // diagonal symbol per component and wavenumber index (size ncomp x nh)
  std::vector<std::vector<cplx>> symbols;
  // optional 2x2 real block on components (0,1): s11,s12,s21,s22 per k
  bool pair_block = false;
  std::vector<std::array<double, 4>> block;
  std::function<void(const Field&, Field&)> explicit_rhs;
};

/// Front system; subtract_front switches to the (w, v) representation with
/// u = h + w, h the tanh front profile (removes the front's seam mismatch
/// at the periodic boundary).
SplitProblem make_front_problem(const GridSpec& g, const FrontModelParams& p,
                                double frame_speed, bool subtract_front);

SplitProblem make_pulse_problem(const GridSpec& g, const PulseModelParams& p);

/// Linearization about a frozen 2*pi-periodic pattern, laboratory frame.
/// `pattern` must live on the full grid (tiled cells).
SplitProblem make_linearized_front_problem(const GridSpec& g, const FrontModelParams& p,
                                           const Field& pattern);

/// Tile a single-cell field periodically onto a commensurate full grid.
Field tile_cell_field(const Field& cell, const GridSpec& g);

struct BlowupError : std::runtime_error {
  double last_good_time;
  explicit BlowupError(double t)
      : std::runtime_error("time step produced non-finite values"), last_good_time(t) {}
};

/// Owns the state and advances it; copyable (aux integrations fork a copy).
class Integrator {
 public:
  Integrator(Field initial, const StepperConfig& cfg, SplitProblem prob);

  void step();            // one step of cfg.dt
  void step_with(double dt);  // single semi-implicit Euler step of custom size
  /// Integer steps of dt plus one exact fractional Euler tail step.
  void advance(double duration);

  const Field& state() const { return state_; }
  Field& state() { return state_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  double dt() const { return cfg_.dt; }

 private:
  void apply_implicit(double dt, double lhs_scale, const std::vector<std::vector<cplx>>& rhs_hat,
                      Field& out);
  void check_finite();

  StepperConfig cfg_;
  SplitProblem prob_;
  Field state_;
  double time_ = 0.0;
  std::shared_ptr<Fft> fft_;
  bool have_history_ = false;
  std::vector<std::vector<cplx>> state_hat_prev_;
  std::vector<std::vector<cplx>> nonlin_hat_prev_;
  Field work_;
};

}  // namespace frontlab
