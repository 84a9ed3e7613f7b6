#include "frontlab/stepper.hpp"

#include <cmath>

namespace frontlab {

Scheme scheme_from_string(const std::string& s) {
  if (s == "euler" || s == "semi_implicit_euler") return Scheme::semi_implicit_euler;
  if (s == "bdf2" || s == "semi_implicit_bdf2") return Scheme::semi_implicit_bdf2;
  throw std::invalid_argument("unknown scheme: " + s);
}

std::string to_string(Scheme s) {
  return s == Scheme::semi_implicit_euler ? "euler" : "bdf2";
}

namespace {

std::vector<cplx> diffusion_symbol(const GridSpec& g, double transport, double gain,
                                   bool fourth_order) {
  const int nh = g.points / 2 + 1;
  const bool has_nyquist = (g.points % 2 == 0);
  std::vector<cplx> sym(nh);
  for (int m = 0; m < nh; ++m) {
    const double k = g.wavenumber(m);
    const double re = fourth_order ? -(1.0 - k * k) * (1.0 - k * k) + gain : -k * k + gain;
    const double ck = (has_nyquist && m == nh - 1) ? 0.0 : transport * k;
    sym[m] = cplx(re, ck);
  }
  return sym;
}

}  // namespace

SplitProblem make_front_problem(const GridSpec& g, const FrontModelParams& p,
                                double frame_speed, bool subtract_front) {
  p.validate();
  SplitProblem prob;
  prob.ncomp = 2;
  prob.symbols.push_back(diffusion_symbol(g, frame_speed, 0.0, false));
  prob.symbols.push_back(diffusion_symbol(g, frame_speed, p.alpha, true));

  if (!subtract_front) {
    prob.explicit_rhs = [p](const Field& s, Field& out) {
      const int n = s.size();
      for (int j = 0; j < n; ++j) {
        const double u = s[0][j], v = s[1][j];
        out[0][j] = 0.5 * (u - p.c0) * (1.0 - u * u) + v;
        out[1][j] = -v * v * v - p.gamma * v * p.F(u);
      }
    };
    return prob;
  }

  std::vector<double> h(g.points), base_reac(g.points), drift(g.points);
  for (int j = 0; j < g.points; ++j) {
    const double y = g.x(j);
    h[j] = front_profile(y);
    base_reac[j] = 0.5 * (h[j] - p.c0) * (1.0 - h[j] * h[j]);
    drift[j] = (frame_speed - p.c0) * front_profile_derivative(y);
  }
  prob.explicit_rhs = [p, h = std::move(h), base_reac = std::move(base_reac),
                       drift = std::move(drift)](const Field& s, Field& out) {
    const int n = s.size();
    for (int j = 0; j < n; ++j) {
      const double u = h[j] + s[0][j];
      const double v = s[1][j];
      out[0][j] = 0.5 * (u - p.c0) * (1.0 - u * u) - base_reac[j] + v + drift[j];
      out[1][j] = -v * v * v - p.gamma * v * p.F(u);
    }
  };
  return prob;
}

SplitProblem make_pulse_problem(const GridSpec& g, const PulseModelParams& p) {
  p.validate();
  SplitProblem prob;
  prob.ncomp = 3;
  const int nh = g.points / 2 + 1;
  prob.symbols.assign(2, std::vector<cplx>(nh, cplx(0.0, 0.0)));
  prob.symbols.push_back(diffusion_symbol(g, p.c0, p.alpha2, true));
  prob.pair_block = true;
  prob.block.resize(nh);
  for (int m = 0; m < nh; ++m) {
    const double k2 = g.wavenumber(m) * g.wavenumber(m);
    const double off = p.c1i * k2 + p.nu0;
    prob.block[m] = {p.alpha1 - p.alpha0 - p.c1r * k2, off, -off,
                     -(p.alpha1 + p.alpha0) - p.c1r * k2};
  }
  prob.explicit_rhs = [p](const Field& s, Field& out) {
    const int n = s.size();
    for (int j = 0; j < n; ++j) {
      const double u1 = s[0][j], u2 = s[1][j], v = s[2][j];
      const double usq = u1 * u1 + u2 * u2;
      out[0][j] = p.mu1 * v - 4.0 * usq * u2;
      out[1][j] = 4.0 * usq * u1;
      out[2][j] = -v * v * v + p.mu2 * u1 * v;
    }
  };
  return prob;
}

SplitProblem make_linearized_front_problem(const GridSpec& g, const FrontModelParams& p,
                                           const Field& pattern) {
  if (pattern.size() != g.points)
    throw std::invalid_argument("linearized problem: pattern must live on the full grid");
  SplitProblem prob;
  prob.ncomp = 2;
  prob.symbols.push_back(diffusion_symbol(g, 0.0, 0.0, false));
  prob.symbols.push_back(diffusion_symbol(g, 0.0, p.alpha, true));
  ReactionJacobian jac = front_linearization(pattern, p);
  prob.explicit_rhs = [p, jac = std::move(jac)](const Field& s, Field& out) {
    const int n = s.size();
    for (int j = 0; j < n; ++j) {
      out[0][j] = jac.j11[j] * s[0][j] + jac.j12[j] * s[1][j];
      out[1][j] = jac.j21[j] * s[0][j] + (jac.j22[j] - p.alpha) * s[1][j];
    }
  };
  return prob;
}

Field tile_cell_field(const Field& cell, const GridSpec& g) {
  g.validate(true);
  const int per_cell = g.points_per_cell();
  if (cell.size() != per_cell)
    throw std::invalid_argument("tile: cell resolution does not match the grid");
  Field out(g, cell.components());
  for (int c = 0; c < cell.components(); ++c)
    for (int j = 0; j < g.points; ++j) out[c][j] = cell[c][j % per_cell];
  return out;
}

Integrator::Integrator(Field initial, const StepperConfig& cfg, SplitProblem prob)
    : cfg_(cfg), prob_(std::move(prob)), state_(std::move(initial)),
      fft_(std::make_shared<Fft>(state_.grid.points)), work_(state_.grid, prob_.ncomp) {
  if (state_.components() != prob_.ncomp)
    throw std::invalid_argument("integrator: component count mismatch");
  if (!(cfg_.dt > 0.0)) throw std::invalid_argument("integrator: dt must be positive");
}

void Integrator::apply_implicit(double dt, double lhs_scale,
                                const std::vector<std::vector<cplx>>& rhs_hat, Field& out) {
  const int nh = fft_->spectrum_size();
  std::vector<cplx> sol(nh);
  for (int c = 0; c < prob_.ncomp; ++c) {
    if (prob_.pair_block && c < 2) continue;
    for (int m = 0; m < nh; ++m) sol[m] = rhs_hat[c][m] / (lhs_scale - dt * prob_.symbols[c][m]);
    fft_->inverse(sol, out[c]);
  }
  if (prob_.pair_block) {
    std::vector<cplx> s1(nh), s2(nh);
    for (int m = 0; m < nh; ++m) {
      const auto& b = prob_.block[m];
      const double a11 = lhs_scale - dt * b[0], a12 = -dt * b[1];
      const double a21 = -dt * b[2], a22 = lhs_scale - dt * b[3];
      const double det = a11 * a22 - a12 * a21;
      s1[m] = (a22 * rhs_hat[0][m] - a12 * rhs_hat[1][m]) / det;
      s2[m] = (a11 * rhs_hat[1][m] - a21 * rhs_hat[0][m]) / det;
    }
    fft_->inverse(s1, out[0]);
    fft_->inverse(s2, out[1]);
  }
}

void Integrator::check_finite() {
  if (!state_.all_finite()) throw BlowupError(time_);
}

void Integrator::step_with(double dt) {
  prob_.explicit_rhs(state_, work_);
  const int nh = fft_->spectrum_size();
  std::vector<std::vector<cplx>> rhs(prob_.ncomp, std::vector<cplx>(nh));
  std::vector<cplx> shat, nhat;
  for (int c = 0; c < prob_.ncomp; ++c) {
    fft_->forward(state_[c], shat);
    fft_->forward(work_[c], nhat);
    if (cfg_.dealias) {
      for (int m = 2 * nh / 3; m < nh; ++m) nhat[m] = 0.0;
    }
    for (int m = 0; m < nh; ++m) rhs[c][m] = shat[m] + dt * nhat[m];
  }
  Field prev = state_;
  apply_implicit(dt, 1.0, rhs, state_);
  time_ += dt;
  have_history_ = false;  // custom-size step breaks the BDF2 history
  if (!state_.all_finite()) {
    state_ = prev;
    time_ -= dt;
    throw BlowupError(time_);
  }
}

void Integrator::step() {
  const double dt = cfg_.dt;
  prob_.explicit_rhs(state_, work_);
  const int nh = fft_->spectrum_size();
  std::vector<std::vector<cplx>> shat(prob_.ncomp), nhat(prob_.ncomp);
  for (int c = 0; c < prob_.ncomp; ++c) {
    fft_->forward(state_[c], shat[c]);
    fft_->forward(work_[c], nhat[c]);
    if (cfg_.dealias) {
      for (int m = 2 * nh / 3; m < nh; ++m) nhat[c][m] = 0.0;
    }
  }

  std::vector<std::vector<cplx>> rhs(prob_.ncomp, std::vector<cplx>(nh));
  Field prev = state_;
  if (cfg_.scheme == Scheme::semi_implicit_bdf2 && have_history_) {
    for (int c = 0; c < prob_.ncomp; ++c)
      for (int m = 0; m < nh; ++m)
        rhs[c][m] = 2.0 * shat[c][m] - 0.5 * state_hat_prev_[c][m] +
                    dt * (2.0 * nhat[c][m] - nonlin_hat_prev_[c][m]);
    apply_implicit(dt, 1.5, rhs, state_);
  } else {
    for (int c = 0; c < prob_.ncomp; ++c)
      for (int m = 0; m < nh; ++m) rhs[c][m] = shat[c][m] + dt * nhat[c][m];
    apply_implicit(dt, 1.0, rhs, state_);
  }
  state_hat_prev_ = std::move(shat);
  nonlin_hat_prev_ = std::move(nhat);
  have_history_ = true;
  time_ += dt;
  if (!state_.all_finite()) {
    state_ = prev;
    time_ -= dt;
    throw BlowupError(time_);
  }
}

void Integrator::advance(double duration) {
  if (duration <= 0.0) return;
  const double target = time_ + duration;
  const long nsteps = static_cast<long>(std::floor(duration / cfg_.dt + 1e-9));
  for (long i = 0; i < nsteps; ++i) step();
  const double rem = target - time_;
  if (rem > 1e-12) step_with(rem);
  time_ = target;
}

}  // namespace frontlab
