#pragma once

#include "frontlab/model.hpp"

namespace frontlab {

struct NewtonResult {
  Field pattern;          // converged cell field on [0, 2*pi)
  bool converged = false;
  bool trivial_branch = false;  // landed on a constant solution
  double residual_norm = 0.0;   // cell L2 norm of the full right-hand side
  int iterations = 0;
  std::vector<double> residual_history;
  double v_cos_amplitude = 0.0;  // cos(x) coefficient of the v component
  double u_cos_amplitude = 0.0;
};

/// Solve 0 = L U + N(U) on [0, 2*pi) in the even-cosine Galerkin basis
/// (modes 0..cos_modes), Newton with an analytically assembled Jacobian.
/// `initial_cell` fixes the resolution; its even part seeds the iteration.
NewtonResult newton_periodic_equilibrium(const Field& initial_cell, const FrontModelParams& p,
                                         int cos_modes = 32);

/// Ansatz-seeded pattern at the given epsilon (alpha = epsilon^2), with
/// continuation from smaller epsilon when the direct solve fails.
NewtonResult newton_pattern(double epsilon, FrontModelParams p, BranchSign sign,
                            int points_per_cell = 256, int cos_modes = 32);

}  // namespace frontlab
