#pragma once

#include <map>

#include "frontlab/bloch.hpp"
#include "frontlab/config.hpp"
#include "frontlab/diagnostics.hpp"
#include "frontlab/newton.hpp"
#include "frontlab/stepper.hpp"

namespace frontlab {

/// A named scalar result with the fit window and residual that produced it.
struct Verdict {
  double value = 0.0;
  double residual = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool flagged = false;
  std::string note;
};

struct RunRecord {
  RunConfig config;
  std::vector<double> snap_times;
  std::vector<Field> snapshots;  // states in the evolved representation
  // perturbation snapshots in the laboratory frame (when perturbed)
  std::vector<double> vsnap_times;  // measured from the perturbation instant
  std::vector<Field> vsnaps;
  double perturb_center_lab = 0.0;
  // named time series (t, value)
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::map<std::string, Verdict> verdicts;
  bool blowup = false;
  double blowup_time = 0.0;

  double verdict(const std::string& name) const;
  bool has_verdict(const std::string& name) const { return verdicts.count(name) > 0; }
  bool grid_commensurate() const;
};

/// Dispatch on config["scenario"].
RunRecord run_scenario(const RunConfig& cfg);

/// Evolution of the front system from localized initial data; measures the
/// front speed, transient time, comoving periodicity residual, decay rates
/// toward the asymptotic states, the pattern-edge trace, and (when a
/// perturbation is configured) the shift trace and diffusive-decay
/// diagnostics against a co-evolved unperturbed reference.
RunRecord run_modulated_front(const RunConfig& cfg);

/// Case III protocol: identical machinery, verdicts focused on the
/// front-vs-pattern-edge race and the non-convergence of the periodicity
/// residual.
RunRecord run_case_iii(const RunConfig& cfg);

/// Pulse system evolved from the closed-form pulse plus a pattern seed.
RunRecord run_modulated_pulse(const RunConfig& cfg);

/// Linear evolution about the Newton pattern from a localized perturbation;
/// measures the diffusive-decay law and the width-implied diffusion
/// coefficient against the Bloch-fit value.
RunRecord run_linearized_decay(const RunConfig& cfg);

/// Recompute fit-based verdicts from a record's stored series/snapshots
/// (no re-simulation).
void analyze_record(RunRecord& rec);

// helpers shared by scenarios and the CLI --------------------------------

GridSpec grid_from_config(const RunConfig& cfg);
FrontModelParams front_params_from_config(const RunConfig& cfg);
PulseModelParams pulse_params_from_config(const RunConfig& cfg);
StepperConfig stepper_from_config(const RunConfig& cfg);

/// Comoving periodicity residual min_s ||U(t+T) - U(. - s, t)|| / ||U(t)||,
/// evaluated by integrating a copy of the state forward by exactly T.
double periodicity_residual(const Integrator& now, double period, double bracket = 2.0);

/// Resample a cell field to a different resolution by Fourier truncation.
Field resample_cell(const Field& cell, int new_points);

}  // namespace frontlab
