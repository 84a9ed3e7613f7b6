#pragma once

#include <optional>

#include "frontlab/fft.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/optimize.hpp"

namespace frontlab {

// ---------------------------------------------------------------------------
// Translation tracking
// ---------------------------------------------------------------------------

struct ShiftResult {
  double shift = 0.0;        // s maximizing int u(x) ref(x - s) dx
  double peak = 0.0;
  double second_peak_ratio = 0.0;  // next local max away from the peak
  bool ambiguous = false;          // secondary peak within 5%
};

/// Sub-grid cross-correlation shift via the band-limited correlation
/// function (grid argmax, then Newton on its derivative).
ShiftResult correlation_shift(const Fft& fft, const GridSpec& g,
                              const std::vector<double>& u, const std::vector<double>& ref);

/// Unwrap a periodic position sequence (period 2L) into a continuous one.
std::vector<double> unwrap_periodic(const std::vector<double>& s, double period);

/// Front interface position: correlation of the u component against the
/// profile derivative bump (localized, periodic-safe).
double locate_front(const Fft& fft, const GridSpec& g, const std::vector<double>& u);

struct SpeedFit {
  double c = 0.0;
  double rms_residual = 0.0;
  bool ambiguous = false;
};

/// Least-squares speed from snapshot times and unwrapped shifts.
SpeedFit measure_front_speed(const std::vector<double>& times, const std::vector<double>& shifts);

// ---------------------------------------------------------------------------
// Spatial decay rates towards the asymptotic patterns
// ---------------------------------------------------------------------------

struct CellDistanceProfile {
  std::vector<double> centers;    // cell center coordinates
  std::vector<double> distances;  // per-cell L2 distance to the aligned reference
  double phase = 0.0;             // optimal reference shift at the window center
  double phase_slope = 0.0;       // wavenumber offset absorbed by the alignment
  double phase_center = 0.0;      // coordinate the affine phase is anchored at
};

/// Per-cell L2 distance of a (u, v) field to a 2*pi-periodic reference,
/// phase-aligned over the given index window [cell_lo, cell_hi).  With
/// affine_phase the alignment also absorbs a small uniform wavenumber
/// offset (periodic domains quantize the total phase winding, which shows
/// up as a linear phase drift against the exact-period reference).
CellDistanceProfile cell_distance_profile(const Field& state, const Field& cell_ref,
                                          int cell_lo, int cell_hi, bool affine_phase = false);

struct DecayRateFit {
  double rate = 0.0;           // exponential rate of the distance profile
  double rel_residual = 0.0;   // rms residual / log-range
  int cells_used = 0;
  bool flagged = false;
  std::string note;
};

/// Log-linear fit of the contiguous decay segment adjacent to the signal
/// end of the window (`from_high_end` selects which end carries the front);
/// the far-field floor is estimated from the window minimum and removed in
/// quadrature, so rates keep their meaning above finite-domain mismatch.
DecayRateFit fit_decay_rate(const CellDistanceProfile& prof, double xi_lo, double xi_hi,
                            bool from_high_end, double floor_abs = 1e-9);

struct DecayRates {
  DecayRateFit ahead;
  DecayRateFit behind;
  double front_position = 0.0;
};

/// Decay rates of a converged modulated-front snapshot toward the pattern
/// ahead and the pattern (or constant state) behind.  `state` must be in the
/// direct (u, v) representation on a cell-commensurate grid.
DecayRates measure_decay_rates(const Field& state, const Field& ahead_ref,
                               const Field& behind_ref, double front_position,
                               double interior_frac = 0.8, double margin = 10.0);

// ---------------------------------------------------------------------------
// Shift trace q(t) against a reference run
// ---------------------------------------------------------------------------

struct ShiftTrace {
  std::vector<double> times;
  std::vector<double> q;
  double q_star = 0.0;
  double nu_fit = 0.0;         // exponential convergence rate of |q - q*|
  double fit_residual = 0.0;   // relative rms of the exponential fit
  bool flagged = false;
  std::string note;
};

/// min over s of ||A - B(. - s)|| (all components), via the combined
/// band-limited correlation; |s| <= bracket.
double min_shift_distance(const Fft& fft, const Field& a, const Field& b, double bracket);

/// Exponential-approach fit of an already measured q(t) series.
ShiftTrace fit_shift_trace(const std::vector<double>& times, const std::vector<double>& q);

/// q(t) = argmin_q || (U(t) - ref(t)(. - q)) e^{beta xi} || over the
/// front-localized window xi in [xi_min_offset, interior], xi measured from
/// the reference front position.
double measure_shift_once(const Fft& fft, const Field& state, const Field& reference,
                          double beta, double ref_front_pos, double xi_min_offset = -10.0,
                          double interior_frac = 0.8, double bracket = 2.0);

/// Variant with a caller-supplied shifted-reference provider (used when the
/// reference must be translated analytically rather than spectrally).
double measure_shift_once(const Fft& fft, const Field& state,
                          const std::function<Field(double)>& shifted_reference, double beta,
                          double ref_front_pos, double xi_min_offset = -10.0,
                          double interior_frac = 0.8, double bracket = 2.0);

ShiftTrace measure_shift(const std::vector<double>& times, const std::vector<Field>& states,
                         const std::vector<Field>& references, double beta,
                         const std::vector<double>& ref_front_positions,
                         double xi_min_offset = -10.0, double interior_frac = 0.8);

// ---------------------------------------------------------------------------
// Diffusive decay of localized perturbations
// ---------------------------------------------------------------------------

struct EnvelopeProfile {
  std::vector<double> centers;
  std::vector<double> values;  // per-cell L2 norm of the perturbation
};
EnvelopeProfile cell_envelope(const Field& v);

struct DiffusiveDecay {
  double slope = 0.0;            // log sup|V| vs log t
  double slope_residual = 0.0;
  double collapse_error = 0.0;   // self-similar profile mismatch, t vs 4t
  double d_gaussian = 0.0;       // width-implied diffusion coefficient
  double d_gaussian_residual = 0.0;
  bool boundary_flag = false;
  std::string note;
};

/// All decay diagnostics from perturbation snapshots in the laboratory
/// frame.  `center` is the initial perturbation site; slope is fitted over
/// [t_lo, t_hi]; the collapse pair is (t_pair, 4 t_pair).
DiffusiveDecay measure_diffusive_decay(const std::vector<double>& times,
                                       const std::vector<Field>& v_snapshots,
                                       double center, double t_lo, double t_hi,
                                       double t_pair, double interior_frac = 0.8);

}  // namespace frontlab
