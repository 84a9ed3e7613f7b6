#include "frontlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "frontlab/model.hpp"

namespace frontlab {

namespace {

/// Band-limited correlation C(s) = int u(x) ref(x - s) dx and derivatives,
/// from the half-spectrum product p_n = u_n conj(ref_n).
struct Correlator {
  const GridSpec& g;
  std::vector<cplx> p;  // Nyquist zeroed

  double eval(double s, int deriv) const {
    double acc = (deriv == 0) ? p[0].real() : 0.0;
    const int nh = static_cast<int>(p.size());
    for (int n = 1; n < nh; ++n) {
      const double k = g.wavenumber(n);
      cplx term = p[n] * std::polar(1.0, k * s);
      for (int d = 0; d < deriv; ++d) term *= cplx(0.0, k);
      acc += 2.0 * term.real();
    }
    return acc * g.length();
  }
};

}  // namespace

ShiftResult correlation_shift(const Fft& fft, const GridSpec& g,
                              const std::vector<double>& u, const std::vector<double>& ref) {
  std::vector<cplx> uh, rh;
  fft.forward(u, uh);
  fft.forward(ref, rh);
  const int nh = fft.spectrum_size();
  Correlator corr{g, std::vector<cplx>(nh)};
  for (int n = 0; n < nh; ++n) corr.p[n] = uh[n] * std::conj(rh[n]);
  if (g.points % 2 == 0) corr.p[nh - 1] = 0.0;

  // grid evaluation of C
  std::vector<cplx> spec = corr.p;
  for (auto& z : spec) z *= g.length();
  std::vector<double> cgrid;
  fft.inverse(spec, cgrid);

  int jmax = 0;
  for (int j = 1; j < g.points; ++j)
    if (cgrid[j] > cgrid[jmax]) jmax = j;

  // sub-grid refinement: quadratic seed, then Newton on C'(s).
  // Grid slot j of the correlation corresponds to the shift s = j*h
  // (FFT index phase), wrapped into (-L, L].
  const double h = g.spacing();
  const double cm = cgrid[(jmax - 1 + g.points) % g.points];
  const double cp = cgrid[(jmax + 1) % g.points];
  const double denom = cm - 2.0 * cgrid[jmax] + cp;
  double s = jmax * h;
  if (s > g.half_length) s -= g.length();
  if (denom < 0.0) s += 0.5 * h * (cm - cp) / denom;
  for (int it = 0; it < 12; ++it) {
    const double d1 = corr.eval(s, 1);
    const double d2 = corr.eval(s, 2);
    if (d2 >= 0.0 || !std::isfinite(d1)) break;
    const double step = d1 / d2;
    s -= step;
    if (std::abs(step) < 1e-13) break;
  }

  ShiftResult res;
  res.shift = s;
  res.peak = corr.eval(s, 0);

  // secondary peak: best grid value at circular distance > 2*pi from the peak
  double second = -1e300;
  for (int j = 0; j < g.points; ++j) {
    double sj = j * h;
    if (sj > g.half_length) sj -= g.length();
    double d = std::abs(sj - s);
    d = std::min(d, g.length() - d);
    if (d > kTwoPi && cgrid[j] > second) second = cgrid[j];
  }
  if (second > -1e299 && res.peak != 0.0) {
    res.second_peak_ratio = second / res.peak;
    res.ambiguous = res.second_peak_ratio > 0.95;
  }
  return res;
}

std::vector<double> unwrap_periodic(const std::vector<double>& s, double period) {
  std::vector<double> out = s;
  for (size_t i = 1; i < out.size(); ++i) {
    double d = s[i] - s[i - 1];
    d -= period * std::round(d / period);
    out[i] = out[i - 1] + d;
  }
  return out;
}

double locate_front(const Fft& fft, const GridSpec& g, const std::vector<double>& u) {
  std::vector<double> du = spectral_derivative(fft, g, u, 1);
  std::vector<double> bump(g.points);
  for (int j = 0; j < g.points; ++j) bump[j] = front_profile_derivative(g.x(j));
  return correlation_shift(fft, g, du, bump).shift;
}

SpeedFit measure_front_speed(const std::vector<double>& times, const std::vector<double>& shifts) {
  if (times.size() < 2 || times.size() != shifts.size())
    throw std::invalid_argument("speed fit needs matching times and shifts (>= 2)");
  LineFit f = fit_line(times, shifts);
  SpeedFit out;
  out.c = f.slope;
  out.rms_residual = f.rms_residual;
  return out;
}

// ---------------------------------------------------------------------------
// Decay rates
// ---------------------------------------------------------------------------

CellDistanceProfile cell_distance_profile(const Field& state, const Field& cell_ref,
                                          int cell_lo, int cell_hi, bool affine_phase) {
  state.grid.validate(true);
  const int M = state.grid.cell_count();
  const int P = state.grid.points_per_cell();
  if (cell_ref.size() != P)
    throw std::invalid_argument("cell reference resolution mismatch");
  cell_lo = std::max(cell_lo, 0);
  cell_hi = std::min(cell_hi, M);
  if (cell_hi <= cell_lo)
    throw std::invalid_argument("cell distance: empty alignment window");

  Fft cell_fft(P);
  const double h = state.grid.spacing();
  const int nh = P / 2 + 1;

  // Coefficient-space setup: per cell j,
  //   d_j^2(phi) = ||s_j||^2 + ||ref||^2 - 2*2pi*[x0 + 2 sum Re(cross e^{-in phi})]
  // where cross_{j,n} = sum_c shat conj(rhat).
  std::vector<std::vector<cplx>> cross(M, std::vector<cplx>(nh, cplx(0.0, 0.0)));
  std::vector<double> snorm(M, 0.0);
  double rnorm = 0.0;
  {
    std::vector<cplx> sh, rh;
    std::vector<double> buf(P);
    std::vector<std::vector<cplx>> rhat(2);
    for (int c = 0; c < 2; ++c) {
      cell_fft.forward(cell_ref[c], rhat[c]);
      for (int p = 0; p < P; ++p) rnorm += cell_ref[c][p] * cell_ref[c][p];
    }
    rnorm *= h;
    for (int j = 0; j < M; ++j) {
      for (int c = 0; c < 2; ++c) {
        for (int p = 0; p < P; ++p) {
          buf[p] = state[c][j * P + p];
          snorm[j] += buf[p] * buf[p];
        }
        cell_fft.forward(buf, sh);
        for (int n = 0; n < nh; ++n) cross[j][n] += sh[n] * std::conj(rhat[c][n]);
      }
      snorm[j] *= h;
    }
  }
  auto dist2 = [&](int j, double phi) {
    // reference shifted to ref(x + phi)
    double corr = cross[j][0].real();
    for (int n = 1; n < nh; ++n)
      corr += 2.0 * (cross[j][n] * std::polar(1.0, -double(n) * phi)).real();
    return std::max(0.0, snorm[j] + rnorm - 2.0 * kTwoPi * corr);
  };

  const double xi_mid = state.grid.x(((cell_lo + cell_hi) / 2) * P) + kPi;
  auto window_obj = [&](double x0, double k1) {
    double s = 0.0;
    for (int j = cell_lo; j < cell_hi; ++j) {
      const double xi = state.grid.x(j * P) + kPi;
      s += dist2(j, x0 + k1 * (xi - xi_mid));
    }
    return s;
  };

  // coarse scan then golden refinement of the base phase
  double x0 = 0.0, best_val = 1e300;
  const int scan = 64;
  for (int i = 0; i < scan; ++i) {
    const double ph = kTwoPi * i / scan;
    const double v = window_obj(ph, 0.0);
    if (v < best_val) {
      best_val = v;
      x0 = ph;
    }
  }
  auto [p0, v0] = golden_min([&](double ph) { return window_obj(ph, 0.0); },
                             x0 - kTwoPi / scan, x0 + kTwoPi / scan, 1e-10);
  x0 = p0;
  (void)v0;

  double k1 = 0.0;
  if (affine_phase) {
    for (int round = 0; round < 3; ++round) {
      auto [kk, vk] = golden_min([&](double k) { return window_obj(x0, k); }, k1 - 0.02,
                                 k1 + 0.02, 1e-9);
      k1 = kk;
      (void)vk;
      auto [xx, vx] = golden_min([&](double ph) { return window_obj(ph, k1); }, x0 - 0.5,
                                 x0 + 0.5, 1e-10);
      x0 = xx;
      (void)vx;
    }
  }

  CellDistanceProfile prof;
  prof.phase = x0;
  prof.phase_slope = k1;
  prof.phase_center = xi_mid;
  for (int j = 0; j < M; ++j) {
    const double xi = state.grid.x(j * P) + kPi;
    prof.centers.push_back(xi);
    prof.distances.push_back(std::sqrt(dist2(j, x0 + k1 * (xi - xi_mid))));
  }
  return prof;
}

DecayRateFit fit_decay_rate(const CellDistanceProfile& prof, double xi_lo, double xi_hi,
                            bool from_high_end, double floor_abs) {
  std::vector<size_t> idx;
  for (size_t j = 0; j < prof.centers.size(); ++j)
    if (prof.centers[j] >= xi_lo && prof.centers[j] <= xi_hi) idx.push_back(j);
  DecayRateFit fit;
  if (idx.size() < 4) {
    fit.flagged = true;
    fit.note = "fewer than 4 cells in the fit window";
    return fit;
  }
  if (from_high_end) std::reverse(idx.begin(), idx.end());

  // far-field floor: the smallest distance in the window (the approach
  // trough); finite-domain mismatch below it carries no rate signal
  double dmin = 1e300;
  for (size_t j : idx) dmin = std::min(dmin, prof.distances[j]);
  const double floor_d = std::max(dmin, floor_abs);

  // contiguous segment from the signal end above the floor, floor removed
  // in quadrature
  std::vector<double> xs, ys;
  for (size_t i = 0; i < idx.size(); ++i) {
    const double d = prof.distances[idx[i]];
    if (d * d <= 1.5 * floor_d * floor_d) break;
    xs.push_back(prof.centers[idx[i]]);
    ys.push_back(0.5 * std::log(d * d - floor_d * floor_d));
  }
  fit.cells_used = static_cast<int>(xs.size());
  if (fit.cells_used < 2) {
    fit.flagged = true;
    fit.note = "fewer than 2 cells above the far-field floor";
    return fit;
  }
  LineFit lf = fit_line(xs, ys);
  fit.rate = lf.slope;
  if (fit.cells_used == 2) {
    fit.note = "two-cell rate estimate";
    return fit;
  }
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  const double range = std::max(*ymax - *ymin, 1e-12);
  fit.rel_residual = lf.rms_residual / range;
  if (fit.rel_residual > 0.25) {
    fit.flagged = true;
    fit.note = "log-linear fit residual above 25% of range";
  }
  return fit;
}

DecayRates measure_decay_rates(const Field& state, const Field& ahead_ref,
                               const Field& behind_ref, double front_position,
                               double interior_frac, double margin) {
  state.grid.validate(true);
  const int M = state.grid.cell_count();
  const double L = state.grid.half_length;

  auto cell_of = [&](double x) {
    return static_cast<int>(std::floor((x + L) / kTwoPi));
  };
  // the approach ahead is steep (order-one rate), so its usable segment
  // starts right past the interface layer; the wake behind needs more room
  const double ahead_margin = std::min(margin, kTwoPi);
  const int ahead_lo = std::clamp(cell_of(front_position + ahead_margin) + 1, 0, M);
  const int ahead_hi = std::clamp(cell_of(interior_frac * L), 0, M);
  const int behind_lo = std::clamp(cell_of(-interior_frac * L) + 1, 0, M);
  const int behind_hi = std::clamp(cell_of(front_position - margin), 0, M);

  DecayRates out;
  out.front_position = front_position;

  // affine phase alignment over the full window: the linear term absorbs
  // the ring's quantized phase winding against the exact-period reference
  CellDistanceProfile pa = cell_distance_profile(state, ahead_ref, ahead_lo, ahead_hi, true);
  CellDistanceProfile pb = cell_distance_profile(state, behind_ref, behind_lo, behind_hi, true);

  // recenter on the front before fitting
  for (auto& x : pa.centers) x -= front_position;
  for (auto& x : pb.centers) x -= front_position;

  const double xi_ahead_lo = ahead_margin, xi_ahead_hi = interior_frac * L - front_position;
  const double xi_behind_lo = -interior_frac * L - front_position, xi_behind_hi = -margin;

  DecayRateFit fa = fit_decay_rate(pa, xi_ahead_lo, xi_ahead_hi, false);
  DecayRateFit fb = fit_decay_rate(pb, xi_behind_lo, xi_behind_hi, true);
  fa.rate = -fa.rate;  // decay ahead: distances fall with xi
  out.ahead = fa;
  out.behind = fb;     // growth toward the front: positive slope
  return out;
}

// ---------------------------------------------------------------------------
// Shift trace
// ---------------------------------------------------------------------------

double min_shift_distance(const Fft& fft, const Field& a, const Field& b, double bracket) {
  const GridSpec& g = a.grid;
  const int nh = fft.spectrum_size();
  Correlator corr{g, std::vector<cplx>(nh, cplx(0.0, 0.0))};
  double norm_a = 0.0, norm_b = 0.0;
  std::vector<cplx> ah, bh;
  for (int c = 0; c < a.components(); ++c) {
    fft.forward(a[c], ah);
    fft.forward(b[c], bh);
    for (int n = 0; n < nh; ++n) corr.p[n] += ah[n] * std::conj(bh[n]);
    for (int j = 0; j < g.points; ++j) {
      norm_a += a[c][j] * a[c][j];
      norm_b += b[c][j] * b[c][j];
    }
  }
  if (g.points % 2 == 0) corr.p[nh - 1] = 0.0;
  norm_a *= g.spacing();
  norm_b *= g.spacing();
  auto [s, cmax] = golden_max([&](double t) { return corr.eval(t, 0); }, -bracket, bracket, 1e-11);
  (void)s;
  const double d2 = norm_a + norm_b - 2.0 * cmax;
  return std::sqrt(std::max(0.0, d2));
}

ShiftTrace fit_shift_trace(const std::vector<double>& times, const std::vector<double>& q) {
  ShiftTrace tr;
  tr.times = times;
  tr.q = q;
  const size_t n = q.size();
  if (n < 6) {
    tr.flagged = true;
    tr.note = "too few shift samples";
    return tr;
  }
  // q* by geometric-sequence extrapolation on three spaced tail samples
  // (exact for a clean exponential approach), tail mean as the fallback
  const size_t tail = std::max<size_t>(3, n / 10);
  double qs = 0.0;
  for (size_t i = n - tail; i < n; ++i) qs += q[i];
  tr.q_star = qs / tail;
  {
    const size_t i2 = n - 1, i1 = n - 1 - (n / 8), i0 = n - 1 - 2 * (n / 8);
    if (i0 < i1 && i1 < i2) {
      const double d2 = q[i2] - 2.0 * q[i1] + q[i0];
      if (std::abs(d2) > 1e-14)
        tr.q_star = (q[i2] * q[i0] - q[i1] * q[i1]) / d2;
      if (!std::isfinite(tr.q_star) ||
          std::abs(tr.q_star - q[i2]) > 10.0 * (std::abs(q[i2] - q[i0]) + 1e-12))
        tr.q_star = qs / tail;  // extrapolation left the data range
    }
  }

  std::vector<double> ts, ys;
  for (size_t i = 0; i + tail < n; ++i) {
    const double e = std::abs(q[i] - tr.q_star);
    if (e > 1e-11) {
      ts.push_back(times[i]);
      ys.push_back(std::log(e));
    }
  }
  if (ts.size() < 4) {
    tr.flagged = true;
    tr.note = "too few points for the exponential fit";
    return tr;
  }
  LineFit lf = fit_line(ts, ys);
  tr.nu_fit = -lf.slope;
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  tr.fit_residual = lf.rms_residual / std::max(*ymax - *ymin, 1e-12);
  return tr;
}

double measure_shift_once(const Fft& fft, const Field& state, const Field& reference,
                          double beta, double ref_front_pos, double xi_min_offset,
                          double interior_frac, double bracket) {
  auto shifted = [&](double q) { return spectral_shift(fft, reference, q); };
  return measure_shift_once(fft, state, shifted, beta, ref_front_pos, xi_min_offset,
                            interior_frac, bracket);
}

double measure_shift_once(const Fft& fft, const Field& state,
                          const std::function<Field(double)>& shifted_reference, double beta,
                          double ref_front_pos, double xi_min_offset, double interior_frac,
                          double bracket) {
  (void)fft;
  const GridSpec& g = state.grid;
  std::vector<double> w2(g.points, 0.0);
  const double y_lo = ref_front_pos + xi_min_offset;
  const double y_hi = interior_frac * g.half_length;
  for (int j = 0; j < g.points; ++j) {
    const double y = g.x(j);
    if (y >= y_lo && y <= y_hi) {
      const double w = std::exp(beta * (y - ref_front_pos));
      w2[j] = w * w;
    }
  }
  auto objective = [&](double q) {
    Field shifted_ref = shifted_reference(q);
    double s = 0.0;
    for (int c = 0; c < state.components(); ++c)
      for (int j = 0; j < g.points; ++j) {
        const double d = state[c][j] - shifted_ref[c][j];
        s += w2[j] * d * d;
      }
    return s * g.spacing();
  };

  // coarse scan; widen once if several wells compete
  double lo = -bracket, hi = bracket;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const int n = 41;
    std::vector<double> vals(n);
    int imin = 0;
    for (int i = 0; i < n; ++i) {
      vals[i] = objective(lo + (hi - lo) * i / (n - 1));
      if (vals[i] < vals[imin]) imin = i;
    }
    int wells = 0;
    for (int i = 1; i + 1 < n; ++i)
      if (vals[i] < vals[i - 1] && vals[i] < vals[i + 1] &&
          vals[i] < vals[imin] * 1.1 + 1e-300)
        ++wells;
    if (wells <= 1 || attempt == 1) {
      const double step = (hi - lo) / (n - 1);
      const double a = lo + step * std::max(0, imin - 1);
      const double b = lo + step * std::min(n - 1, imin + 1);
      auto [q, v] = golden_min(objective, a, b, 1e-11);
      // Newton polish on central differences, kept only while it improves
      const double fd = 1e-6;
      for (int it = 0; it < 4; ++it) {
        const double f0 = objective(q - fd), f1 = objective(q), f2 = objective(q + fd);
        const double d1 = (f2 - f0) / (2 * fd), d2 = (f2 - 2 * f1 + f0) / (fd * fd);
        if (d2 <= 0.0) break;
        const double qn = q - d1 / d2;
        if (objective(qn) >= v) break;
        q = qn;
        v = objective(q);
      }
      return q;
    }
    lo *= 2.0;
    hi *= 2.0;
  }
  return 0.0;  // unreachable
}

ShiftTrace measure_shift(const std::vector<double>& times, const std::vector<Field>& states,
                         const std::vector<Field>& references, double beta,
                         const std::vector<double>& ref_front_positions,
                         double xi_min_offset, double interior_frac) {
  if (states.size() != references.size() || states.size() != times.size())
    throw std::invalid_argument("measure_shift: mismatched series lengths");
  std::vector<double> q;
  Fft fft(states.front().grid.points);
  for (size_t i = 0; i < states.size(); ++i)
    q.push_back(measure_shift_once(fft, states[i], references[i], beta,
                                   ref_front_positions[i], xi_min_offset, interior_frac));
  return fit_shift_trace(times, q);
}

// ---------------------------------------------------------------------------
// Diffusive decay
// ---------------------------------------------------------------------------

EnvelopeProfile cell_envelope(const Field& v) {
  v.grid.validate(true);
  const int M = v.grid.cell_count();
  const int P = v.grid.points_per_cell();
  const double h = v.grid.spacing();
  EnvelopeProfile env;
  for (int j = 0; j < M; ++j) {
    double s = 0.0;
    for (int c = 0; c < v.components(); ++c)
      for (int p = 0; p < P; ++p) {
        const double d = v[c][j * P + p];
        s += d * d;
      }
    env.centers.push_back(v.grid.x(j * P) + kPi);
    env.values.push_back(std::sqrt(s * h));
  }
  return env;
}

namespace {
double interp_envelope(const EnvelopeProfile& env, double x) {
  const auto& xs = env.centers;
  if (x <= xs.front() || x >= xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const size_t i = it - xs.begin();
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - t) * env.values[i - 1] + t * env.values[i];
}
}  // namespace

DiffusiveDecay measure_diffusive_decay(const std::vector<double>& times,
                                       const std::vector<Field>& v_snapshots,
                                       double center, double t_lo, double t_hi,
                                       double t_pair, double interior_frac) {
  if (times.size() != v_snapshots.size() || times.empty())
    throw std::invalid_argument("diffusive decay: mismatched series");
  DiffusiveDecay out;
  const GridSpec& g = v_snapshots.front().grid;
  const double interior = interior_frac * g.half_length;

  // sup|V| over the interior vs time, log-log
  std::vector<double> lts, lss;
  std::vector<double> dgs;
  for (size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < t_lo || t > t_hi) continue;
    const Field& v = v_snapshots[i];
    double sup = 0.0;
    for (int c = 0; c < v.components(); ++c)
      for (int j = 0; j < g.points; ++j)
        if (std::abs(g.x(j)) <= interior) sup = std::max(sup, std::abs(v[c][j]));
    if (sup <= 0.0) continue;
    lts.push_back(std::log(t));
    lss.push_back(std::log(sup));

    // Gaussian width from the cell envelope at this time
    EnvelopeProfile env = cell_envelope(v);
    double emax = 0.0;
    for (double e : env.values) emax = std::max(emax, e);
    std::vector<double> xs, ys;
    for (size_t j = 0; j < env.centers.size(); ++j) {
      const double x = env.centers[j];
      if (std::abs(x) > interior) continue;
      if (env.values[j] < 0.05 * emax) continue;
      const double dx = x - center;
      xs.push_back(dx * dx);
      ys.push_back(std::log(env.values[j]));
    }
    if (xs.size() >= 5) {
      LineFit lf = fit_line(xs, ys);
      if (lf.slope < 0.0) dgs.push_back(-1.0 / (4.0 * lf.slope * t));
    }
  }
  if (lts.size() >= 3) {
    LineFit lf = fit_line(lts, lss);
    out.slope = lf.slope;
    const auto [ymin, ymax] = std::minmax_element(lss.begin(), lss.end());
    out.slope_residual = lf.rms_residual / std::max(*ymax - *ymin, 1e-12);
  } else {
    out.note += "too few snapshots in the slope window; ";
  }
  if (!dgs.empty()) {
    double mean = 0.0;
    for (double d : dgs) mean += d;
    mean /= dgs.size();
    double var = 0.0;
    for (double d : dgs) var += (d - mean) * (d - mean);
    out.d_gaussian = mean;
    out.d_gaussian_residual = std::sqrt(var / dgs.size()) / mean;
  }

  // self-similar collapse between t_pair and 4 t_pair
  auto nearest = [&](double t) {
    size_t best = 0;
    for (size_t i = 0; i < times.size(); ++i)
      if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
    return best;
  };
  const size_t i1 = nearest(t_pair), i2 = nearest(4.0 * t_pair);
  if (i1 != i2) {
    const double t1 = times[i1], t2 = times[i2];
    EnvelopeProfile e1 = cell_envelope(v_snapshots[i1]);
    EnvelopeProfile e2 = cell_envelope(v_snapshots[i2]);
    const double eta_max = 0.9 * (interior - std::abs(center)) / std::sqrt(t2);
    double mis = 0.0, peak = 0.0;
    const int neta = 161;
    for (int i = 0; i < neta; ++i) {
      const double eta = -eta_max + 2.0 * eta_max * i / (neta - 1);
      const double a = std::sqrt(t1) * interp_envelope(e1, center + eta * std::sqrt(t1));
      const double b = std::sqrt(t2) * interp_envelope(e2, center + eta * std::sqrt(t2));
      mis = std::max(mis, std::abs(a - b));
      peak = std::max(peak, std::abs(a));
    }
    if (peak > 0.0) out.collapse_error = mis / peak;
  }

  // boundary contamination check on the final snapshot
  EnvelopeProfile efin = cell_envelope(v_snapshots.back());
  double emax = 0.0, eedge = 0.0;
  for (size_t j = 0; j < efin.centers.size(); ++j) {
    emax = std::max(emax, efin.values[j]);
    if (std::abs(efin.centers[j]) > interior) eedge = std::max(eedge, efin.values[j]);
  }
  if (emax > 0.0 && eedge > 0.02 * emax) {
    out.boundary_flag = true;
    out.note += "perturbation reached the domain boundary; ";
  }
  return out;
}

}  // namespace frontlab
