#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace frontlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Uniform periodic grid on (-L, L).  Grid points are x_j = -L + j*h,
/// j = 0..N-1, with h = 2L/N, and the point x = L is identified with x = -L.
/// Cell grids (single 2*pi period) start at x = 0 instead so that the FFT
/// index phase coincides with the physical phase.
struct GridSpec {
  double half_length = 60.0 * kPi;  // L
  int points = 4096;                // N
  bool cell = false;                // first sample at 0 instead of -L

  double spacing() const { return 2.0 * half_length / points; }
  double x(int j) const { return (cell ? 0.0 : -half_length) + j * spacing(); }
  double length() const { return 2.0 * half_length; }

  /// Physical wavenumber of Fourier index n (signed, |n| <= N/2).
  double wavenumber(int n) const { return n * kPi / half_length; }

  /// Number of 2*pi cells in the domain, or 0 if the length is not an
  /// integer multiple of 2*pi (within rounding slack).
  int cell_count() const;
  bool commensurate() const { return cell_count() > 0; }
  /// Grid points per 2*pi cell (requires commensurate()).
  int points_per_cell() const;

  void validate(bool need_cells = false) const;
};

/// One 2*pi cell with P points, samples at x_p = 2*pi*p/P.
inline GridSpec cell_grid(int points) { return GridSpec{kPi, points, true}; }

/// Vector-valued real grid function (2 or 3 components) on a GridSpec.
struct Field {
  GridSpec grid;
  std::vector<std::vector<double>> comps;

  Field() = default;
  Field(const GridSpec& g, int ncomp)
      : grid(g), comps(ncomp, std::vector<double>(g.points, 0.0)) {}

  int components() const { return static_cast<int>(comps.size()); }
  int size() const { return grid.points; }

  std::vector<double>& operator[](int c) { return comps[c]; }
  const std::vector<double>& operator[](int c) const { return comps[c]; }

  bool all_finite() const;
  /// L2 norm over the domain, all components (trapezoid = exact on the grid).
  double l2_norm() const;
  double max_abs() const;
};

Field operator-(const Field& a, const Field& b);

/// Fill one component from a callable x -> value.
template <typename F>
void fill(std::vector<double>& comp, const GridSpec& g, F&& f) {
  for (int j = 0; j < g.points; ++j) comp[j] = f(g.x(j));
}

}  // namespace frontlab
