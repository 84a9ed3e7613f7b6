#include "frontlab/grid.hpp"

#include <cmath>

namespace frontlab {

int GridSpec::cell_count() const {
  double m = length() / kTwoPi;
  double r = std::round(m);
  if (r < 1.0 || std::abs(m - r) > 1e-9 * r) return 0;
  return static_cast<int>(r);
}

int GridSpec::points_per_cell() const {
  int m = cell_count();
  if (m == 0 || points % m != 0)
    throw std::invalid_argument("grid not commensurate with 2*pi cells");
  return points / m;
}

void GridSpec::validate(bool need_cells) const {
  if (half_length <= 0.0) throw std::invalid_argument("grid: half_length must be positive");
  if (points < 8) throw std::invalid_argument("grid: too few points");
  if (need_cells) {
    int m = cell_count();
    if (m == 0)
      throw std::invalid_argument("grid: domain length must be a multiple of 2*pi for Bloch diagnostics");
    if (points % m != 0)
      throw std::invalid_argument("grid: points must divide evenly into 2*pi cells");
    if (points / m < 16)
      throw std::invalid_argument("grid: fewer than 16 points per 2*pi cell");
  }
}

bool Field::all_finite() const {
  for (const auto& c : comps)
    for (double v : c)
      if (!std::isfinite(v)) return false;
  return true;
}

double Field::l2_norm() const {
  double s = 0.0;
  for (const auto& c : comps)
    for (double v : c) s += v * v;
  return std::sqrt(s * grid.spacing());
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& c : comps)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

Field operator-(const Field& a, const Field& b) {
  Field out = a;
  for (int c = 0; c < a.components(); ++c)
    for (int j = 0; j < a.size(); ++j) out[c][j] -= b[c][j];
  return out;
}

}  // namespace frontlab
