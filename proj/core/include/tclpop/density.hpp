#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tclpop/population.hpp"

namespace tclpop {

/// Boundary densities the control law needs: f0 at the lower deadband edge and
/// f1 at the upper edge, both in 1/degC.
struct BoundaryDensities {
  double f0_lower = 0.0;
  double f1_upper = 0.0;
  double bin_width = 0.004;

  double sum() const noexcept { return f0_lower + f1_upper; }
};

/// Rectangular estimate from one bin of width delta_x placed just inside the
/// deadband at each edge: ON units in [upper - delta_x, upper], OFF units in
/// [lower, lower + delta_x], each count divided by N * delta_x.
BoundaryDensities estimate_boundary_densities(const Population& pop, double delta_x);

/// Full-range histogram of the OFF and ON densities.
struct PdfSnapshot {
  std::vector<double> edges;  // n_bins + 1 edges over [x_L, x_H]
  std::vector<double> f0;
  std::vector<double> f1;

  std::size_t bins() const noexcept { return f0.size(); }
  double bin_width() const noexcept { return edges.size() > 1 ? edges[1] - edges[0] : 0.0; }
  double center(std::size_t i) const noexcept { return 0.5 * (edges[i] + edges[i + 1]); }
  /// Sum of (f0 + f1) * width; one for any population.
  double integral() const noexcept;
};

/// Throws IntegrityError when a unit lies outside [x_L, x_H].
PdfSnapshot histogram_pdf(const Population& pop, double x_L, double x_H, std::size_t n_bins);

/// CSV with header `bin_center,f0,f1`.
void write_pdf_csv(std::ostream& out, const PdfSnapshot& snap);

}  // namespace tclpop
