#include "tclpop/density.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tclpop/errors.hpp"

namespace tclpop {

BoundaryDensities estimate_boundary_densities(const Population& pop, double delta_x) {
  if (!(delta_x > 0.0)) throw ConfigError("estimate_boundary_densities: delta_x must be positive");
  const double lower = pop.conditions().lower();
  const double upper = pop.conditions().upper();
  std::size_t on_hits = 0;
  std::size_t off_hits = 0;
  for (const TclUnit& u : pop.units()) {
    const double x = u.state.x;
    if (u.state.mode == Mode::kOn) {
      if (x >= upper - delta_x && x <= upper) ++on_hits;
    } else if (x >= lower && x <= lower + delta_x) {
      ++off_hits;
    }
  }
  const double scale = 1.0 / (static_cast<double>(pop.size()) * delta_x);
  return {static_cast<double>(off_hits) * scale, static_cast<double>(on_hits) * scale, delta_x};
}

double PdfSnapshot::integral() const noexcept {
  const double w = bin_width();
  double total = 0.0;
  for (std::size_t i = 0; i < f0.size(); ++i) total += (f0[i] + f1[i]) * w;
  return total;
}

PdfSnapshot histogram_pdf(const Population& pop, double x_L, double x_H, std::size_t n_bins) {
  if (n_bins < 2) throw ConfigError("histogram_pdf: need at least two bins");
  if (!(x_L < x_H)) throw ConfigError("histogram_pdf: x_L must be below x_H");

  PdfSnapshot snap;
  snap.edges.resize(n_bins + 1);
  const double width = (x_H - x_L) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i <= n_bins; ++i) snap.edges[i] = x_L + width * static_cast<double>(i);
  snap.edges.back() = x_H;

  std::vector<std::size_t> c0(n_bins, 0), c1(n_bins, 0);
  for (const TclUnit& u : pop.units()) {
    const double x = u.state.x;
    if (!(x >= x_L && x <= x_H))
      throw IntegrityError(fmt::format("histogram_pdf: unit at {} outside [{}, {}]", x, x_L, x_H));
    auto bin = static_cast<std::size_t>((x - x_L) / width);
    if (bin >= n_bins) bin = n_bins - 1;
    ++(u.state.mode == Mode::kOn ? c1 : c0)[bin];
  }

  const double scale = 1.0 / (static_cast<double>(pop.size()) * width);
  snap.f0.resize(n_bins);
  snap.f1.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    snap.f0[i] = static_cast<double>(c0[i]) * scale;
    snap.f1[i] = static_cast<double>(c1[i]) * scale;
  }
  return snap;
}

void write_pdf_csv(std::ostream& out, const PdfSnapshot& snap) {
  out << "bin_center,f0,f1\n";
  for (std::size_t i = 0; i < snap.bins(); ++i)
    fmt::print(out, "{:.6f},{:.9g},{:.9g}\n", snap.center(i), snap.f0[i], snap.f1[i]);
}

}  // namespace tclpop
