#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tclpop/density.hpp"

namespace tclpop::pde {

/// Coupled Fokker-Planck model of a homogeneous population (mean R, C).
struct PdeConfig {
  double R = 2.0;
  double C = 10.0;
  double P = 14.0;
  double eta = 2.5;
  double sigma = 0.01;    // degC / sqrt(h)
  double lambda = 0.03;   // forced-switch rate, 1/h
  double x_L = 15.0;
  double x_H = 25.0;
  double delta0 = 0.5;
  std::size_t cells = 200;  // per segment
  double cfl = 0.4;

  void validate() const;
};

/// Drift of the OFF (alpha0) and ON (alpha1) temperature dynamics, degC/h.
struct DriftFields {
  double x_a = 30.0;
  double R = 2.0;
  double C = 10.0;
  double P = 14.0;
  double sigma = 0.01;

  static DriftFields from(const PdeConfig& cfg, double x_a) noexcept {
    return {x_a, cfg.R, cfg.C, cfg.P, cfg.sigma};
  }
  double alpha0(double x) const noexcept { return (x_a - x) / (C * R); }
  double alpha1(double x) const noexcept { return alpha0(x) - P / C; }
};

/// Net forced-switch flux g(f0, f1) = lambda (f0 - f1) from OFF into ON inside the deadband.
struct CouplingLaw {
  double lambda = 0.03;

  double g(double f0, double f1) const noexcept { return lambda * (f0 - f1); }
  /// g(0, tau) <= 0, g(s, 0) >= 0 and |g_s| + |g_tau| <= 1.
  bool satisfies_structural_conditions() const noexcept { return lambda >= 0.0 && 2.0 * lambda <= 1.0; }
};

/// A density on one segment, stored as cell masses on a uniform grid of the
/// segment's normalised coordinate y = (x - left) / (right - left). Storing
/// masses keeps the scheme conservative while the segment stretches.
struct SegmentField {
  std::vector<double> mass;
  double left = 0.0;
  double right = 1.0;

  std::size_t size() const noexcept { return mass.size(); }
  double length() const noexcept { return right - left; }
  double dx() const noexcept { return length() / static_cast<double>(mass.size()); }
  double center(std::size_t i) const noexcept { return left + (static_cast<double>(i) + 0.5) * dx(); }
  double density(std::size_t i) const noexcept { return mass[i] / dx(); }
  double total() const noexcept;
};

/// f0 on I_a = (x_L, lower) and I_b = (lower, upper); f1 on I_b and I_c = (upper, x_H).
/// f0 vanishes above the upper edge and f1 below the lower edge by construction.
struct PdfFields {
  SegmentField f0a;
  SegmentField f0b;
  SegmentField f1b;
  SegmentField f1c;
  double x_sp = 20.0;
  double delta0 = 0.5;
  double x_L = 15.0;
  double x_H = 25.0;

  /// Uniform OFF/ON densities over the deadband, nothing outside.
  static PdfFields uniform_deadband(const PdeConfig& cfg, double x_sp0, double off_mass,
                                    double on_mass);

  double lower() const noexcept { return x_sp - 0.5 * delta0; }
  double upper() const noexcept { return x_sp + 0.5 * delta0; }

  double total_mass() const noexcept;
  double min_density() const noexcept;
  /// f0 at the lower edge, extrapolated linearly from the deadband side. The
  /// density is continuous there, but the exterior side is a boundary layer of
  /// width ~sigma^2 / |alpha| that the exterior grid does not resolve.
  double f0_at_lower() const noexcept;
  /// f1 at the upper edge, likewise from the deadband side.
  double f1_at_upper() const noexcept;
  BoundaryDensities boundary_densities() const noexcept;
};

/// Probability flow F = (sigma^2/2) df/dx - v f across a face between two
/// cells, with v = alpha - u (minus mesh velocity in moving segments).
/// Central differences for diffusion, upwind by the sign of v for advection.
double probability_flow(double f_left, double f_right, double spacing, double velocity,
                        double sigma) noexcept;

/// Ghost values at the eight segment ends. Walls mirror the interior cell
/// (their face flux is set to zero); absorbing edges take the odd reflection
/// (face value zero); continuity edges take the neighbouring segment's cell.
struct GhostValues {
  double f0a_left = 0.0, f0a_right = 0.0;
  double f0b_left = 0.0, f0b_right = 0.0;
  double f1b_left = 0.0, f1b_right = 0.0;
  double f1c_left = 0.0, f1c_right = 0.0;
};

GhostValues apply_boundary_conditions(const PdfFields& fields) noexcept;

/// Face flows of every segment (size + 1 entries each, F on the faces) plus the
/// absorbed rates transferred between modes at the deadband edges. `step`
/// deposits each absorbed rate in the cell downwind of the continuity face it
/// belongs to, which realises the flux-jump conditions at the edges.
struct FaceFlows {
  std::vector<double> f0a, f0b, f1b, f1c;
  double absorbed_lower = 0.0;  // f1 mass/h leaving at the lower edge, injected into f0
  double absorbed_upper = 0.0;  // f0 mass/h leaving at the upper edge, injected into f1
  double max_speed = 0.0;       // largest |alpha - u - w| over all faces
};

FaceFlows face_flows(const PdfFields& fields, const DriftFields& drift, double u);

/// Largest explicit step (s): cfl * min(dx^2 / sigma^2, dx / max|v|) over segments.
double max_stable_dt(const PdfFields& fields, const DriftFields& drift, double u, double cfl = 0.4);

/// One explicit finite-volume step of dt_s seconds; the deadband then moves by u dt.
/// Throws StepSizeError above max_stable_dt.
PdfFields step(const PdfFields& fields, const DriftFields& drift, const CouplingLaw& coupling,
               double u, double dt_s, double cfl = 0.4);

/// Boundary derivatives of the densities from one-sided 3-point stencils.
struct BoundaryDerivatives {
  double df1_lower_plus = 0.0;
  double df1_upper_plus = 0.0;
  double df0_lower_minus = 0.0;
  double df0_upper_minus = 0.0;
};

BoundaryDerivatives boundary_derivatives(const PdfFields& fields) noexcept;

/// Lumped disturbance of the error dynamics in per-unit power per hour (same
/// units as de/dt in the P/eta-scaled output); divide by P/eta for the normalised channel.
double gamma_disturbance(const PdfFields& fields, const DriftFields& drift,
                         const CouplingLaw& coupling, double eta);

struct AggregateOutputs {
  double y_total_norm = 0.0;
  double y_norm = 0.0;
};

/// Midpoint quadrature of the output integrals, normalised by P / eta.
AggregateOutputs aggregate_outputs(const PdfFields& fields) noexcept;

/// max |mass - 1| over a recorded history of total masses.
double verify_conservation(const std::vector<double>& mass_history) noexcept;

/// CSV with header `x,f0,f1`, one row per cell centre across all segments.
void write_fields_csv(std::ostream& out, const PdfFields& fields);

}  // namespace tclpop::pde
