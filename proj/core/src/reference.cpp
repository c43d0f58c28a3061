#include "tclpop/reference.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "tclpop/errors.hpp"

namespace tclpop {

namespace {

constexpr double kSecondsPerHour = 3600.0;

double horner(const std::array<double, 10>& c, int order, double tau) {
  // Coefficient of tau^(j - order) in the order-th derivative is c[j] * j!/(j-order)!.
  double acc = 0.0;
  for (int j = 9; j >= order; --j) {
    double falling = 1.0;
    for (int m = 0; m < order; ++m) falling *= static_cast<double>(j - m);
    acc = acc * tau + c[static_cast<std::size_t>(j)] * falling;
  }
  return acc;
}

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw DomainError(fmt::format("smoothstep9: tau={} outside [0, 1]", tau));
}

}  // namespace

double smoothstep9(double tau) {
  check_tau(tau);
  return horner(kSmoothstep9Coefficients, 0, tau);
}

double smoothstep9_derivative(double tau, int order) {
  check_tau(tau);
  if (order < 0) throw DomainError("smoothstep9_derivative: negative order");
  if (order > 9) return 0.0;
  return horner(kSmoothstep9Coefficients, order, tau);
}

ReferenceProfile::ReferenceProfile(std::vector<ReferenceSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ConfigError("reference: profile needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.t_end > s.t_start))
      throw ConfigError(fmt::format("reference: segment {} has non-positive duration", i));
    if (s.kind == SegmentKind::kConstant && s.from != s.to)
      throw ConfigError(fmt::format("reference: constant segment {} has two levels", i));
    if (i > 0) {
      const auto& prev = segments_[i - 1];
      if (prev.t_end != s.t_start)
        throw ConfigError(fmt::format("reference: gap or overlap before segment {}", i));
      if (std::abs(prev.to - s.from) > 1e-12)
        throw ConfigError(fmt::format("reference: level mismatch at segment {}", i));
    }
  }
}

ReferenceProfile ReferenceProfile::tracking_campaign() {
  constexpr double h = kSecondsPerHour;
  return ReferenceProfile({
      ReferenceSegment::constant(0.0, 1.5 * h, 0.4),
      ReferenceSegment::transition(1.5 * h, 2.0 * h, 0.4, 0.2),
      ReferenceSegment::constant(2.0 * h, 4.5 * h, 0.2),
      ReferenceSegment::transition(4.5 * h, 5.0 * h, 0.2, 0.5),
      ReferenceSegment::constant(5.0 * h, 6.5 * h, 0.5),
  });
}

const ReferenceSegment& ReferenceProfile::find(double t) const {
  if (!(t >= t_begin() && t <= t_end()))
    throw DomainError(fmt::format("reference: t={} s outside [{}, {}]", t, t_begin(), t_end()));
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const ReferenceSegment& s) { return v < s.t_end; });
  return it == segments_.end() ? segments_.back() : *it;
}

double ReferenceProfile::value(double t) const {
  const auto& s = find(t);
  if (s.kind == SegmentKind::kConstant) return s.from;
  const double tau = std::clamp((t - s.t_start) / (s.t_end - s.t_start), 0.0, 1.0);
  return s.from + (s.to - s.from) * smoothstep9(tau);
}

double ReferenceProfile::rate(double t) const {
  const auto& s = find(t);
  if (s.kind == SegmentKind::kConstant) return 0.0;
  const double duration_h = (s.t_end - s.t_start) / kSecondsPerHour;
  const double tau = std::clamp((t - s.t_start) / (s.t_end - s.t_start), 0.0, 1.0);
  return (s.to - s.from) * smoothstep9_derivative(tau, 1) / duration_h;
}

}  // namespace tclpop
