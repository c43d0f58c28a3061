#pragma once

#include <array>
#include <vector>

namespace tclpop {

/// Coefficients of S(tau) in ascending powers, tau^0 .. tau^9.
inline constexpr std::array<double, 10> kSmoothstep9Coefficients{
    0.0, 0.0, 0.0, 0.0, 0.0, 126.0, -420.0, 540.0, -315.0, 70.0};

/// S(tau) = tau^5 (126 - 420 tau + 540 tau^2 - 315 tau^3 + 70 tau^4).
/// S(0)=0, S(1)=1, first to third derivatives vanish at both ends.
/// Throws DomainError for tau outside [0, 1].
double smoothstep9(double tau);

/// d^order S / d tau^order, exact polynomial differentiation (order 0..9).
double smoothstep9_derivative(double tau, int order);

enum class SegmentKind { kConstant, kTransition };

struct ReferenceSegment {
  double t_start = 0.0;  // s
  double t_end = 0.0;    // s
  SegmentKind kind = SegmentKind::kConstant;
  double from = 0.0;     // level at t_start (equals `to` for constant segments)
  double to = 0.0;

  static ReferenceSegment constant(double t0, double t1, double level) {
    return {t0, t1, SegmentKind::kConstant, level, level};
  }
  static ReferenceSegment transition(double t0, double t1, double from, double to) {
    return {t0, t1, SegmentKind::kTransition, from, to};
  }
};

/// Piecewise desired normalised power y_d(t). Immutable once built.
class ReferenceProfile {
public:
  /// Throws ConfigError unless segments are contiguous, non-degenerate and level-matched.
  explicit ReferenceProfile(std::vector<ReferenceSegment> segments);

  /// 0.4 until 11:30, smooth drop to 0.2 by 12:00, hold, smooth rise to 0.5
  /// between 14:30 and 15:00, hold until 16:30. t = 0 is 10:00.
  static ReferenceProfile tracking_campaign();

  const std::vector<ReferenceSegment>& segments() const noexcept { return segments_; }
  double t_begin() const noexcept { return segments_.front().t_start; }
  double t_end() const noexcept { return segments_.back().t_end; }

  /// Desired normalised power at t (s). Throws DomainError outside the profile.
  double value(double t) const;
  /// Analytic derivative in 1/h.
  double rate(double t) const;

private:
  const ReferenceSegment& find(double t) const;
  std::vector<ReferenceSegment> segments_;
};

inline double y_d(const ReferenceProfile& profile, double t) { return profile.value(t); }
inline double y_d_dot(const ReferenceProfile& profile, double t) { return profile.rate(t); }

}  // namespace tclpop
