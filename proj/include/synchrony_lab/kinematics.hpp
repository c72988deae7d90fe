#pragma once

// Closed-form boost algebra for x-directed frames under arbitrary synchrony
// conventions. Natural units throughout: c = 1.
//
// A convention is described by the Edwards parameter k in [-1, 1]; the
// one-way light speeds along +x and -x are 1/(1-k) and 1/(1+k), so the
// round-trip speed is 1 for every k. k = 0 is Einstein synchrony.
//
// Frames are specified by their velocity beta relative to the absolute
// frame S (beta = 0, k = 0) and by the convention k their clocks use.

#include <string>
#include <string_view>

namespace synchrony_lab::kinematics {

inline constexpr std::string_view kAbsoluteChart = "S";

struct Event {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::string chart{kAbsoluteChart};

  bool is_finite() const noexcept;
};

enum class Direction { kPlusX, kMinusX };

/// A coordinate speed that may be infinite. Instantaneous propagation is a
/// legitimate outcome here, so it is carried as a value instead of a NaN.
class Speed {
 public:
  static Speed finite(double value);
  static Speed infinite(int sign = 1) noexcept;

  bool is_infinite() const noexcept { return infinite_; }
  /// The finite value, or +/-infinity.
  double value() const noexcept;
  int sign() const noexcept;

  friend bool operator==(const Speed&, const Speed&) = default;

 private:
  Speed(double value, bool infinite) : value_(value), infinite_(infinite) {}

  double value_;
  bool infinite_;
};

class FrameSpec {
 public:
  /// Throws InvalidArgument unless |beta| < 1, -1 <= k <= 1 and label is non-empty.
  FrameSpec(double beta, double k, std::string label);

  static FrameSpec absolute();

  double beta() const noexcept { return beta_; }
  double k() const noexcept { return k_; }
  const std::string& label() const noexcept { return label_; }

  FrameSpec with_k(double k) const { return FrameSpec(beta_, k, label_); }

 private:
  double beta_;
  double k_;
  std::string label_;
};

/// Affine-linear normal form of every transform in this library:
///   t' = a_tt t + a_tx x
///   x' = a_xt t + a_xx x
/// with y and z passed through.
struct TransformCoeffs {
  double a_tt = 1.0;
  double a_tx = 0.0;
  double a_xt = 0.0;
  double a_xx = 1.0;

  static TransformCoeffs identity() noexcept { return {}; }

  double determinant() const noexcept { return a_tt * a_xx - a_tx * a_xt; }

  /// Throws DomainError on a singular map.
  TransformCoeffs inverse() const;

  /// `next` applied after `*this`.
  TransformCoeffs then(const TransformCoeffs& next) const noexcept;

  Event apply(const Event& e, std::string chart) const;
};

// Coefficient constructors. Each named transform below is apply() of one of these.
TransformCoeffs edwards_coeffs(double beta, double k, double k_prime);
TransformCoeffs lorentz_coeffs(double beta);
TransformCoeffs superluminal_coeffs(double beta);
TransformCoeffs resync_coeffs(double k_from, double k_to);
/// Absolute frame S -> `frame`.
TransformCoeffs frame_coeffs(const FrameSpec& frame);
TransformCoeffs between_coeffs(const FrameSpec& from, const FrameSpec& to);

/// 1/sqrt((1 + beta k)^2 - beta^2). Throws DegenerateConvention when the
/// radicand is not positive.
double eta(double beta, double k);

/// Boost by beta from a chart using convention k to one using k_prime.
/// beta is the velocity of the target frame measured with the source
/// frame's own k-synchronized clocks.
Event edwards_transform(const Event& e, double beta, double k, double k_prime,
                        std::string target_chart = "S'");

Event lorentz_transform(const Event& e, double beta, std::string target_chart = "S'");

/// x' = (x - beta t)/sqrt(1 - beta^2), t' = sqrt(1 - beta^2) t. The new time
/// coordinate does not depend on x, so simultaneity in S is preserved.
Event superluminal_transform(const Event& e, double beta, std::string target_chart = "S'");

/// The k' that makes the x-coefficient of t' vanish: beta (k^2 - 1) + k.
/// Throws ConventionOutOfRange if |k'| > 1.
double induced_synchrony(double k, double beta);

Speed one_way_speed(double k, Direction direction);

/// Re-set distant clocks from convention k_from to k_to: t -> t + (k_from - k_to) x.
Event resynchronize(const Event& e, double k_from, double k_to);

/// Velocity of a frame moving at beta in a k-chart, as seen with Einstein
/// clocks of the same frame: beta / (1 + beta k).
double einstein_velocity(double beta, double k);

/// Route through the absolute frame. Throws ChartMismatch if e.chart != from.label().
Event transform_between(const Event& e, const FrameSpec& from, const FrameSpec& to);

/// du'/dt' for the worldline x = u t of `from`, evaluated in `to`.
Speed map_velocity(double u, const FrameSpec& from, const FrameSpec& to);

}  // namespace synchrony_lab::kinematics
