#include "synchrony_lab/kinematics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "synchrony_lab/error.hpp"

namespace synchrony_lab::kinematics {
namespace {

void require_subluminal(double beta) {
  if (!std::isfinite(beta) || std::abs(beta) >= 1.0) {
    throw InvalidArgument(fmt::format("frame velocity must satisfy |beta| < 1, got {}", beta));
  }
}

void require_convention(double k) {
  if (!std::isfinite(k) || std::abs(k) > 1.0) {
    throw InvalidArgument(fmt::format("synchrony parameter must satisfy |k| <= 1, got {}", k));
  }
}

}  // namespace

bool Event::is_finite() const noexcept {
  return std::isfinite(t) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

Speed Speed::finite(double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgument("Speed::finite requires a finite value");
  }
  return Speed(value, false);
}

Speed Speed::infinite(int sign) noexcept { return Speed(sign < 0 ? -1.0 : 1.0, true); }

double Speed::value() const noexcept {
  if (infinite_) {
    return std::copysign(std::numeric_limits<double>::infinity(), value_);
  }
  return value_;
}

int Speed::sign() const noexcept { return value_ > 0.0 ? 1 : (value_ < 0.0 ? -1 : 0); }

FrameSpec::FrameSpec(double beta, double k, std::string label)
    : beta_(beta), k_(k), label_(std::move(label)) {
  require_subluminal(beta_);
  require_convention(k_);
  if (label_.empty()) {
    throw InvalidArgument("frame label must be non-empty");
  }
}

FrameSpec FrameSpec::absolute() { return FrameSpec(0.0, 0.0, std::string(kAbsoluteChart)); }

TransformCoeffs TransformCoeffs::inverse() const {
  const double det = determinant();
  if (det == 0.0 || !std::isfinite(det)) {
    throw DomainError("transform is not invertible");
  }
  return {a_xx / det, -a_tx / det, -a_xt / det, a_tt / det};
}

TransformCoeffs TransformCoeffs::then(const TransformCoeffs& next) const noexcept {
  return {
      next.a_tt * a_tt + next.a_tx * a_xt,
      next.a_tt * a_tx + next.a_tx * a_xx,
      next.a_xt * a_tt + next.a_xx * a_xt,
      next.a_xt * a_tx + next.a_xx * a_xx,
  };
}

Event TransformCoeffs::apply(const Event& e, std::string chart) const {
  return Event{a_tt * e.t + a_tx * e.x, a_xt * e.t + a_xx * e.x, e.y, e.z, std::move(chart)};
}

double eta(double beta, double k) {
  require_subluminal(beta);
  require_convention(k);
  const double radicand = std::fma(beta, k - 1.0, 1.0) * std::fma(beta, k + 1.0, 1.0);
  if (!(radicand > 0.0)) {
    throw DegenerateConvention(beta, k);
  }
  return 1.0 / std::sqrt(radicand);
}

TransformCoeffs edwards_coeffs(double beta, double k, double k_prime) {
  const double h = eta(beta, k);
  require_convention(k_prime);
  return {
      h * (1.0 + beta * (k + k_prime)),
      h * (beta * (k * k - 1.0) + k - k_prime),
      -h * beta,
      h,
  };
}

TransformCoeffs lorentz_coeffs(double beta) { return edwards_coeffs(beta, 0.0, 0.0); }

TransformCoeffs superluminal_coeffs(double beta) {
  require_subluminal(beta);
  const double contraction = std::sqrt((1.0 - beta) * (1.0 + beta));
  return {contraction, 0.0, -beta / contraction, 1.0 / contraction};
}

TransformCoeffs resync_coeffs(double k_from, double k_to) {
  require_convention(k_from);
  require_convention(k_to);
  return {1.0, k_from - k_to, 0.0, 1.0};
}

TransformCoeffs frame_coeffs(const FrameSpec& frame) {
  return edwards_coeffs(frame.beta(), 0.0, frame.k());
}

TransformCoeffs between_coeffs(const FrameSpec& from, const FrameSpec& to) {
  return frame_coeffs(from).inverse().then(frame_coeffs(to));
}

Event edwards_transform(const Event& e, double beta, double k, double k_prime,
                        std::string target_chart) {
  return edwards_coeffs(beta, k, k_prime).apply(e, std::move(target_chart));
}

Event lorentz_transform(const Event& e, double beta, std::string target_chart) {
  return lorentz_coeffs(beta).apply(e, std::move(target_chart));
}

Event superluminal_transform(const Event& e, double beta, std::string target_chart) {
  require_subluminal(beta);
  const double contraction = std::sqrt((1.0 - beta) * (1.0 + beta));
  return Event{contraction * e.t, (e.x - beta * e.t) / contraction, e.y, e.z,
               std::move(target_chart)};
}

double induced_synchrony(double k, double beta) {
  require_subluminal(beta);
  require_convention(k);
  const double k_prime = beta * (k * k - 1.0) + k;
  if (std::abs(k_prime) > 1.0) {
    throw ConventionOutOfRange(k_prime);
  }
  return k_prime;
}

Speed one_way_speed(double k, Direction direction) {
  require_convention(k);
  const double denominator = direction == Direction::kPlusX ? 1.0 - k : 1.0 + k;
  const int sign = direction == Direction::kPlusX ? 1 : -1;
  if (denominator == 0.0) {
    return Speed::infinite(sign);
  }
  // Magnitude; direction is carried by the caller's choice of Direction.
  return Speed::finite(1.0 / denominator);
}

Event resynchronize(const Event& e, double k_from, double k_to) {
  return resync_coeffs(k_from, k_to).apply(e, e.chart);
}

double einstein_velocity(double beta, double k) {
  eta(beta, k);
  return beta / (1.0 + beta * k);
}

Event transform_between(const Event& e, const FrameSpec& from, const FrameSpec& to) {
  if (e.chart != from.label()) {
    throw ChartMismatch(from.label(), e.chart);
  }
  if (from.label() == to.label() && from.beta() == to.beta() && from.k() == to.k()) {
    return e;
  }
  return between_coeffs(from, to).apply(e, to.label());
}

Speed map_velocity(double u, const FrameSpec& from, const FrameSpec& to) {
  if (!std::isfinite(u)) {
    throw InvalidArgument("worldline velocity must be finite");
  }
  const Event origin{0.0, 0.0, 0.0, 0.0, from.label()};
  const Event later{1.0, u, 0.0, 0.0, from.label()};
  const Event a = transform_between(origin, from, to);
  const Event b = transform_between(later, from, to);
  const double dt = b.t - a.t;
  const double dx = b.x - a.x;
  const double scale = std::abs(b.t) + std::abs(a.t);
  if (std::abs(dt) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
    if (dx == 0.0) {
      throw DomainError("worldline maps onto a single event");
    }
    return Speed::infinite(dx > 0.0 ? 1 : -1);
  }
  return Speed::finite(dx / dt);
}

}  // namespace synchrony_lab::kinematics
