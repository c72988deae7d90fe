#pragma once

// Exact discrete-event simulation of clock synchronization on a 1D lattice
// of clocks carried by a frame moving at beta through the absolute frame.
//
// Ground truth lives in absolute-frame coordinates. Node i follows the
// worldline x(t) = xi0_i + beta t and its clock reads
//   rate * t + skew_i + offset_i
// with rate = sqrt(1 - beta^2). Instantaneous signals arrive at the same
// absolute time they are emitted.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "synchrony_lab/kinematics.hpp"

namespace synchrony_lab::syncsim {

using NodeId = std::size_t;
using kinematics::Event;
using kinematics::FrameSpec;
using kinematics::Speed;

enum class SignalKind { kLight, kSuperluminalFinite, kInstantaneous };

/// A signal type together with its absolute-frame speed.
class Signal {
 public:
  static Signal light() noexcept { return Signal(SignalKind::kLight, 1.0); }
  static Signal instantaneous() noexcept { return Signal(SignalKind::kInstantaneous, 0.0); }
  /// Any positive finite absolute-frame speed.
  static Signal finite(double speed);

  SignalKind kind() const noexcept { return kind_; }
  Speed absolute_speed() const;

 private:
  Signal(SignalKind kind, double speed) : kind_(kind), speed_(speed) {}

  SignalKind kind_;
  double speed_;
};

enum class Protocol { kEinstein, kSuperluminal, kExternalRegulation };
enum class MeasureDirection { kPlusX, kMinusX, kTwoWay };

std::string_view to_string(SignalKind kind) noexcept;
std::string_view to_string(Protocol protocol) noexcept;
std::string_view to_string(MeasureDirection direction) noexcept;
std::optional<SignalKind> parse_signal_kind(std::string_view text) noexcept;
std::optional<Protocol> parse_protocol(std::string_view text) noexcept;

struct ClockNode {
  NodeId id = 0;
  double xi0 = 0.0;     ///< absolute position at absolute time 0
  double offset = 0.0;  ///< correction written by a protocol
  double rate = 1.0;    ///< clock ticks per unit of absolute time
  double skew = 0.0;    ///< free-running phase before any correction
};

struct SignalRecord {
  SignalKind kind = SignalKind::kLight;
  NodeId from = 0;
  NodeId to = 0;
  Event emit;
  Event absorb;
  Speed speed_abs = Speed::infinite();
};

struct SpeedMeasurement {
  MeasureDirection direction = MeasureDirection::kPlusX;
  SignalKind kind = SignalKind::kLight;
  NodeId from = 0;
  NodeId to = 0;
  double distance = 0.0;  ///< frame-chart length, > 0
  double elapsed = 0.0;   ///< frame-chart clock difference
  Speed speed = Speed::infinite();
};

class ClockLattice {
 public:
  /// Throws InvalidArgument unless there are >= 2 strictly increasing
  /// finite positions and `skews` is empty or matches `positions` in size.
  ClockLattice(double beta, std::vector<double> positions, std::vector<double> skews = {});

  /// k is undefined until a protocol has run; frame().k() is 0 before that.
  const FrameSpec& frame() const noexcept { return frame_; }
  double beta() const noexcept { return frame_.beta(); }
  std::span<const ClockNode> nodes() const noexcept { return nodes_; }
  const ClockNode& node(NodeId id) const;
  std::span<const SignalRecord> log() const noexcept { return log_; }
  std::optional<Protocol> protocol() const noexcept { return protocol_; }
  bool synchronized() const noexcept { return protocol_.has_value(); }

  /// Absolute time of the latest absorption in the log, or 0.
  double now() const noexcept { return now_; }

  double position(NodeId id, double t_abs) const;
  double reading(NodeId id, double t_abs) const;
  /// Node separation measured with rulers comoving with the frame.
  double frame_distance(NodeId a, NodeId b) const;

  void append(SignalRecord record);
  void set_offset(NodeId id, double offset);
  void reset_offsets() noexcept;
  void mark_synchronized(Protocol protocol, double k);

 private:
  FrameSpec frame_;
  std::vector<ClockNode> nodes_;
  std::vector<SignalRecord> log_;
  std::optional<Protocol> protocol_;
  double now_ = 0.0;
};

/// Send one signal from `from` to `to`, emitted at `emit_t` (absolute time,
/// default lattice.now()). The record is appended to the lattice log.
/// Throws UnresolvableChase if the signal cannot catch a receding node.
SignalRecord propagate(ClockLattice& lattice, NodeId from, NodeId to, const Signal& signal,
                       std::optional<double> emit_t = std::nullopt);

/// Returns a copy of `lattice` with offsets reset and then set by the
/// protocol. Every slave syncs directly against `master`.
///  - einstein: light exchange, slave reads emit + round-trip/2 at reflection.
///  - superluminal: instantaneous broadcast of the master reading.
///  - external-regulation: copy readings from an Einstein-synchronized
///    lattice at rest in the absolute frame at coincidence events.
ClockLattice run_protocol(ClockLattice lattice, Protocol protocol, NodeId master = 0);

/// Throws NotSynchronized if no protocol has run.
SpeedMeasurement measure_one_way(ClockLattice& lattice, NodeId from, NodeId to,
                                 const Signal& signal);

/// Out-and-back measurement on the `from` clock alone.
SpeedMeasurement measure_two_way(ClockLattice& lattice, NodeId from, NodeId to,
                                 const Signal& signal);

struct AnisotropyRow {
  double beta = 0.0;
  Speed c_plus = Speed::infinite();
  Speed c_minus = Speed::infinite();
  double anisotropy = 0.0;  ///< c_plus - c_minus
};

/// For each beta: build a lattice at `positions`, run superluminal sync and
/// measure light speed from the first to the last node and back.
std::vector<AnisotropyRow> isotropy_scan(std::span<const double> betas,
                                         std::span<const double> positions);

/// Index of the row with the smallest |anisotropy|; first one on ties.
std::size_t argmin_abs_anisotropy(std::span<const AnisotropyRow> rows);

}  // namespace synchrony_lab::syncsim
