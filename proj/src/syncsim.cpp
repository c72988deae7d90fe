#include "synchrony_lab/syncsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "synchrony_lab/error.hpp"

namespace synchrony_lab::syncsim {
namespace {

constexpr std::string_view kFrameLabel = "lattice";

// Clock differences below this many ulps of the readings involved count as zero.
constexpr double kSimultaneityUlps = 64.0;

bool is_zero_interval(double elapsed, double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(elapsed) <= kSimultaneityUlps * std::numeric_limits<double>::epsilon() * scale;
}

Speed speed_from(double distance, double elapsed, double reading_a, double reading_b) {
  if (is_zero_interval(elapsed, reading_a, reading_b)) {
    return Speed::infinite(1);
  }
  return Speed::finite(distance / elapsed);
}

void require_distinct(const ClockLattice& lattice, NodeId from, NodeId to) {
  lattice.node(from);
  lattice.node(to);
  if (from == to) {
    throw InvalidArgument("signal endpoints must be distinct nodes");
  }
}

// Reference clocks at rest in the absolute frame, placed where each lattice
// node will be at its scheduled coincidence time.
struct RegulationPlan {
  ClockLattice reference;
  std::vector<double> coincidence_t;
};

RegulationPlan plan_regulation(const ClockLattice& lattice) {
  const auto nodes = lattice.nodes();
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    min_gap = std::min(min_gap, nodes[i].xi0 - nodes[i - 1].xi0);
  }
  // Spacing the coincidences by a quarter of the smallest gap keeps the
  // reference positions strictly increasing for any |beta| < 1.
  const double spacing = 0.25 * min_gap;
  const double start = lattice.now() + 1.0;

  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> skews;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t = start + spacing * static_cast<double>(i);
    times.push_back(t);
    positions.push_back(lattice.position(i, t));
    skews.push_back(0.25 * static_cast<double>(i + 1));
  }
  ClockLattice reference(0.0, std::move(positions), std::move(skews));
  return {run_protocol(std::move(reference), Protocol::kEinstein, 0), std::move(times)};
}

void sync_einstein(ClockLattice& lattice, NodeId master) {
  for (NodeId slave = 0; slave < lattice.nodes().size(); ++slave) {
    if (slave == master) {
      continue;
    }
    const SignalRecord out = propagate(lattice, master, slave, Signal::light());
    const SignalRecord back = propagate(lattice, slave, master, Signal::light(), out.absorb.t);
    const double emitted = lattice.reading(master, out.emit.t);
    const double returned = lattice.reading(master, back.absorb.t);
    const double target = emitted + 0.5 * (returned - emitted);
    const ClockNode& node = lattice.node(slave);
    lattice.set_offset(slave, target - (node.rate * out.absorb.t + node.skew));
  }
  lattice.mark_synchronized(Protocol::kEinstein, 0.0);
}

void sync_superluminal(ClockLattice& lattice, NodeId master) {
  for (NodeId slave = 0; slave < lattice.nodes().size(); ++slave) {
    if (slave == master) {
      continue;
    }
    const SignalRecord rec = propagate(lattice, master, slave, Signal::instantaneous());
    const double target = lattice.reading(master, rec.emit.t);
    const ClockNode& node = lattice.node(slave);
    lattice.set_offset(slave, target - (node.rate * rec.absorb.t + node.skew));
  }
  lattice.mark_synchronized(Protocol::kSuperluminal,
                            kinematics::induced_synchrony(0.0, lattice.beta()));
}

void sync_external(ClockLattice& lattice, NodeId master) {
  const RegulationPlan plan = plan_regulation(lattice);
  const double master_t = plan.coincidence_t[master];
  const double master_reading = lattice.reading(master, master_t);
  const double master_reference = plan.reference.reading(master, master_t);
  const double rate = lattice.node(master).rate;

  for (NodeId slave = 0; slave < lattice.nodes().size(); ++slave) {
    if (slave == master) {
      continue;
    }
    const double t = plan.coincidence_t[slave];
    const double reference_reading = plan.reference.reading(slave, t);
    const double target = master_reading + rate * (reference_reading - master_reference);
    const ClockNode& node = lattice.node(slave);
    lattice.set_offset(slave, target - (node.rate * t + node.skew));
  }
  lattice.mark_synchronized(Protocol::kExternalRegulation,
                            kinematics::induced_synchrony(0.0, lattice.beta()));
}

}  // namespace

Signal Signal::finite(double speed) {
  if (!std::isfinite(speed) || speed <= 0.0) {
    throw InvalidArgument(fmt::format("signal speed must be positive and finite, got {}", speed));
  }
  return Signal(SignalKind::kSuperluminalFinite, speed);
}

Speed Signal::absolute_speed() const {
  if (kind_ == SignalKind::kInstantaneous) {
    return Speed::infinite();
  }
  return Speed::finite(speed_);
}

std::string_view to_string(SignalKind kind) noexcept {
  switch (kind) {
    case SignalKind::kLight:
      return "light";
    case SignalKind::kSuperluminalFinite:
      return "superluminal-finite";
    case SignalKind::kInstantaneous:
      return "instantaneous";
  }
  return "unknown";
}

std::string_view to_string(Protocol protocol) noexcept {
  switch (protocol) {
    case Protocol::kEinstein:
      return "einstein";
    case Protocol::kSuperluminal:
      return "superluminal";
    case Protocol::kExternalRegulation:
      return "external-regulation";
  }
  return "unknown";
}

std::string_view to_string(MeasureDirection direction) noexcept {
  switch (direction) {
    case MeasureDirection::kPlusX:
      return "+x";
    case MeasureDirection::kMinusX:
      return "-x";
    case MeasureDirection::kTwoWay:
      return "two-way";
  }
  return "unknown";
}

std::optional<SignalKind> parse_signal_kind(std::string_view text) noexcept {
  for (auto kind : {SignalKind::kLight, SignalKind::kSuperluminalFinite, SignalKind::kInstantaneous}) {
    if (text == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

std::optional<Protocol> parse_protocol(std::string_view text) noexcept {
  for (auto p : {Protocol::kEinstein, Protocol::kSuperluminal, Protocol::kExternalRegulation}) {
    if (text == to_string(p)) {
      return p;
    }
  }
  return std::nullopt;
}

ClockLattice::ClockLattice(double beta, std::vector<double> positions, std::vector<double> skews)
    : frame_(beta, 0.0, std::string(kFrameLabel)) {
  if (positions.size() < 2) {
    throw InvalidArgument("a lattice needs at least 2 nodes");
  }
  if (!skews.empty() && skews.size() != positions.size()) {
    throw InvalidArgument(fmt::format("got {} clock skews for {} nodes", skews.size(),
                                      positions.size()));
  }
  const double rate = std::sqrt(1.0 - beta * beta);
  nodes_.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!std::isfinite(positions[i])) {
      throw InvalidArgument("node positions must be finite");
    }
    if (i > 0 && !(positions[i] > positions[i - 1])) {
      throw InvalidArgument("node positions must be strictly increasing");
    }
    const double skew = skews.empty() ? 0.0 : skews[i];
    if (!std::isfinite(skew)) {
      throw InvalidArgument("clock skews must be finite");
    }
    nodes_.push_back(ClockNode{i, positions[i], 0.0, rate, skew});
  }
}

const ClockNode& ClockLattice::node(NodeId id) const {
  if (id >= nodes_.size()) {
    throw InvalidArgument(fmt::format("no node {} in a lattice of {}", id, nodes_.size()));
  }
  return nodes_[id];
}

double ClockLattice::position(NodeId id, double t_abs) const {
  return node(id).xi0 + beta() * t_abs;
}

double ClockLattice::reading(NodeId id, double t_abs) const {
  const ClockNode& n = node(id);
  return n.rate * t_abs + n.skew + n.offset;
}

double ClockLattice::frame_distance(NodeId a, NodeId b) const {
  return std::abs(node(b).xi0 - node(a).xi0) / node(a).rate;
}

void ClockLattice::append(SignalRecord record) {
  now_ = std::max(now_, record.absorb.t);
  log_.push_back(std::move(record));
}

void ClockLattice::set_offset(NodeId id, double offset) {
  node(id);
  if (!std::isfinite(offset)) {
    throw InvalidArgument("clock offset must be finite");
  }
  nodes_[id].offset = offset;
}

void ClockLattice::reset_offsets() noexcept {
  for (auto& n : nodes_) {
    n.offset = 0.0;
  }
  protocol_.reset();
  frame_ = frame_.with_k(0.0);
}

void ClockLattice::mark_synchronized(Protocol protocol, double k) {
  frame_ = frame_.with_k(k);
  protocol_ = protocol;
}

SignalRecord propagate(ClockLattice& lattice, NodeId from, NodeId to, const Signal& signal,
                       std::optional<double> emit_t) {
  require_distinct(lattice, from, to);
  const double t_emit = emit_t.value_or(lattice.now());
  if (!std::isfinite(t_emit)) {
    throw InvalidArgument("emission time must be finite");
  }
  const double gap = lattice.node(to).xi0 - lattice.node(from).xi0;
  const int heading = gap > 0.0 ? 1 : -1;

  SignalRecord record;
  record.kind = signal.kind();
  record.from = from;
  record.to = to;
  record.emit = Event{t_emit, lattice.position(from, t_emit), 0.0, 0.0,
                      std::string(kinematics::kAbsoluteChart)};

  double t_absorb = t_emit;
  if (signal.kind() == SignalKind::kInstantaneous) {
    record.speed_abs = Speed::infinite(heading);
  } else {
    const double speed = signal.absolute_speed().value();
    // Emitter and receiver share velocity beta, so the gap is constant and the
    // closing speed is speed - heading*beta.
    const double closing = speed - heading * lattice.beta();
    if (!(closing > 0.0)) {
      throw UnresolvableChase(speed, lattice.beta());
    }
    t_absorb = t_emit + std::abs(gap) / closing;
    record.speed_abs = Speed::finite(heading * speed);
  }
  record.absorb = Event{t_absorb, lattice.position(to, t_absorb), 0.0, 0.0,
                        std::string(kinematics::kAbsoluteChart)};
  lattice.append(record);
  return record;
}

ClockLattice run_protocol(ClockLattice lattice, Protocol protocol, NodeId master) {
  lattice.node(master);
  lattice.reset_offsets();
  switch (protocol) {
    case Protocol::kEinstein:
      sync_einstein(lattice, master);
      break;
    case Protocol::kSuperluminal:
      sync_superluminal(lattice, master);
      break;
    case Protocol::kExternalRegulation:
      sync_external(lattice, master);
      break;
  }
  return lattice;
}

SpeedMeasurement measure_one_way(ClockLattice& lattice, NodeId from, NodeId to,
                                 const Signal& signal) {
  if (!lattice.synchronized()) {
    throw NotSynchronized();
  }
  const SignalRecord rec = propagate(lattice, from, to, signal);
  const double emitted = lattice.reading(from, rec.emit.t);
  const double absorbed = lattice.reading(to, rec.absorb.t);

  SpeedMeasurement m;
  m.direction = lattice.node(to).xi0 > lattice.node(from).xi0 ? MeasureDirection::kPlusX
                                                               : MeasureDirection::kMinusX;
  m.kind = signal.kind();
  m.from = from;
  m.to = to;
  m.distance = lattice.frame_distance(from, to);
  m.elapsed = absorbed - emitted;
  m.speed = speed_from(m.distance, m.elapsed, emitted, absorbed);
  return m;
}

SpeedMeasurement measure_two_way(ClockLattice& lattice, NodeId from, NodeId to,
                                 const Signal& signal) {
  const SignalRecord out = propagate(lattice, from, to, signal);
  const SignalRecord back = propagate(lattice, to, from, signal, out.absorb.t);
  const double emitted = lattice.reading(from, out.emit.t);
  const double returned = lattice.reading(from, back.absorb.t);

  SpeedMeasurement m;
  m.direction = MeasureDirection::kTwoWay;
  m.kind = signal.kind();
  m.from = from;
  m.to = to;
  m.distance = 2.0 * lattice.frame_distance(from, to);
  m.elapsed = returned - emitted;
  m.speed = speed_from(m.distance, m.elapsed, emitted, returned);
  return m;
}

std::vector<AnisotropyRow> isotropy_scan(std::span<const double> betas,
                                         std::span<const double> positions) {
  std::vector<AnisotropyRow> rows;
  rows.reserve(betas.size());
  const std::vector<double> layout(positions.begin(), positions.end());
  for (const double beta : betas) {
    ClockLattice lattice =
        run_protocol(ClockLattice(beta, layout), Protocol::kSuperluminal, 0);
    const NodeId last = lattice.nodes().size() - 1;
    const SpeedMeasurement forward = measure_one_way(lattice, 0, last, Signal::light());
    const SpeedMeasurement backward = measure_one_way(lattice, last, 0, Signal::light());
    rows.push_back(AnisotropyRow{beta, forward.speed, backward.speed,
                                 forward.speed.value() - backward.speed.value()});
  }
  return rows;
}

std::size_t argmin_abs_anisotropy(std::span<const AnisotropyRow> rows) {
  if (rows.empty()) {
    throw InvalidArgument("empty anisotropy table");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::abs(rows[i].anisotropy) < std::abs(rows[best].anisotropy)) {
      best = i;
    }
  }
  return best;
}

}  // namespace synchrony_lab::syncsim
