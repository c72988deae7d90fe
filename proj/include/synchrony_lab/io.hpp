#pragma once

// File formats shared by the CLI and external consumers.
//
// Scenario (JSON):
//   {"beta": 0.6, "node_positions": [0, 1], "protocol": "superluminal",
//    "master": 0, "clock_skews": [0, 0.3],
//    "signals": [{"from": 0, "to": 1, "kind": "light", "mode": "one-way"}]}
// `master`, `clock_skews` and `signals` are optional; `speed` is required for
// kind "superluminal-finite"; `mode` defaults to "one-way".
//
// Measurement CSV: beta,protocol,direction,distance,elapsed,speed
// Sample CSV:      delta_E,lab_beta,t_c,sigma

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synchrony_lab/probe.hpp"
#include "synchrony_lab/syncsim.hpp"

namespace synchrony_lab::io {

struct SignalRequest {
  syncsim::NodeId from = 0;
  syncsim::NodeId to = 1;
  syncsim::Signal signal = syncsim::Signal::light();
  bool two_way = false;
};

struct Scenario {
  double beta = 0.0;
  std::vector<double> node_positions;
  std::vector<double> clock_skews;
  std::optional<syncsim::Protocol> protocol;
  syncsim::NodeId master = 0;
  std::vector<SignalRequest> signals;

  syncsim::ClockLattice make_lattice() const;
};

/// Throws ValidationError naming the violated field or invariant.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::string& path);

/// Light in both directions between the first and last node, plus a two-way run.
std::vector<SignalRequest> default_signal_plan(std::size_t node_count);

/// printf-style %.{precision}g with "inf"/"-inf" for infinities.
std::string format_number(double value, int precision);
/// Fixed notation with `decimals` digits; negative zero prints as zero.
std::string format_fixed(double value, int decimals);
std::string format_speed(const kinematics::Speed& speed, int precision);

inline constexpr std::string_view kMeasurementCsvHeader =
    "beta,protocol,direction,distance,elapsed,speed";
inline constexpr std::string_view kSampleCsvHeader = "delta_E,lab_beta,t_c,sigma";

std::string measurement_csv_row(double beta, syncsim::Protocol protocol,
                                const syncsim::SpeedMeasurement& m, int precision);
std::string measurement_json_line(double beta, syncsim::Protocol protocol,
                                  const syncsim::SpeedMeasurement& m, int precision);

/// Header row is mandatory. Throws ValidationError on malformed input.
std::vector<probe::CollapseSample> read_samples_csv(std::istream& in);
std::vector<probe::CollapseSample> load_samples(const std::string& path);
void write_samples_csv(std::ostream& out, std::span<const probe::CollapseSample> samples,
                       int precision);

}  // namespace synchrony_lab::io
