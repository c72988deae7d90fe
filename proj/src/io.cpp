#include "synchrony_lab/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "synchrony_lab/error.hpp"

namespace synchrony_lab::io {
namespace {

using nlohmann::json;

double require_number(const json& node, const char* field) {
  if (!node.contains(field)) {
    throw ValidationError(fmt::format("missing field '{}'", field));
  }
  const json& value = node.at(field);
  if (!value.is_number()) {
    throw ValidationError(fmt::format("field '{}' must be a number", field));
  }
  return value.get<double>();
}

std::vector<double> number_array(const json& node, const char* field) {
  const json& value = node.at(field);
  if (!value.is_array()) {
    throw ValidationError(fmt::format("field '{}' must be an array", field));
  }
  std::vector<double> out;
  for (const json& item : value) {
    if (!item.is_number()) {
      throw ValidationError(fmt::format("field '{}' must contain only numbers", field));
    }
    out.push_back(item.get<double>());
  }
  return out;
}

syncsim::NodeId node_index(const json& node, const char* field, std::size_t node_count) {
  if (!node.contains(field) || !node.at(field).is_number_unsigned()) {
    throw ValidationError(fmt::format("signal field '{}' must be a node index", field));
  }
  const auto id = node.at(field).get<std::size_t>();
  if (id >= node_count) {
    throw ValidationError(fmt::format("signal field '{}'={} is not a node", field, id));
  }
  return id;
}

SignalRequest parse_signal(const json& node, std::size_t node_count) {
  if (!node.is_object()) {
    throw ValidationError("each signal must be an object");
  }
  SignalRequest request;
  request.from = node_index(node, "from", node_count);
  request.to = node_index(node, "to", node_count);
  if (request.from == request.to) {
    throw ValidationError("signal endpoints must be distinct nodes");
  }

  const std::string kind_text = node.value("kind", std::string("light"));
  const auto kind = syncsim::parse_signal_kind(kind_text);
  if (!kind) {
    throw ValidationError(fmt::format("unknown signal kind '{}'", kind_text));
  }
  switch (*kind) {
    case syncsim::SignalKind::kLight:
      request.signal = syncsim::Signal::light();
      break;
    case syncsim::SignalKind::kInstantaneous:
      request.signal = syncsim::Signal::instantaneous();
      break;
    case syncsim::SignalKind::kSuperluminalFinite: {
      const double speed = require_number(node, "speed");
      if (!(speed > 0.0) || !std::isfinite(speed)) {
        throw ValidationError("signal speed must be positive and finite");
      }
      request.signal = syncsim::Signal::finite(speed);
      break;
    }
  }

  const std::string mode = node.value("mode", std::string("one-way"));
  if (mode == "two-way") {
    request.two_way = true;
  } else if (mode != "one-way") {
    throw ValidationError(fmt::format("unknown signal mode '{}'", mode));
  }
  return request;
}

double parse_csv_double(const std::string& field, std::size_t line, const char* column) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size()) {
    throw ValidationError(
        fmt::format("line {}: column {} is not a number: '{}'", line, column, field));
  }
  return value;
}

}  // namespace

syncsim::ClockLattice Scenario::make_lattice() const {
  return syncsim::ClockLattice(beta, node_positions, clock_skews);
}

Scenario parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("scenario is not valid JSON: {}", e.what()));
  }
  if (!root.is_object()) {
    throw ValidationError("scenario must be a JSON object");
  }

  Scenario scenario;
  scenario.beta = require_number(root, "beta");
  if (!std::isfinite(scenario.beta) || std::abs(scenario.beta) >= 1.0) {
    throw ValidationError(fmt::format("beta={} violates |beta| < 1", scenario.beta));
  }
  if (!root.contains("node_positions")) {
    throw ValidationError("missing field 'node_positions'");
  }
  scenario.node_positions = number_array(root, "node_positions");
  if (scenario.node_positions.size() < 2) {
    throw ValidationError("node_positions needs at least 2 nodes");
  }
  for (std::size_t i = 1; i < scenario.node_positions.size(); ++i) {
    if (!(scenario.node_positions[i] > scenario.node_positions[i - 1])) {
      throw ValidationError("node_positions must be strictly increasing");
    }
  }
  if (root.contains("clock_skews")) {
    scenario.clock_skews = number_array(root, "clock_skews");
    if (scenario.clock_skews.size() != scenario.node_positions.size()) {
      throw ValidationError("clock_skews must have one entry per node");
    }
  }
  if (root.contains("protocol")) {
    if (!root.at("protocol").is_string()) {
      throw ValidationError("field 'protocol' must be a string");
    }
    const auto text = root.at("protocol").get<std::string>();
    scenario.protocol = syncsim::parse_protocol(text);
    if (!scenario.protocol) {
      throw ValidationError(fmt::format("unknown protocol '{}'", text));
    }
  }
  if (root.contains("master")) {
    scenario.master = node_index(root, "master", scenario.node_positions.size());
  }
  if (root.contains("signals")) {
    if (!root.at("signals").is_array()) {
      throw ValidationError("field 'signals' must be an array");
    }
    for (const json& item : root.at("signals")) {
      scenario.signals.push_back(parse_signal(item, scenario.node_positions.size()));
    }
  }

  try {
    scenario.make_lattice();
  } catch (const InvalidArgument& e) {
    throw ValidationError(e.what());
  }
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open scenario file '{}'", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::vector<SignalRequest> default_signal_plan(std::size_t node_count) {
  const syncsim::NodeId last = node_count - 1;
  return {
      SignalRequest{0, last, syncsim::Signal::light(), false},
      SignalRequest{last, 0, syncsim::Signal::light(), false},
      SignalRequest{0, last, syncsim::Signal::light(), true},
  };
}

std::string format_number(double value, int precision) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  if (value == 0.0) {
    value = 0.0;
  }
  return fmt::format("{:.{}g}", value, precision);
}

std::string format_fixed(double value, int decimals) {
  std::string text = fmt::format("{:.{}f}", value, decimals);
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) {
    text.erase(0, 1);
  }
  return text;
}

std::string format_speed(const kinematics::Speed& speed, int precision) {
  return format_number(speed.value(), precision);
}

std::string measurement_csv_row(double beta, syncsim::Protocol protocol,
                                const syncsim::SpeedMeasurement& m, int precision) {
  return fmt::format("{},{},{},{},{},{}", format_number(beta, precision),
                     syncsim::to_string(protocol), syncsim::to_string(m.direction),
                     format_number(m.distance, precision), format_number(m.elapsed, precision),
                     format_speed(m.speed, precision));
}

std::string measurement_json_line(double beta, syncsim::Protocol protocol,
                                  const syncsim::SpeedMeasurement& m, int precision) {
  const std::string speed = m.speed.is_infinite()
                                ? fmt::format("\"{}\"", format_speed(m.speed, precision))
                                : format_speed(m.speed, precision);
  return fmt::format(
      "{{\"record\":\"measurement\",\"beta\":{},\"protocol\":\"{}\",\"kind\":\"{}\","
      "\"from\":{},\"to\":{},\"direction\":\"{}\",\"distance\":{},\"elapsed\":{},\"speed\":{}}}",
      format_number(beta, precision), syncsim::to_string(protocol), syncsim::to_string(m.kind),
      m.from, m.to, syncsim::to_string(m.direction), format_number(m.distance, precision),
      format_number(m.elapsed, precision), speed);
}

std::vector<probe::CollapseSample> read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("sample file is empty; header row is mandatory");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != kSampleCsvHeader) {
    throw ValidationError(fmt::format("sample header must be '{}'", kSampleCsvHeader));
  }

  std::vector<probe::CollapseSample> samples;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) {
      fields.push_back(field);
    }
    if (line.back() == ',') {
      fields.emplace_back();
    }
    if (fields.size() != 3 && fields.size() != 4) {
      throw ValidationError(fmt::format("line {}: expected 4 columns, got {}", line_number,
                                        fields.size()));
    }
    probe::CollapseSample s;
    s.delta_e = parse_csv_double(fields[0], line_number, "delta_E");
    s.beta = parse_csv_double(fields[1], line_number, "lab_beta");
    s.t_c = parse_csv_double(fields[2], line_number, "t_c");
    if (fields.size() == 4 && !fields[3].empty()) {
      s.sigma = parse_csv_double(fields[3], line_number, "sigma");
    }
    if (!(s.delta_e > 0.0) || !(s.t_c > 0.0) || !(std::abs(s.beta) < 1.0) || s.sigma < 0.0) {
      throw ValidationError(fmt::format(
          "line {}: requires delta_E > 0, t_c > 0, |lab_beta| < 1, sigma >= 0", line_number));
    }
    samples.push_back(s);
  }
  return samples;
}

std::vector<probe::CollapseSample> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open sample file '{}'", path));
  }
  return read_samples_csv(in);
}

void write_samples_csv(std::ostream& out, std::span<const probe::CollapseSample> samples,
                       int precision) {
  out << kSampleCsvHeader << '\n';
  for (const auto& s : samples) {
    out << format_number(s.delta_e, precision) << ',' << format_number(s.beta, precision) << ','
        << format_number(s.t_c, precision) << ',' << format_number(s.sigma, precision) << '\n';
  }
}

}  // namespace synchrony_lab::io
