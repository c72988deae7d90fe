// synchrony-lab: batch front end for the transform, synchronization and
// probe machinery. Every run is deterministic given its flags (and --seed).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "synchrony_lab/error.hpp"
#include "synchrony_lab/io.hpp"
#include "synchrony_lab/kinematics.hpp"
#include "synchrony_lab/probe.hpp"
#include "synchrony_lab/syncsim.hpp"

namespace {

namespace kin = synchrony_lab::kinematics;
namespace sim = synchrony_lab::syncsim;
namespace io = synchrony_lab::io;
namespace probe = synchrony_lab::probe;
using synchrony_lab::Error;

constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIllConditioned = 4;
constexpr int kExitOther = 5;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string output = "json";
  int precision = 15;
};

std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::optional<double> si_light_speed() {
  const char* raw = std::getenv("SYNCHRONY_LAB_C");
  if (raw == nullptr || *raw == '\0') {
    return std::nullopt;
  }
  char* end = nullptr;
  const double c = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(c > 0.0) || !std::isfinite(c)) {
    throw UsageError(fmt::format("SYNCHRONY_LAB_C must be a positive number, got '{}'", raw));
  }
  return c;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw UsageError(fmt::format("{}: '{}' is not a number", what, item));
    }
    values.push_back(v);
  }
  return values;
}

kin::Event parse_event(const std::string& text, const std::string& chart) {
  const auto v = parse_list(text, "--event");
  if (v.size() != 2 && v.size() != 4) {
    throw UsageError("--event expects t,x or t,x,y,z");
  }
  return kin::Event{v[0], v[1], v.size() == 4 ? v[2] : 0.0, v.size() == 4 ? v[3] : 0.0, chart};
}

kin::FrameSpec parse_frame(const std::string& text, const std::string& label) {
  const auto v = parse_list(text, "frame");
  if (v.size() != 2) {
    throw UsageError("frames are given as beta,k");
  }
  return kin::FrameSpec(v[0], v[1], label);
}

// ---------------------------------------------------------------------------
// transform

struct TransformArgs {
  std::string event;
  std::optional<double> beta;
  double k = 0.0;
  std::optional<double> k_prime;
  std::string preset;
  std::string from_frame;
  std::string to_frame;
};

std::string event_json(const kin::Event& e, int p, std::optional<double> c) {
  std::string out = fmt::format("{{\"chart\":{},\"t\":{},\"x\":{},\"y\":{},\"z\":{}", quoted(e.chart),
                                io::format_number(e.t, p), io::format_number(e.x, p),
                                io::format_number(e.y, p), io::format_number(e.z, p));
  if (c) {
    out += fmt::format(",\"x_si\":{},\"y_si\":{},\"z_si\":{}", io::format_number(e.x * *c, p),
                       io::format_number(e.y * *c, p), io::format_number(e.z * *c, p));
  }
  return out + "}";
}

int cmd_transform(const TransformArgs& args, const Common& common) {
  const int p = common.precision;
  const bool between = !args.from_frame.empty() || !args.to_frame.empty();
  if (between && (args.from_frame.empty() || args.to_frame.empty())) {
    throw UsageError("--from-frame and --to-frame must be given together");
  }

  kin::TransformCoeffs coeffs;
  kin::Event source;
  kin::Event image;
  std::string parameters;
  if (between) {
    const kin::FrameSpec from = parse_frame(args.from_frame, "from");
    const kin::FrameSpec to = parse_frame(args.to_frame, "to");
    source = parse_event(args.event, from.label());
    coeffs = kin::between_coeffs(from, to);
    image = kin::transform_between(source, from, to);
    parameters = fmt::format("\"from\":{{\"beta\":{},\"k\":{}}},\"to\":{{\"beta\":{},\"k\":{}}}",
                             io::format_number(from.beta(), p), io::format_number(from.k(), p),
                             io::format_number(to.beta(), p), io::format_number(to.k(), p));
  } else {
    if (!args.beta) {
      throw UsageError("--beta is required");
    }
    const double beta = *args.beta;
    double k = args.k;
    double k_prime = args.k_prime.value_or(0.0);
    if (args.preset == "lorentz") {
      k = 0.0;
      k_prime = 0.0;
    } else if (args.preset == "superluminal") {
      k = 0.0;
      k_prime = kin::induced_synchrony(0.0, beta);
    } else if (!args.preset.empty()) {
      throw UsageError(fmt::format("unknown preset '{}'", args.preset));
    }
    source = parse_event(args.event, std::string(kin::kAbsoluteChart));
    coeffs = kin::edwards_coeffs(beta, k, k_prime);
    image = coeffs.apply(source, "S'");
    parameters = fmt::format("\"beta\":{},\"k\":{},\"k_prime\":{}", io::format_number(beta, p),
                             io::format_number(k, p), io::format_number(k_prime, p));
  }

  if (common.output == "csv") {
    std::cout << "role,chart,t,x,y,z\n";
    for (const auto& [role, e] : {std::pair{"source", source}, std::pair{"image", image}}) {
      std::cout << fmt::format("{},{},{},{},{},{}\n", role, e.chart, io::format_number(e.t, p),
                               io::format_number(e.x, p), io::format_number(e.y, p),
                               io::format_number(e.z, p));
    }
    return 0;
  }
  const auto c = si_light_speed();
  std::cout << fmt::format(
      "{{\"source\":{},\"image\":{},{},\"coefficients\":{{\"a_tt\":{},\"a_tx\":{},\"a_xt\":{},"
      "\"a_xx\":{}}}{}}}\n",
      event_json(source, p, c), event_json(image, p, c), parameters,
      io::format_number(coeffs.a_tt, p), io::format_number(coeffs.a_tx, p),
      io::format_number(coeffs.a_xt, p), io::format_number(coeffs.a_xx, p),
      c ? fmt::format(",\"c\":{}", io::format_number(*c, p)) : std::string());
  return 0;
}

// ---------------------------------------------------------------------------
// sync / oneway

void report_run(const sim::ClockLattice& synced, const std::vector<io::SignalRequest>& plan,
                const Common& common, const std::string& offsets_csv) {
  const int p = common.precision;
  const sim::Protocol protocol = *synced.protocol();
  sim::ClockLattice lattice = synced;

  std::vector<sim::SpeedMeasurement> results;
  for (const auto& request : plan) {
    results.push_back(request.two_way
                          ? sim::measure_two_way(lattice, request.from, request.to, request.signal)
                          : sim::measure_one_way(lattice, request.from, request.to, request.signal));
  }

  if (!offsets_csv.empty()) {
    std::ofstream out(offsets_csv);
    if (!out) {
      throw UsageError(fmt::format("cannot write '{}'", offsets_csv));
    }
    out << "node,xi0,offset\n";
    for (const auto& n : lattice.nodes()) {
      out << n.id << ',' << io::format_number(n.xi0, p) << ',' << io::format_fixed(n.offset, p)
          << '\n';
    }
  }

  if (common.output == "csv") {
    std::cout << io::kMeasurementCsvHeader << '\n';
    for (const auto& m : results) {
      std::cout << io::measurement_csv_row(lattice.beta(), protocol, m, p) << '\n';
    }
    return;
  }
  std::cout << fmt::format("{{\"record\":\"lattice\",\"beta\":{},\"protocol\":\"{}\",\"k\":{},"
                           "\"nodes\":{}}}\n",
                           io::format_number(lattice.beta(), p), sim::to_string(protocol),
                           io::format_number(lattice.frame().k(), p), lattice.nodes().size());
  for (const auto& n : lattice.nodes()) {
    std::cout << fmt::format("{{\"record\":\"offset\",\"node\":{},\"xi0\":{},\"offset\":{}}}\n",
                             n.id, io::format_number(n.xi0, p), io::format_fixed(n.offset, p));
  }
  const auto c = si_light_speed();
  for (const auto& m : results) {
    std::string line = io::measurement_json_line(lattice.beta(), protocol, m, p);
    if (c && !m.speed.is_infinite()) {
      line.pop_back();
      line += fmt::format(",\"speed_si\":{}}}", io::format_number(m.speed.value() * *c, p));
    }
    std::cout << line << '\n';
  }
}

sim::Protocol protocol_from(const std::string& text) {
  const auto protocol = sim::parse_protocol(text);
  if (!protocol) {
    throw UsageError(fmt::format("unknown protocol '{}'", text));
  }
  return *protocol;
}

int cmd_sync(const std::string& scenario_path, const std::string& protocol_override,
             const std::string& offsets_csv, const Common& common) {
  const io::Scenario scenario = io::load_scenario(scenario_path);
  std::optional<sim::Protocol> protocol = scenario.protocol;
  if (!protocol_override.empty()) {
    protocol = protocol_from(protocol_override);
  }
  if (!protocol) {
    throw UsageError("no protocol in the scenario and none given with --protocol");
  }
  const auto plan = scenario.signals.empty()
                        ? io::default_signal_plan(scenario.node_positions.size())
                        : scenario.signals;
  report_run(sim::run_protocol(scenario.make_lattice(), *protocol, scenario.master), plan, common,
             offsets_csv);
  return 0;
}

struct OneWayArgs {
  double beta = 0.0;
  std::string protocol = "einstein";
  double distance = 1.0;
  std::string kind = "light";
  std::optional<double> speed;
};

int cmd_oneway(const OneWayArgs& args, const Common& common) {
  if (!(args.distance > 0.0)) {
    throw UsageError("--distance must be positive");
  }
  const auto kind = sim::parse_signal_kind(args.kind);
  if (!kind) {
    throw UsageError(fmt::format("unknown signal kind '{}'", args.kind));
  }
  sim::Signal signal = sim::Signal::light();
  if (*kind == sim::SignalKind::kInstantaneous) {
    signal = sim::Signal::instantaneous();
  } else if (*kind == sim::SignalKind::kSuperluminalFinite) {
    if (!args.speed) {
      throw UsageError("--speed is required for superluminal-finite signals");
    }
    signal = sim::Signal::finite(*args.speed);
  }
  const std::vector<io::SignalRequest> plan{
      {0, 1, signal, false}, {1, 0, signal, false}, {0, 1, signal, true}};
  sim::ClockLattice lattice(args.beta, {0.0, args.distance});
  report_run(sim::run_protocol(std::move(lattice), protocol_from(args.protocol), 0), plan, common,
             {});
  return 0;
}

// ---------------------------------------------------------------------------
// scan

int cmd_scan(double beta_min, double beta_max, double step, double distance,
             const Common& common) {
  if (!(step > 0.0)) {
    throw UsageError("--step must be positive");
  }
  if (!(beta_min > -1.0) || !(beta_max < 1.0) || beta_max < beta_min) {
    throw UsageError("scan range must satisfy -1 < beta-min <= beta-max < 1");
  }
  if (!(distance > 0.0)) {
    throw UsageError("--distance must be positive");
  }
  const std::vector<double> betas = probe::make_grid(beta_min, beta_max, step);
  const std::vector<double> positions{0.0, distance};
  const auto rows = sim::isotropy_scan(betas, positions);
  const auto best = rows[sim::argmin_abs_anisotropy(rows)];
  const int p = common.precision;

  if (common.output == "json") {
    for (const auto& r : rows) {
      std::cout << fmt::format(
          "{{\"record\":\"scan\",\"beta\":{},\"c_plus\":{},\"c_minus\":{},\"anisotropy\":{}}}\n",
          io::format_number(r.beta, p), io::format_speed(r.c_plus, p),
          io::format_speed(r.c_minus, p), io::format_number(r.anisotropy, p));
    }
    std::cout << fmt::format("{{\"record\":\"argmin\",\"beta\":{},\"anisotropy\":{}}}\n",
                             io::format_number(best.beta, p),
                             io::format_number(best.anisotropy, p));
    return 0;
  }
  std::cout << "beta,c_plus,c_minus,anisotropy\n";
  for (const auto& r : rows) {
    std::cout << fmt::format("{},{},{},{}\n", io::format_number(r.beta, p),
                             io::format_speed(r.c_plus, p), io::format_speed(r.c_minus, p),
                             io::format_number(r.anisotropy, p));
  }
  std::cout << fmt::format("argmin,{},,{}\n", io::format_number(best.beta, p),
                           io::format_number(best.anisotropy, p));
  return 0;
}

// ---------------------------------------------------------------------------
// probe

struct ProbeArgs {
  std::string samples;
  std::optional<double> synthesize;
  std::size_t count = 100;
  double u_min = -0.8;
  double u_max = 0.8;
  double delta_e = 1.0;
  double noise = 0.0;
  std::optional<std::uint64_t> seed;
  std::string write_samples;
  double grid_min = -0.9;
  double grid_max = 0.9;
  double grid_step = 0.01;
  probe::CollapseModel model;
};

std::vector<probe::CollapseSample> synthesize(const ProbeArgs& args) {
  const double beta0 = *args.synthesize;
  if (args.count < 3) {
    throw UsageError("--count must be at least 3");
  }
  if (!(args.noise >= 0.0)) {
    throw UsageError("--noise must be >= 0");
  }
  if (args.noise > 0.0 && !args.seed) {
    throw UsageError("--seed is required when --noise > 0");
  }
  std::mt19937_64 rng(args.seed.value_or(0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const kin::FrameSpec absolute_frame(beta0, 0.0, "absolute");
  std::vector<probe::CollapseSample> samples;
  for (std::size_t i = 0; i < args.count; ++i) {
    const double u =
        args.u_min + (args.u_max - args.u_min) * static_cast<double>(i) /
                         static_cast<double>(args.count - 1);
    const double relative =
        kin::map_velocity(u, kin::FrameSpec::absolute(), absolute_frame).value();
    const double clean = probe::collapse_time(args.model, args.delta_e, relative);
    const double noisy = args.noise > 0.0 ? clean * (1.0 + args.noise * gauss(rng)) : clean;
    if (!(noisy > 0.0)) {
      throw UsageError("noise produced a non-positive collapse time; lower --noise");
    }
    samples.push_back(probe::CollapseSample{args.delta_e, u, noisy, args.noise * clean});
  }
  return samples;
}

int cmd_probe(const ProbeArgs& args, const Common& common) {
  args.model.validate();
  if (args.samples.empty() == !args.synthesize.has_value()) {
    throw UsageError("give exactly one of --samples or --synthesize");
  }
  const auto samples = args.synthesize ? synthesize(args) : io::load_samples(args.samples);
  const int p = common.precision;
  if (!args.write_samples.empty()) {
    std::ofstream out(args.write_samples);
    if (!out) {
      throw UsageError(fmt::format("cannot write '{}'", args.write_samples));
    }
    io::write_samples_csv(out, samples, 17);
  }

  const auto grid = probe::make_grid(args.grid_min, args.grid_max, args.grid_step);
  const probe::FitReport report = probe::estimate_absolute_frame(samples, grid);

  if (common.output == "csv") {
    std::cout << "beta,scale,residual\n";
    for (const auto& point : report.curve) {
      std::cout << fmt::format("{},{},{}\n", io::format_number(point.beta, p),
                               io::format_number(point.scale, p),
                               io::format_number(point.residual, p));
    }
    std::cout << fmt::format("beta_hat,{},\n", io::format_number(report.beta_hat, p));
    return 0;
  }
  std::string curve;
  for (const auto& point : report.curve) {
    curve += fmt::format("{}{{\"beta\":{},\"scale\":{},\"residual\":{}}}", curve.empty() ? "" : ",",
                         io::format_number(point.beta, p), io::format_number(point.scale, p),
                         io::format_number(point.residual, p));
  }
  std::cout << fmt::format(
      "{{\"beta_hat\":{},\"grid_index\":{},\"refined\":{},\"weighted\":{},\"scale\":{},"
      "\"samples\":{},\"composition\":{},\"constants\":{{\"hbar\":{},\"planck_energy\":{},"
      "\"unit_system\":{}}},\"residuals\":[{}]}}\n",
      io::format_number(report.beta_hat, p), report.grid_index, report.refined, report.weighted,
      io::format_number(report.scale, p), samples.size(), quoted(report.composition),
      io::format_number(args.model.hbar, p), io::format_number(args.model.planck_energy, p),
      quoted(args.model.unit_system), curve);
  return 0;
}

int exit_code_for(const std::string& code) {
  if (code == "degenerate_convention") return kExitDegenerate;
  if (code == "validation_error") return kExitValidation;
  if (code == "ill_conditioned") return kExitIllConditioned;
  if (code == "invalid_argument") return kExitUsage;
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchrony-convention kinematics, clock-sync simulation and frame probes"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--output", common.output, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--precision", common.precision, "significant digits")
        ->check(CLI::Range(1, 17));
  };

  TransformArgs transform;
  auto* transform_cmd = app.add_subcommand("transform", "Boost one event between charts");
  transform_cmd->add_option("--event", transform.event, "t,x[,y,z]")->required();
  transform_cmd->add_option("--beta", transform.beta, "velocity of the target frame");
  transform_cmd->add_option("--k", transform.k, "source synchrony parameter");
  transform_cmd->add_option("--k-prime", transform.k_prime, "target synchrony parameter");
  transform_cmd->add_option("--preset", transform.preset, "lorentz or superluminal");
  transform_cmd->add_option("--from-frame", transform.from_frame, "beta,k of the source frame");
  transform_cmd->add_option("--to-frame", transform.to_frame, "beta,k of the target frame");
  add_common(transform_cmd);

  std::string scenario_path;
  std::string protocol_override;
  std::string offsets_csv;
  auto* sync_cmd = app.add_subcommand("sync", "Synchronize a scenario lattice and measure");
  sync_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sync_cmd->add_option("--protocol", protocol_override,
                       "einstein, superluminal or external-regulation");
  sync_cmd->add_option("--offsets-csv", offsets_csv, "also write node offsets to this CSV");
  add_common(sync_cmd);

  OneWayArgs oneway;
  auto* oneway_cmd = app.add_subcommand("oneway", "Two-node one-way and two-way measurement");
  oneway_cmd->add_option("--beta", oneway.beta, "lattice velocity")->required();
  oneway_cmd->add_option("--protocol", oneway.protocol, "synchronization protocol");
  oneway_cmd->add_option("--distance", oneway.distance, "absolute node separation");
  oneway_cmd->add_option("--kind", oneway.kind, "light, superluminal-finite or instantaneous");
  oneway_cmd->add_option("--speed", oneway.speed, "absolute speed of a superluminal-finite signal");
  add_common(oneway_cmd);

  double beta_min = 0.0;
  double beta_max = 0.0;
  double step = 0.0;
  double distance = 1.0;
  auto* scan_cmd = app.add_subcommand("scan", "One-way anisotropy over candidate frames");
  scan_cmd->add_option("--beta-min", beta_min, "lowest candidate frame velocity")->required();
  scan_cmd->add_option("--beta-max", beta_max, "highest candidate frame velocity")->required();
  scan_cmd->add_option("--step", step, "candidate spacing")->required();
  scan_cmd->add_option("--distance", distance, "absolute node separation");
  add_common(scan_cmd);

  ProbeArgs probe_args;
  auto* probe_cmd = app.add_subcommand("probe", "Locate the absolute frame from collapse times");
  probe_cmd->add_option("--samples", probe_args.samples, "sample CSV file");
  probe_cmd->add_option("--synthesize", probe_args.synthesize,
                        "generate samples around this absolute-frame velocity");
  probe_cmd->add_option("--count", probe_args.count, "number of synthetic samples");
  probe_cmd->add_option("--u-min", probe_args.u_min, "lowest synthetic lab velocity");
  probe_cmd->add_option("--u-max", probe_args.u_max, "highest synthetic lab velocity");
  probe_cmd->add_option("--delta-e", probe_args.delta_e, "energy spread of synthetic samples (eV)");
  probe_cmd->add_option("--noise", probe_args.noise, "relative Gaussian noise on t_c");
  probe_cmd->add_option("--seed", probe_args.seed, "RNG seed, required with --noise");
  probe_cmd->add_option("--write-samples", probe_args.write_samples,
                        "also write the samples to this CSV");
  probe_cmd->add_option("--grid-min", probe_args.grid_min, "lowest candidate velocity");
  probe_cmd->add_option("--grid-max", probe_args.grid_max, "highest candidate velocity");
  probe_cmd->add_option("--grid-step", probe_args.grid_step, "candidate spacing");
  probe_cmd->add_option("--hbar", probe_args.model.hbar, "reduced Planck constant (eV s)");
  probe_cmd->add_option("--planck-energy", probe_args.model.planck_energy, "Planck energy (eV)");
  add_common(probe_cmd);

  // Scan is a table first and foremost.
  scan_cmd->preparse_callback([&common](std::size_t) { common.output = "csv"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage_error message=" << quoted(e.what()) << '\n';
    return kExitUsage;
  }

  try {
    if (*transform_cmd) return cmd_transform(transform, common);
    if (*sync_cmd) return cmd_sync(scenario_path, protocol_override, offsets_csv, common);
    if (*oneway_cmd) return cmd_oneway(oneway, common);
    if (*scan_cmd) return cmd_scan(beta_min, beta_max, step, distance, common);
    if (*probe_cmd) return cmd_probe(probe_args, common);
  } catch (const synchrony_lab::DegenerateConvention& e) {
    std::cerr << fmt::format("{} beta={} k={}\n", e.code(), e.beta(), e.k());
    return kExitDegenerate;
  } catch (const Error& e) {
    std::cerr << e.code() << " message=" << quoted(e.what()) << '\n';
    return exit_code_for(e.code());
  } catch (const UsageError& e) {
    std::cerr << "usage_error message=" << quoted(e.what()) << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
