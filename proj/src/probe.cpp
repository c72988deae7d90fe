#include "synchrony_lab/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "synchrony_lab/error.hpp"
#include "synchrony_lab/kinematics.hpp"

namespace synchrony_lab::probe {
namespace {

void validate_sample(const CollapseSample& s) {
  if (!(s.delta_e > 0.0) || !std::isfinite(s.delta_e)) {
    throw InvalidArgument(fmt::format("sample delta_E must be positive, got {}", s.delta_e));
  }
  if (!(s.t_c > 0.0) || !std::isfinite(s.t_c)) {
    throw InvalidArgument(fmt::format("sample t_c must be positive, got {}", s.t_c));
  }
  if (!std::isfinite(s.beta) || std::abs(s.beta) >= 1.0) {
    throw InvalidArgument(fmt::format("sample lab_beta must satisfy |beta| < 1, got {}", s.beta));
  }
  if (!std::isfinite(s.sigma) || s.sigma < 0.0) {
    throw InvalidArgument(fmt::format("sample sigma must be >= 0, got {}", s.sigma));
  }
}

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) {
    throw InvalidArgument("beta grid is empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || std::abs(grid[i]) >= 1.0) {
      throw InvalidArgument(fmt::format("grid value {} outside (-1, 1)", grid[i]));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument("beta grid must be strictly increasing");
    }
  }
}

struct Normalized {
  double y;       // t_c * dE^2
  double weight;
  double beta;
};

FitPoint fit_candidate(std::span<const Normalized> data, double candidate) {
  const kinematics::FrameSpec lab_rest = kinematics::FrameSpec::absolute();
  const kinematics::FrameSpec hypothesis(candidate, 0.0, "candidate");
  // gamma of each lab velocity relative to the candidate
  std::vector<double> shape;
  shape.reserve(data.size());
  double sgy = 0.0;
  double sgg = 0.0;
  for (const Normalized& d : data) {
    const double relative = kinematics::map_velocity(d.beta, lab_rest, hypothesis).value();
    const double g = lorentz_factor(relative);
    shape.push_back(g);
    sgy += d.weight * g * d.y;
    sgg += d.weight * g * g;
  }
  const double scale = sgy / sgg;
  double residual = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data[i].y - scale * shape[i];
    residual += data[i].weight * r * r;
  }
  return FitPoint{candidate, scale, residual};
}

}  // namespace

void CollapseModel::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar) || !(planck_energy > 0.0) ||
      !std::isfinite(planck_energy)) {
    throw InvalidArgument("collapse model constants must be positive and finite");
  }
}

double lorentz_factor(double beta) {
  if (!std::isfinite(beta) || std::abs(beta) >= 1.0) {
    throw InvalidArgument(fmt::format("|beta| < 1 required, got {}", beta));
  }
  return 1.0 / std::sqrt(1.0 - beta * beta);
}

double collapse_time(const CollapseModel& model, double delta_e, double beta) {
  model.validate();
  if (!(delta_e > 0.0) || !std::isfinite(delta_e)) {
    throw DomainError(fmt::format("energy spread must be positive, got {}", delta_e));
  }
  return lorentz_factor(beta) * model.hbar * model.planck_energy / (delta_e * delta_e);
}

double FitReport::predict(double delta_e, double lab_beta) const {
  if (!(delta_e > 0.0)) {
    throw DomainError(fmt::format("energy spread must be positive, got {}", delta_e));
  }
  const double relative = kinematics::map_velocity(lab_beta, kinematics::FrameSpec::absolute(),
                                                   kinematics::FrameSpec(beta_hat, 0.0, "fit"))
                              .value();
  return scale * lorentz_factor(relative) / (delta_e * delta_e);
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) || !(step > 0.0)) {
    throw InvalidArgument("grid bounds must be finite with a positive step");
  }
  if (hi < lo) {
    throw InvalidArgument(fmt::format("grid upper bound {} below lower bound {}", hi, lo));
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double value = lo + step * static_cast<double>(i);
    // Land exactly on zero when the grid crosses it.
    grid.push_back(std::abs(value) < 1e-9 * step ? 0.0 : value);
  }
  return grid;
}

FitReport estimate_absolute_frame(std::span<const CollapseSample> samples,
                                  std::span<const double> beta_grid) {
  validate_grid(beta_grid);
  std::set<double> velocities;
  bool all_sigma = !samples.empty();
  for (const CollapseSample& s : samples) {
    validate_sample(s);
    velocities.insert(s.beta);
    all_sigma = all_sigma && s.sigma > 0.0;
  }
  if (velocities.size() < 3) {
    throw IllConditioned(fmt::format(
        "samples span {} distinct lab velocities; at least 3 are needed", velocities.size()));
  }

  std::vector<Normalized> data;
  data.reserve(samples.size());
  for (const CollapseSample& s : samples) {
    const double e2 = s.delta_e * s.delta_e;
    const double weight = all_sigma ? 1.0 / ((s.sigma * e2) * (s.sigma * e2)) : 1.0;
    data.push_back(Normalized{s.t_c * e2, weight, s.beta});
  }

  FitReport report;
  report.weighted = all_sigma;
  report.curve.reserve(beta_grid.size());
  for (const double candidate : beta_grid) {
    report.curve.push_back(fit_candidate(data, candidate));
  }
  const auto best = std::min_element(
      report.curve.begin(), report.curve.end(),
      [](const FitPoint& a, const FitPoint& b) { return a.residual < b.residual; });
  report.grid_index = static_cast<std::size_t>(best - report.curve.begin());
  report.beta_hat = best->beta;
  report.scale = best->scale;

  const std::size_t i = report.grid_index;
  if (i > 0 && i + 1 < report.curve.size()) {
    const FitPoint& l = report.curve[i - 1];
    const FitPoint& m = report.curve[i];
    const FitPoint& r = report.curve[i + 1];
    const double dl = m.beta - l.beta;
    const double dr = m.beta - r.beta;
    const double numerator = dl * dl * (m.residual - r.residual) - dr * dr * (m.residual - l.residual);
    const double denominator = dl * (m.residual - r.residual) - dr * (m.residual - l.residual);
    if (denominator != 0.0 && std::isfinite(numerator / denominator)) {
      const double vertex = std::clamp(m.beta - 0.5 * numerator / denominator, l.beta, r.beta);
      const FitPoint at_vertex = fit_candidate(data, vertex);
      if (at_vertex.residual <= m.residual) {
        report.beta_hat = vertex;
        report.scale = at_vertex.scale;
        report.refined = true;
      }
    }
  }
  return report;
}

}  // namespace synchrony_lab::probe
