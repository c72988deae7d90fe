#pragma once

// Collapse-time probe for the absolute frame.
//
// The collapse time of a state with energy spread dE, observed from a frame
// moving at beta relative to the absolute frame, is modelled as
//   t_c = gamma(beta) * hbar * E_p / dE^2.
// It is shortest in the absolute frame, so fitting the gamma shape to
// measurements taken at several lab velocities locates that frame.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace synchrony_lab::probe {

struct CollapseModel {
  double hbar = 6.582119569e-16;     ///< eV s
  double planck_energy = 1.22e28;    ///< eV (1.22e19 GeV)
  std::string unit_system = "eV-s";

  /// Throws InvalidArgument unless both constants are positive and finite.
  void validate() const;
};

struct CollapseSample {
  double delta_e = 1.0;  ///< energy spread, > 0
  double beta = 0.0;     ///< lab velocity relative to the hypothesised frame
  double t_c = 1.0;      ///< measured collapse time, > 0
  double sigma = 0.0;    ///< noise scale of t_c; 0 when unknown
};

double lorentz_factor(double beta);

/// gamma(beta) hbar E_p / delta_e^2. Throws DomainError if delta_e <= 0.
double collapse_time(const CollapseModel& model, double delta_e, double beta);

struct FitPoint {
  double beta = 0.0;      ///< candidate absolute-frame velocity
  double scale = 0.0;     ///< least-squares amplitude A at this candidate
  double residual = 0.0;  ///< weighted sum of squared residuals
};

struct FitReport {
  double beta_hat = 0.0;
  std::size_t grid_index = 0;  ///< best grid point before refinement
  double scale = 0.0;          ///< fitted hbar*E_p (times any hidden prefactor)
  bool refined = false;
  bool weighted = false;
  std::string composition = "relativistic (u - b)/(1 - u b) via Lorentz legs";
  std::vector<FitPoint> curve;

  /// Collapse time the fitted model predicts for a lab moving at lab_beta.
  double predict(double delta_e, double lab_beta) const;
};

/// Evenly spaced grid from lo while <= hi (within rounding).
std::vector<double> make_grid(double lo, double hi, double step);

/// Grid search over candidate absolute-frame velocities, then one parabolic
/// refinement step through the best point and its neighbours.
/// Throws IllConditioned if the samples cover fewer than 3 distinct lab
/// velocities, InvalidArgument on a malformed grid or sample.
FitReport estimate_absolute_frame(std::span<const CollapseSample> samples,
                                  std::span<const double> beta_grid);

}  // namespace synchrony_lab::probe
