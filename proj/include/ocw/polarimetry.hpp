#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ocw/atomic_model.hpp"
#include "ocw/liouville.hpp"

namespace ocw {

// ---------------------------------------------------------------------------
// Jones calculus on the (x, y) basis. Circular unit vectors follow
//   sigma+ = -(x + i y)/sqrt(2),  sigma- = (x - i y)/sqrt(2).

using JonesVector = Eigen::Vector2cd;
using JonesMatrix = Eigen::Matrix2cd;

JonesVector sigma_plus_vector();
JonesVector sigma_minus_vector();

/// (E+, E-) components of a Jones vector on the circular basis.
std::pair<cplx, cplx> to_circular(const JonesVector& e);
JonesVector from_circular(cplx e_plus, cplx e_minus);

/// Circular components of a unit polarisation, as the (alpha, beta) pair
/// used for field polarisations.
Polarization polarization_of(const JonesVector& e);

JonesMatrix rotation(double angle);
/// Retarder with retardance theta, fast axis along x.
JonesMatrix retarder(double theta);
/// Retarder rotated by `axis`: R^-1(axis) J R(axis).
JonesMatrix rotated_retarder(double theta, double axis);
/// Linear polariser transmitting along `axis` (0 = x).
JonesMatrix polarizer(double axis);

/// |<a|b>| for unit vectors; 1 means equal up to a global phase.
double overlap(const JonesVector& a, const JonesVector& b);

// ---------------------------------------------------------------------------

struct MediumParams {
  double n_atom = 1e12;        // cm^-3
  double length_cm = 7.5;
  double lambda_nm = 1323.0;   // signal wavelength
  double gamma = 0.6;          // decay rate entering beta, units of gamma_a
  double omega_min = 0.1;      // Rabi frequency of the weakest signal transition, gamma_a
  double b_min_sq = 1.0 / 12;  // decay fraction along the weakest signal channel

  double k_per_cm() const;
  /// beta = b_min^2 * 3 n Gamma lambda^3 / (4 pi^2 Omega_min)
  double beta() const;
  void validate() const;
};

/// Per-circular-component phase (radians) and field attenuation exponent.
class OpticalResponse {
 public:
  OpticalResponse() = default;
  OpticalResponse(double phi_plus, double phi_minus, double alpha_plus, double alpha_minus)
      : phi_plus_(phi_plus), phi_minus_(phi_minus), alpha_plus_(alpha_plus), alpha_minus_(alpha_minus) {}

  double phi_plus() const { return phi_plus_; }
  double phi_minus() const { return phi_minus_; }
  double alpha_plus() const { return alpha_plus_; }
  double alpha_minus() const { return alpha_minus_; }
  double phi_d() const { return phi_plus_ - phi_minus_; }
  double alpha_d() const { return alpha_plus_ - alpha_minus_; }

  OpticalResponse& operator+=(const OpticalResponse& o);
  friend OpticalResponse operator*(double w, const OpticalResponse& r);

 private:
  double phi_plus_ = 0.0;
  double phi_minus_ = 0.0;
  double alpha_plus_ = 0.0;
  double alpha_minus_ = 0.0;
};

/// Weighted sums of signal coherences, per circular component: sum over
/// signal transitions with q = +1 (resp. -1) of a * rho(upper, lower),
/// divided by the signal field's spherical amplitude for that q.
std::pair<cplx, cplx> signal_coherence_sums(const DensityMatrix& rho, const TransitionTable& transitions,
                                            const Polarization& signal_polarization);

OpticalResponse response_from_density(const DensityMatrix& rho, const TransitionTable& transitions,
                                      const Polarization& signal_polarization, const MediumParams& medium);

/// Each circular component multiplied by exp(-alpha +- i phi).
JonesVector propagate_cell(const JonesVector& e_in, const OpticalResponse& r);

/// Closed-form detector intensity behind the LCR (fast axis at 45 deg) and a
/// polariser orthogonal to the y-polarised input. E0 is an intensity scale.
double detector_intensity(double e0, double alpha_minus, double alpha_d, double phi_d, double theta);

/// Same quantity through the explicit Jones chain
/// |J_pol R^-1(45) J_LCR R(45) E_after_cell|^2 with |E_in|^2 = E0.
double detector_intensity_chain(double e0, const OpticalResponse& r, double theta,
                                double polarizer_axis = 0.0);

// ---------------------------------------------------------------------------

/// Monotone voltage -> retardance table, linearly interpolated.
class LcrCalibration {
 public:
  LcrCalibration(std::vector<double> voltage, std::vector<double> theta);

  double retardance(double voltage) const;
  const std::vector<double>& voltage() const { return voltage_; }
  const std::vector<double>& theta() const { return theta_; }

  /// 0 V .. 10 V with 2 V <-> pi and 8 V <-> 0, flat outside the anchors.
  static LcrCalibration default_anchors();

 private:
  std::vector<double> voltage_;
  std::vector<double> theta_;
};

struct LcrSample {
  double theta = 0.0;
  double intensity = 0.0;
  std::optional<double> voltage;
};

struct LcrScan {
  std::vector<LcrSample> samples;
  double e0 = 1.0;
  std::string direction;
};

/// Voltages of a triangular scan v_hi -> v_lo -> v_hi with `points` samples.
std::vector<double> triangular_voltages(double v_hi, double v_lo, std::size_t points);

LcrScan synthesize_scan(const OpticalResponse& response, double e0, const std::vector<double>& theta_schedule);
LcrScan synthesize_scan(const OpticalResponse& response, double e0, const LcrCalibration& calibration,
                        const std::vector<double>& voltages);

struct InversionResult {
  double alpha_d = 0.0;
  double phi_d = 0.0;  // principal branch in [0, pi]; -phi_d is equally valid
  double intensity_scale = 0.0;  // fitted E0 * exp(-2 alpha_-)
  double residual = 0.0;         // max |I_model - I_j|
  /// Both sign branches of phi_d.
  std::array<double, 2> phi_branches() const { return {phi_d, -phi_d}; }
};

/// Three-sample closed-form inversion. If e0 and alpha_minus are given, the
/// fitted intensity scale is checked against E0 * exp(-2 alpha_-).
InversionResult invert_scan(const std::array<LcrSample, 3>& samples, std::optional<double> e0 = std::nullopt,
                            std::optional<double> alpha_minus = std::nullopt);

/// Least-squares inversion over all scan samples.
InversionResult invert_scan_lsq(const std::vector<LcrSample>& samples);

/// Picks three well-separated samples of a scan for the closed form.
std::array<LcrSample, 3> pick_three(const std::vector<LcrSample>& samples);

// ---------------------------------------------------------------------------
// Pump-rotated intermediate basis. |2> and |3> are the mF = +1 and -1
// intermediate states coupled to |1> by sigma+ and sigma-.

struct RotatedBasis {
  std::array<cplx, 2> plus;   // coefficients on (|2>, |3>)
  std::array<cplx, 2> minus;
};

/// |+> = a*|2> + b*|3> is pump coupled, |-> = a|3> - b|2> is dark, for a pump
/// polarised a sigma+ + b sigma-.
RotatedBasis rotated_basis(cplx alpha, cplx beta);

/// Pump matrix element <1|V|psi> for a state on (|2>, |3>), in units of the
/// pump Rabi frequency.
cplx pump_coupling(cplx alpha, cplx beta, const std::array<cplx, 2>& state);

/// Output polarisation of a y-polarised probe after a phase phi on the leg
/// that couples to the pump-bright state.
JonesVector ideal_probe_state(cplx alpha, cplx beta, double phi);

}  // namespace ocw
