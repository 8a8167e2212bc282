#include "ocw/polarimetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ocw/error.hpp"

namespace ocw {

namespace {
constexpr cplx kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
}  // namespace

JonesVector sigma_plus_vector() { return JonesVector(-kInvSqrt2, -kI * kInvSqrt2); }
JonesVector sigma_minus_vector() { return JonesVector(kInvSqrt2, -kI * kInvSqrt2); }

std::pair<cplx, cplx> to_circular(const JonesVector& e) {
  return {sigma_plus_vector().dot(e), sigma_minus_vector().dot(e)};  // dot() conjugates the left side
}

JonesVector from_circular(cplx e_plus, cplx e_minus) {
  return e_plus * sigma_plus_vector() + e_minus * sigma_minus_vector();
}

Polarization polarization_of(const JonesVector& e) {
  const auto [p, m] = to_circular(e);
  const double n = std::sqrt(std::norm(p) + std::norm(m));
  if (n == 0.0) throw InputError("zero polarisation vector");
  return {p / n, m / n};
}

JonesMatrix rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  JonesMatrix r;
  r << c, s, -s, c;
  return r;
}

JonesMatrix retarder(double theta) {
  JonesMatrix j = JonesMatrix::Zero();
  j(0, 0) = std::exp(kI * (theta / 2));
  j(1, 1) = std::exp(-kI * (theta / 2));
  return j;
}

JonesMatrix rotated_retarder(double theta, double axis) {
  return rotation(-axis) * retarder(theta) * rotation(axis);
}

JonesMatrix polarizer(double axis) {
  const double c = std::cos(axis);
  const double s = std::sin(axis);
  JonesMatrix p;
  p << c * c, c * s, c * s, s * s;
  return p;
}

double overlap(const JonesVector& a, const JonesVector& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

// ---------------------------------------------------------------------------

double MediumParams::k_per_cm() const { return 2 * std::numbers::pi / (lambda_nm * 1e-7); }

double MediumParams::beta() const {
  const double lambda_cm = lambda_nm * 1e-7;
  return b_min_sq * 3 * n_atom * gamma * lambda_cm * lambda_cm * lambda_cm /
         (4 * std::numbers::pi * std::numbers::pi * omega_min);
}

void MediumParams::validate() const {
  if (!(n_atom > 0 && length_cm > 0 && lambda_nm > 0 && gamma > 0 && omega_min > 0)) {
    throw InputError("medium parameters must be positive");
  }
  if (!(b_min_sq > 0 && b_min_sq <= 1)) throw InputError("b_min^2 must lie in (0, 1]");
}

OpticalResponse& OpticalResponse::operator+=(const OpticalResponse& o) {
  phi_plus_ += o.phi_plus_;
  phi_minus_ += o.phi_minus_;
  alpha_plus_ += o.alpha_plus_;
  alpha_minus_ += o.alpha_minus_;
  return *this;
}

OpticalResponse operator*(double w, const OpticalResponse& r) {
  return {w * r.phi_plus_, w * r.phi_minus_, w * r.alpha_plus_, w * r.alpha_minus_};
}

std::pair<cplx, cplx> signal_coherence_sums(const DensityMatrix& rho, const TransitionTable& transitions,
                                            const Polarization& signal_polarization) {
  cplx plus{0.0, 0.0};
  cplx minus{0.0, 0.0};
  bool have_plus = false;
  bool have_minus = false;
  for (const auto& t : transitions.for_field(FieldRole::signal)) {
    if (t.q == 0) continue;
    const cplx c = signal_polarization.component(t.q);
    if (std::abs(c) < 1e-12) {
      throw InputError(fmt::format("signal field has no sigma{} component to normalise against",
                                   t.q > 0 ? '+' : '-'));
    }
    const cplx term = t.strength * rho(t.upper, t.lower) / c;
    if (t.q > 0) {
      plus += term;
      have_plus = true;
    } else {
      minus += term;
      have_minus = true;
    }
  }
  if (!have_plus || !have_minus) {
    throw InputError("response needs signal transitions for both circular components");
  }
  return {plus, minus};
}

OpticalResponse response_from_density(const DensityMatrix& rho, const TransitionTable& transitions,
                                      const Polarization& signal_polarization, const MediumParams& medium) {
  medium.validate();
  const auto [sp, sm] = signal_coherence_sums(rho, transitions, signal_polarization);
  const double scale = medium.k_per_cm() * medium.length_cm * medium.beta() / 2;
  return {scale * sp.real(), scale * sm.real(), scale * sp.imag(), scale * sm.imag()};
}

JonesVector propagate_cell(const JonesVector& e_in, const OpticalResponse& r) {
  const auto [ep, em] = to_circular(e_in);
  return from_circular(ep * std::exp(cplx(-r.alpha_plus(), r.phi_plus())),
                       em * std::exp(cplx(-r.alpha_minus(), r.phi_minus())));
}

double detector_intensity(double e0, double alpha_minus, double alpha_d, double phi_d, double theta) {
  const double a = std::exp(-alpha_d);
  return e0 / 4 * std::exp(-2 * alpha_minus) *
         (1 + a * a + (1 - a * a) * std::sin(theta) - 2 * a * std::cos(phi_d) * std::cos(theta));
}

double detector_intensity_chain(double e0, const OpticalResponse& r, double theta, double polarizer_axis) {
  const JonesVector e_in(0.0, std::sqrt(e0));
  const JonesVector after = propagate_cell(e_in, r);
  const JonesVector out =
      polarizer(polarizer_axis) * rotated_retarder(theta, std::numbers::pi / 4) * after;
  return out.squaredNorm();
}

// ---------------------------------------------------------------------------

LcrCalibration::LcrCalibration(std::vector<double> voltage, std::vector<double> theta)
    : voltage_(std::move(voltage)), theta_(std::move(theta)) {
  if (voltage_.size() != theta_.size() || voltage_.size() < 2) {
    throw InputError("LCR calibration needs at least two (voltage, retardance) pairs");
  }
  for (std::size_t i = 1; i < voltage_.size(); ++i) {
    if (!(voltage_[i] > voltage_[i - 1])) throw InputError("LCR calibration voltages must increase strictly");
  }
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < theta_.size(); ++i) {
    up = up && theta_[i] >= theta_[i - 1];
    down = down && theta_[i] <= theta_[i - 1];
  }
  if (!up && !down) throw InputError("LCR calibration is not monotone");
  if (theta_.front() == theta_.back()) throw InputError("LCR calibration is constant");
}

double LcrCalibration::retardance(double v) const {
  if (v <= voltage_.front()) return theta_.front();
  if (v >= voltage_.back()) return theta_.back();
  const auto it = std::upper_bound(voltage_.begin(), voltage_.end(), v);
  const auto i = static_cast<std::size_t>(it - voltage_.begin());
  const double t = (v - voltage_[i - 1]) / (voltage_[i] - voltage_[i - 1]);
  return theta_[i - 1] + t * (theta_[i] - theta_[i - 1]);
}

LcrCalibration LcrCalibration::default_anchors() {
  return {{0.0, 2.0, 8.0, 10.0}, {std::numbers::pi, std::numbers::pi, 0.0, 0.0}};
}

std::vector<double> triangular_voltages(double v_hi, double v_lo, std::size_t points) {
  if (points < 3) throw InputError("a triangular scan needs at least 3 points");
  std::vector<double> v(points);
  const double half = static_cast<double>(points - 1) / 2;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = std::abs(static_cast<double>(i) - half) / half;  // 1 -> 0 -> 1
    v[i] = v_lo + t * (v_hi - v_lo);
  }
  return v;
}

LcrScan synthesize_scan(const OpticalResponse& response, double e0, const std::vector<double>& theta_schedule) {
  LcrScan scan;
  scan.e0 = e0;
  scan.direction = "theta";
  scan.samples.reserve(theta_schedule.size());
  for (double th : theta_schedule) {
    scan.samples.push_back(
        {th, detector_intensity(e0, response.alpha_minus(), response.alpha_d(), response.phi_d(), th), {}});
  }
  return scan;
}

LcrScan synthesize_scan(const OpticalResponse& response, double e0, const LcrCalibration& calibration,
                        const std::vector<double>& voltages) {
  std::vector<double> thetas;
  thetas.reserve(voltages.size());
  for (double v : voltages) thetas.push_back(calibration.retardance(v));
  LcrScan scan = synthesize_scan(response, e0, thetas);
  scan.direction = "voltage";
  for (std::size_t i = 0; i < voltages.size(); ++i) scan.samples[i].voltage = voltages[i];
  return scan;
}

namespace {

double model_bracket(double u, double c, double theta) {
  return 1 + u * u + (1 - u * u) * std::sin(theta) - 2 * u * c * std::cos(theta);
}

void finish(InversionResult& r, const std::vector<LcrSample>& samples) {
  const double u = std::exp(-r.alpha_d);
  const double c = std::cos(r.phi_d);
  // Intensity scale from the best-conditioned sample.
  double best = -1.0;
  for (const auto& s : samples) {
    const double b = model_bracket(u, c, s.theta);
    if (b > best) {
      best = b;
      r.intensity_scale = 4 * s.intensity / b;
    }
  }
  r.residual = 0.0;
  for (const auto& s : samples) {
    r.residual = std::max(r.residual, std::abs(r.intensity_scale / 4 * model_bracket(u, c, s.theta) - s.intensity));
  }
}

double checked_cos(double c, const char* what) {
  if (!std::isfinite(c) || std::abs(c) > 1 + 1e-9) {
    throw PhysicsError(fmt::format("inconsistent samples: {} gives cos(phi_d) = {:.6g}", what, c));
  }
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace

InversionResult invert_scan(const std::array<LcrSample, 3>& s, std::optional<double> e0,
                            std::optional<double> alpha_minus) {
  for (const auto& x : s) {
    if (!(x.intensity >= 0)) throw PhysicsError("inconsistent samples: negative intensity");
  }
  const double th1 = s[0].theta, th2 = s[1].theta, th3 = s[2].theta;
  const double I1 = s[0].intensity, I2 = s[1].intensity, I3 = s[2].intensity;
  const double C1 = std::cos(th1), C2 = std::cos(th2), C3 = std::cos(th3);
  const double S1 = std::sin(th1), S2 = std::sin(th2), S3 = std::sin(th3);
  // Three points on the unit circle are collinear only when two coincide.
  const double det = (C2 - C1) * (S3 - S1) - (C3 - C1) * (S2 - S1);
  if (std::abs(det) < 1e-6) {
    throw PhysicsError(fmt::format("ill-conditioned inversion: retardances {:.6g}, {:.6g}, {:.6g} are not distinct",
                                   th1, th2, th3));
  }
  const double S31 = std::sin(th3 - th1), S23 = std::sin(th2 - th3), S12 = std::sin(th1 - th2);
  const double num = I2 * I2 * (C1 - C3 - S31) + I1 * I2 * (C3 - C2 - S23) + I2 * I3 * (C2 - C1 - S12);
  const double den = I2 * I2 * (C3 - C1 - S31) + I1 * I2 * (C2 - C3 - S23) + I2 * I3 * (C1 - C2 - S12);
  const double scale = std::max({I1 * I1, I2 * I2, I3 * I3, 1e-300});
  if (std::abs(den) < 1e-12 * scale) {
    throw PhysicsError("ill-conditioned inversion: vanishing denominator for exp(alpha_d)");
  }
  const double y2 = num / den;
  if (!(y2 > 0)) {
    throw PhysicsError(fmt::format("inconsistent samples: exp(2 alpha_d) = {:.6g} is not positive", y2));
  }
  const double y = std::sqrt(y2);

  // cos(phi_d) from the pair with the best-conditioned denominator.
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  double best_den = 0.0;
  double cos_phi = 0.0;
  for (const auto& [j, k] : pairs) {
    const double Ij = s[j].intensity, Ik = s[k].intensity;
    const double Cj = std::cos(s[j].theta), Ck = std::cos(s[k].theta);
    const double Sj = std::sin(s[j].theta), Sk = std::sin(s[k].theta);
    const double d = 2 * (Ik * Cj - Ij * Ck);
    if (std::abs(d) > std::abs(best_den)) {
      best_den = d;
      cos_phi = ((Ik - Ij) * (y + 1 / y) + (Ij * Sk - Ik * Sj) * (1 / y - y)) / d;
    }
  }
  if (std::abs(best_den) < 1e-12 * std::sqrt(scale)) {
    throw PhysicsError("ill-conditioned inversion: vanishing denominator for cos(phi_d)");
  }

  InversionResult r;
  r.alpha_d = std::log(y);
  r.phi_d = std::acos(checked_cos(cos_phi, "three-point inversion"));
  finish(r, {s.begin(), s.end()});
  if (e0 && alpha_minus) {
    const double expected = *e0 * std::exp(-2 * *alpha_minus);
    if (std::abs(r.intensity_scale - expected) > 1e-6 * std::max(expected, 1e-300)) {
      throw PhysicsError(fmt::format(
          "inconsistent samples: fitted E0*exp(-2 alpha_-) = {:.9g} but {:.9g} was supplied (residual {:.3g})",
          r.intensity_scale, expected, r.residual));
    }
  }
  return r;
}

InversionResult invert_scan_lsq(const std::vector<LcrSample>& samples) {
  if (samples.size() < 3) throw InputError("least-squares inversion needs at least 3 samples");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double th = samples[static_cast<std::size_t>(i)].theta;
    a(i, 0) = 1 + std::sin(th);
    a(i, 1) = 1 - std::sin(th);
    a(i, 2) = -2 * std::cos(th);
    b(i) = samples[static_cast<std::size_t>(i)].intensity;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw PhysicsError("ill-conditioned inversion: fewer than three distinct retardances");
  const Eigen::Vector3d x = qr.solve(b);  // P, P u^2, P u cos(phi)
  if (!(x(0) > 0) || !(x(1) > 0)) {
    throw PhysicsError(fmt::format("inconsistent samples: fitted scale {:.6g}, exp(-2 alpha_d) {:.6g}",
                                   x(0), x(0) != 0 ? x(1) / x(0) : 0.0));
  }
  const double u = std::sqrt(x(1) / x(0));
  InversionResult r;
  r.alpha_d = -std::log(u);
  r.phi_d = std::acos(checked_cos(x(2) / (x(0) * u), "least-squares inversion"));
  r.intensity_scale = 4 * x(0);
  r.residual = (a * x - b).cwiseAbs().maxCoeff();
  return r;
}

std::array<LcrSample, 3> pick_three(const std::vector<LcrSample>& samples) {
  if (samples.size() < 3) throw InputError("scan has fewer than 3 samples");
  double lo = samples.front().theta;
  double hi = lo;
  for (const auto& s : samples) {
    lo = std::min(lo, s.theta);
    hi = std::max(hi, s.theta);
  }
  std::array<LcrSample, 3> out;
  const std::array<double, 3> frac{1.0 / 6, 0.5, 5.0 / 6};
  for (std::size_t k = 0; k < 3; ++k) {
    const double target = lo + frac[k] * (hi - lo);
    const auto it = std::min_element(samples.begin(), samples.end(), [target](const auto& a, const auto& b) {
      return std::abs(a.theta - target) < std::abs(b.theta - target);
    });
    out[k] = *it;
  }
  return out;
}

// ---------------------------------------------------------------------------

RotatedBasis rotated_basis(cplx alpha, cplx beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12) {
    throw InputError("pump polarisation must satisfy |alpha|^2 + |beta|^2 = 1");
  }
  return {{std::conj(alpha), std::conj(beta)}, {-beta, alpha}};
}

cplx pump_coupling(cplx alpha, cplx beta, const std::array<cplx, 2>& state) {
  return alpha * state[0] + beta * state[1];
}

JonesVector ideal_probe_state(cplx alpha, cplx beta, double phi) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12) {
    throw InputError("pump polarisation must satisfy |alpha|^2 + |beta|^2 = 1");
  }
  const cplx ph = std::exp(kI * phi);
  const double a2 = std::norm(alpha);
  const double b2 = std::norm(beta);
  const cplx ba = std::conj(beta) * alpha;
  const cplx ab = std::conj(alpha) * beta;
  const cplx c_minus = (a2 + ba) * ph + (b2 - ba);
  const cplx c_plus = (b2 + ab) * ph + (a2 - ab);
  return kI * kInvSqrt2 * (c_minus * sigma_minus_vector() + c_plus * sigma_plus_vector());
}

}  // namespace ocw
