#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ocw/error.hpp"
#include "ocw/polarimetry.hpp"
#include "ocw/scenario.hpp"

using namespace ocw;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};
const double r2 = std::sqrt(2.0);

const JonesVector X(1.0, 0.0);
const JonesVector Y(0.0, 1.0);

std::array<LcrSample, 3> three(const OpticalResponse& r, double e0, double t1, double t2, double t3) {
  const auto scan = synthesize_scan(r, e0, std::vector<double>{t1, t2, t3});
  return {scan.samples[0], scan.samples[1], scan.samples[2]};
}

}  // namespace

TEST_CASE("circular basis vectors") {
  CHECK((sigma_plus_vector() - JonesVector(-1.0 / r2, -I / r2)).norm() < 1e-15);
  CHECK((sigma_minus_vector() - JonesVector(1.0 / r2, -I / r2)).norm() < 1e-15);
  CHECK(std::abs(sigma_plus_vector().dot(sigma_minus_vector())) < 1e-15);
  const auto [p, m] = to_circular(Y);
  CHECK(std::abs(p - I / r2) < 1e-15);
  CHECK(std::abs(m - I / r2) < 1e-15);
}

TEST_CASE("circular decomposition round-trips and preserves the norm") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const JonesVector e(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
    const auto [p, m] = to_circular(e);
    CHECK((from_circular(p, m) - e).norm() < 1e-14 * std::max(1.0, e.norm()));
    CHECK(std::norm(p) + std::norm(m) == doctest::Approx(e.squaredNorm()).epsilon(1e-13));
  }
  CHECK_THROWS_AS(polarization_of(JonesVector::Zero()), InputError);
}

TEST_CASE("Jones elements") {
  CHECK((rotation(0.3) * rotation(-0.3) - JonesMatrix::Identity()).norm() < 1e-15);
  // Half-wave plate at 45 degrees swaps x and y.
  const JonesVector out = rotated_retarder(pi, pi / 4) * Y;
  CHECK(overlap(out, X) == doctest::Approx(1.0).epsilon(1e-14));
  // Quarter-wave plate at 45 degrees turns linear into circular light.
  const auto [p, m] = to_circular(rotated_retarder(pi / 2, pi / 4) * Y);
  CHECK(std::min(std::abs(p), std::abs(m)) < 1e-14);
  CHECK((polarizer(0.0) * Y).norm() < 1e-15);
  CHECK((polarizer(pi / 2) * Y - Y).norm() < 1e-15);
  const JonesMatrix u = retarder(0.9);
  CHECK((u.adjoint() * u - JonesMatrix::Identity()).norm() < 1e-15);
}

TEST_CASE("circular birefringence rotates a linear probe by half the phase difference") {
  for (const double phi_d : {0.0, 0.4, pi / 2, 2.0, pi}) {
    const double common = 0.37;
    const OpticalResponse r(common + phi_d / 2, common - phi_d / 2, 0.0, 0.0);
    const JonesVector out = propagate_cell(Y, r);
    const JonesVector expect(std::sin(phi_d / 2), std::cos(phi_d / 2));
    CHECK(overlap(out, expect) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Circular dichroism attenuates each handedness separately.
  const OpticalResponse r(0.0, 0.0, 0.5, 0.1);
  const auto [p, m] = to_circular(propagate_cell(Y, r));
  CHECK(std::norm(p) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(std::norm(m) == doctest::Approx(0.5 * std::exp(-0.2)).epsilon(1e-14));
}

TEST_CASE("detector intensity examples") {
  // No medium: retarder between crossed polarisers.
  CHECK(detector_intensity(1.0, 0.0, 0.0, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(detector_intensity(2.0, 0.0, 0.0, 0.0, pi) == doctest::Approx(2.0));
  CHECK(detector_intensity(1.0, 0.0, 0.0, 0.0, pi / 2) == doctest::Approx(0.5));
  // 90 degree rotation by the cell: full transmission without retardance.
  CHECK(detector_intensity(1.0, 0.0, 0.0, pi, 0.0) == doctest::Approx(1.0));
  // Common absorption scales everything.
  CHECK(detector_intensity(1.0, 0.5, 0.0, 0.0, pi) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("closed-form intensity agrees with the Jones chain") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const OpticalResponse r(6 * (u(rng) - 0.5), 6 * (u(rng) - 0.5), 3 * (u(rng) - 0.5), 3 * (u(rng) - 0.5));
    const double e0 = 0.1 + 5 * u(rng);
    const double theta = 2 * pi * u(rng);
    const double a = detector_intensity(e0, r.alpha_minus(), r.alpha_d(), r.phi_d(), theta);
    const double b = detector_intensity_chain(e0, r, theta);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("LCR calibration") {
  const auto cal = LcrCalibration::default_anchors();
  CHECK(cal.retardance(0.0) == doctest::Approx(pi));
  CHECK(cal.retardance(2.0) == doctest::Approx(pi));
  CHECK(cal.retardance(5.0) == doctest::Approx(pi / 2));
  CHECK(cal.retardance(8.0) == doctest::Approx(0.0));
  CHECK(cal.retardance(10.0) == doctest::Approx(0.0));
  CHECK(cal.retardance(-1.0) == doctest::Approx(pi));
  CHECK(cal.retardance(11.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(LcrCalibration({0.0}, {1.0}), InputError);
  CHECK_THROWS_AS(LcrCalibration({0.0, 1.0}, {1.0}), InputError);
  CHECK_THROWS_AS(LcrCalibration({0.0, 0.0}, {1.0, 0.0}), InputError);
  CHECK_THROWS_AS(LcrCalibration({0.0, 1.0, 2.0}, {0.0, 1.0, 0.5}), InputError);
  CHECK_THROWS_AS(LcrCalibration({0.0, 1.0}, {1.0, 1.0}), InputError);
}

TEST_CASE("triangular scan shape") {
  const auto v = triangular_voltages(10.0, 0.0, 201);
  REQUIRE(v.size() == 201);
  CHECK(v.front() == doctest::Approx(10.0));
  CHECK(v[100] == doctest::Approx(0.0));
  CHECK(v.back() == doctest::Approx(10.0));
  const auto cal = LcrCalibration::default_anchors();
  for (std::size_t i = 1; i <= 100; ++i) {
    CHECK(v[i] < v[i - 1]);
    CHECK(cal.retardance(v[i]) >= cal.retardance(v[i - 1]));
    CHECK(v[200 - i] == doctest::Approx(v[i]));
  }
  CHECK_THROWS_AS(triangular_voltages(10.0, 0.0, 2), InputError);

  const OpticalResponse r(0.2, -0.1, 0.3, 0.05);
  const auto scan = synthesize_scan(r, 1.5, cal, v);
  CHECK(scan.samples.size() == 201);
  CHECK(scan.samples[100].voltage.value() == doctest::Approx(0.0));
  CHECK(scan.samples[100].theta == doctest::Approx(pi));
  CHECK(scan.samples[100].intensity ==
        doctest::Approx(detector_intensity(1.5, 0.05, r.alpha_d(), r.phi_d(), pi)));
}

TEST_CASE("three-sample inversion examples") {
  const OpticalResponse r(0.55, -0.55, 0.4, 0.1);
  const auto res = invert_scan(three(r, 2.0, pi / 6, pi / 2, 5 * pi / 6), 2.0, 0.1);
  CHECK(res.alpha_d == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(res.phi_d == doctest::Approx(1.1).epsilon(1e-10));
  CHECK(res.intensity_scale == doctest::Approx(2.0 * std::exp(-0.2)).epsilon(1e-10));
  CHECK(res.residual < 1e-12);
  CHECK(res.phi_branches()[1] == doctest::Approx(-1.1));

  // A flat trace means the analyser sees circular light: 90 degrees.
  const OpticalResponse flat(pi / 4, -pi / 4, 0.0, 0.0);
  const auto f = invert_scan(three(flat, 1.0, 0.3, 1.4, 2.9));
  CHECK(f.phi_d * 180 / pi == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(f.alpha_d == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("inversion round-trips random responses") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double phi_d = 0.02 + (pi - 0.04) * u(rng);
    const double alpha_d = 2 * (u(rng) - 0.5);
    const double alpha_m = u(rng);
    const OpticalResponse r(phi_d / 2, -phi_d / 2, alpha_m + alpha_d, alpha_m);
    const double e0 = 0.5 + u(rng);
    const auto res = invert_scan(three(r, e0, pi / 6, pi / 2, 5 * pi / 6), e0, alpha_m);
    CHECK(res.phi_d == doctest::Approx(phi_d).epsilon(1e-8));
    CHECK(res.alpha_d == doctest::Approx(alpha_d).scale(1.0).epsilon(1e-8));
  }
}

TEST_CASE("inversion failures are reported") {
  const OpticalResponse r(0.3, -0.3, 0.1, 0.0);
  CHECK_THROWS_AS(invert_scan(three(r, 1.0, 0.5, 0.5, 2.0)), PhysicsError);
  auto s = three(r, 1.0, pi / 6, pi / 2, 5 * pi / 6);
  s[1].intensity = -0.2;
  CHECK_THROWS_AS(invert_scan(s), PhysicsError);
  s = three(r, 1.0, pi / 6, pi / 2, 5 * pi / 6);
  s[0].intensity *= 40.0;
  CHECK_THROWS_AS(invert_scan(s), PhysicsError);
  // Scale check against the supplied E0 and alpha_-.
  CHECK_THROWS_AS(invert_scan(three(r, 1.0, pi / 6, pi / 2, 5 * pi / 6), 3.0, 0.0), PhysicsError);
}

TEST_CASE("least-squares inversion over a full scan") {
  const OpticalResponse r(0.9, -0.4, -0.2, 0.3);
  const auto cal = LcrCalibration::default_anchors();
  const auto scan = synthesize_scan(r, 1.2, cal, triangular_voltages(10.0, 0.0, 201));
  const auto res = invert_scan_lsq(scan.samples);
  CHECK(res.phi_d == doctest::Approx(1.3).epsilon(1e-9));
  CHECK(res.alpha_d == doctest::Approx(-0.5).epsilon(1e-9));
  const auto picked = invert_scan(pick_three(scan.samples));
  CHECK(picked.phi_d == doctest::Approx(1.3).epsilon(1e-9));
  std::vector<LcrSample> same(5, scan.samples[0]);
  CHECK_THROWS_AS(invert_scan_lsq(same), PhysicsError);
  CHECK_THROWS_AS(invert_scan_lsq({scan.samples[0]}), InputError);
}

TEST_CASE("medium coefficient") {
  MediumParams m;
  m.n_atom = 1e12;
  m.lambda_nm = 1323.0;
  m.gamma = 0.6;
  m.omega_min = 0.1;
  m.b_min_sq = 1.0 / 12;
  const double lam = 1323e-7;
  CHECK(m.beta() == doctest::Approx(m.b_min_sq * 3 * 1e12 * 0.6 * lam * lam * lam / (4 * pi * pi * 0.1)).epsilon(1e-14));
  CHECK(m.k_per_cm() == doctest::Approx(2 * pi / lam).epsilon(1e-14));
  m.b_min_sq = 0.0;
  CHECK_THROWS_AS(m.validate(), InputError);
}

TEST_CASE("signal coherence sums") {
  const Scenario sc = load_preset("fig1-ideal");
  const auto& s = sc.scheme;
  const auto u = s.index_of({"U", 1, 0, false});
  const auto ep = s.index_of({"E", 1, 1, false});
  const auto em = s.index_of({"E", 1, -1, false});
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(u, em) = cplx(0.01, 0.02);
  rho(em, u) = std::conj(rho(u, em));
  rho(u, ep) = cplx(-0.03, 0.005);
  rho(ep, u) = std::conj(rho(u, ep));
  const Polarization yp = polarization_of(Y);
  const auto [sp, sm] = signal_coherence_sums(DensityMatrix(rho), sc.transitions, yp);
  const double a_p = sc.transitions.strength(u, em, FieldRole::signal);
  const double a_m = sc.transitions.strength(u, ep, FieldRole::signal);
  CHECK(std::abs(sp - a_p * rho(u, em) / yp.sigma_plus) < 1e-15);
  CHECK(std::abs(sm - a_m * rho(u, ep) / yp.sigma_minus) < 1e-15);

  const auto resp = response_from_density(DensityMatrix(rho), sc.transitions, yp, sc.medium);
  const double scale = sc.medium.k_per_cm() * sc.medium.length_cm * sc.medium.beta() / 2;
  CHECK(resp.phi_plus() == doctest::Approx(scale * sp.real()));
  CHECK(resp.alpha_minus() == doctest::Approx(scale * sm.imag()));

  CHECK_THROWS_AS(signal_coherence_sums(DensityMatrix(rho), sc.transitions, Polarization{1.0, 0.0}), InputError);
}

TEST_CASE("pump-rotated basis") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    cplx a(n(rng), n(rng)), b(n(rng), n(rng));
    const double nn = std::sqrt(std::norm(a) + std::norm(b));
    a /= nn;
    b /= nn;
    const auto basis = rotated_basis(a, b);
    CHECK(std::abs(pump_coupling(a, b, basis.minus)) < 1e-14);
    CHECK(std::abs(pump_coupling(a, b, basis.plus)) == doctest::Approx(1.0).epsilon(1e-14));
    const cplx inner = std::conj(basis.plus[0]) * basis.minus[0] + std::conj(basis.plus[1]) * basis.minus[1];
    CHECK(std::abs(inner) < 1e-14);
  }
  CHECK_THROWS_AS(rotated_basis(1.0, 1.0), InputError);
}

TEST_CASE("ideal probe state") {
  // No phase: the probe leaves unchanged.
  CHECK(overlap(ideal_probe_state(1.0, 0.0, 0.0), Y) == doctest::Approx(1.0).epsilon(1e-14));
  // Circular pump, phase pi on the bright leg: rotated by 90 degrees.
  CHECK(overlap(ideal_probe_state(1.0, 0.0, pi), X) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(overlap(ideal_probe_state(0.0, 1.0, pi), X) == doctest::Approx(1.0).epsilon(1e-14));
  // Circular pump, phase pi/2: circular output.
  const auto [p, m] = to_circular(ideal_probe_state(1.0, 0.0, pi / 2));
  CHECK(std::abs(p) == doctest::Approx(std::abs(m)).epsilon(1e-14));

  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    cplx a(n(rng), n(rng)), b(n(rng), n(rng));
    const double nn = std::sqrt(std::norm(a) + std::norm(b));
    a /= nn;
    b /= nn;
    const double phi = 4 * n(rng);
    const JonesVector out = ideal_probe_state(a, b, phi);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-13));
    // Projector oracle: the component along the pump-bright direction picks up exp(i phi).
    Eigen::Vector2cd v(a, b);
    const Eigen::Matrix2cd proj = v * v.adjoint();
    const Eigen::Vector2cd c =
        (Eigen::Matrix2cd::Identity() + (std::exp(I * phi) - 1.0) * proj) * Eigen::Vector2cd(1.0, 1.0);
    const JonesVector expect = I / r2 * (c(0) * sigma_minus_vector() + c(1) * sigma_plus_vector());
    CHECK((out - expect).norm() < 1e-13);
  }
}

TEST_CASE("45 degree linear pump written as a complex pair") {
  const cplx a = I / (I - 1.0);
  const cplx b = 1.0 / (I - 1.0);
  CHECK(std::norm(a) + std::norm(b) == doctest::Approx(1.0));
  const Polarization lin = polarization_of(JonesVector(1.0 / r2, 1.0 / r2));
  const cplx inner = std::conj(lin.sigma_plus) * a + std::conj(lin.sigma_minus) * b;
  CHECK(std::abs(inner) == doctest::Approx(1.0).epsilon(1e-14));
  const Scenario sc = load_preset("fig8-qwp");
  const auto& pp = sc.fields.pump.polarization;
  CHECK(std::abs(std::conj(pp.sigma_plus) * a + std::conj(pp.sigma_minus) * b) == doctest::Approx(1.0).epsilon(1e-12));
}
