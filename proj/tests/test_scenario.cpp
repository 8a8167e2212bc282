#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ocw/csv_io.hpp"
#include "ocw/error.hpp"
#include "ocw/scenario.hpp"
#include "ocw/validate.hpp"

using namespace ocw;

namespace {

std::string with_replacement(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  return text;
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "test.json");
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("every preset loads and builds a solver") {
  const auto names = preset_names();
  CHECK(names.size() >= 6);
  for (const auto& name : names) {
    CAPTURE(name);
    const Scenario sc = load_preset(name);
    CHECK(sc.name == name);
    CHECK_NOTHROW(sc.sweep.validate());
    CHECK_NOTHROW(sc.make_solver());
  }
  CHECK_THROWS_AS(load_preset("nope"), InputError);
}

TEST_CASE("preset files on disk match the embedded copies") {
  for (const auto& name : preset_names()) {
    const Scenario a = load_scenario_file(std::string(OCW_SOURCE_DIR) + "/scenarios/" + name + ".json");
    const Scenario b = load_preset(name);
    CHECK(a.scheme.size() == b.scheme.size());
    CHECK(a.fields.pump.detuning == b.fields.pump.detuning);
  }
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/ocw.json"), IoError);
}

TEST_CASE("frequency units are converted to gamma_a") {
  const Scenario sc = load_preset("fig7-full");
  CHECK(sc.gamma_a_mhz == doctest::Approx(5.75));
  CHECK(sc.fields.pump.detuning == doctest::Approx(-1200.0 / 5.75).epsilon(1e-14));
  CHECK(sc.scheme.decay().gamma_b == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(sc.scheme.decay().gamma_g == doctest::Approx(0.1 / 5.75).epsilon(1e-14));
  CHECK(sc.fields.pump.k == doctest::Approx(1.0 / (794.98e-9 * 5.75e6)).epsilon(1e-12));
  CHECK(sc.medium.b_min_sq == doctest::Approx(1.0 / 12).epsilon(1e-13));
  CHECK(sc.medium.omega_min == doctest::Approx(0.1));
  CHECK(sc.sweep.detunings.size() == 512);
  CHECK(sc.sweep.detunings.front() == doctest::Approx(-1200.0));

  const std::string src(preset_source("two-level-oracle"));
  const auto ghz = parse_scenario(
      with_replacement(src, "\"detuning\": 0", "\"detuning\": {\"value\": 0.0115, \"unit\": \"GHz\"}"));
  CHECK(ghz.fields.pump.detuning == doctest::Approx(2.0).epsilon(1e-12));
  const auto mhz = parse_scenario(
      with_replacement(src, "\"detuning\": 0", "\"detuning\": {\"value\": -2.875, \"unit\": \"MHz\"}"));
  CHECK(mhz.fields.pump.detuning == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(error_of(with_replacement(src, "\"detuning\": 0", "\"detuning\": {\"value\": 1, \"unit\": \"THz\"}")) != "");
}

TEST_CASE("malformed scenarios are rejected with a path") {
  const std::string src(preset_source("two-level-oracle"));
  const auto unknown = error_of(with_replacement(src, "\"name\":", "\"bogus\": 1, \"name\":"));
  CHECK(unknown.find("bogus") != std::string::npos);
  CHECK(unknown.find("test.json") != std::string::npos);

  const auto nested = error_of(with_replacement(src, "\"rabi\": 1.0", "\"rabi\": 1.0, \"phase\": 2"));
  CHECK(nested.find("$.fields.pump") != std::string::npos);

  CHECK(error_of(with_replacement(src, "\"schema_version\": 1", "\"schema_version\": 2")) != "");
  CHECK(error_of(with_replacement(src, "\"sigma+\"", "\"sideways\"")) != "");
  CHECK(error_of(with_replacement(src, "\"rabi\": 1.0", "\"rabi\": -1.0")) != "");
  CHECK(error_of("{ not json")  != "");
  CHECK(error_of(with_replacement(src, "\"to\": \"G:0\"", "\"to\": \"G:+5\"")) != "");
}

TEST_CASE("polarisation forms") {
  const std::string src(preset_source("two-level-oracle"));
  const auto lin = parse_scenario(with_replacement(src, "\"sigma+\"", "{\"linear_deg\": 90}"));
  const auto y = parse_scenario(with_replacement(src, "\"sigma+\"", "\"y\""));
  const auto& a = lin.fields.pump.polarization;
  const auto& b = y.fields.pump.polarization;
  CHECK(std::abs(std::conj(a.sigma_plus) * b.sigma_plus + std::conj(a.sigma_minus) * b.sigma_minus) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const auto pair = parse_scenario(with_replacement(
      src, "\"sigma+\"", "{\"alpha\": [0.6, 0.0], \"beta\": [0.0, 0.8]}"));
  CHECK(pair.fields.pump.polarization.sigma_minus.imag() == doctest::Approx(0.8));
}

TEST_CASE("sweep CSV layout and round trip") {
  std::ostringstream os;
  const std::vector<double> ds{-1.0, 0.5};
  const std::vector<OpticalResponse> rs{{0.1, -0.2, 0.3, 0.4}, {1.0 / 3, 0.0, -0.25, 1e-9}};
  write_sweep_csv(os, ds, rs, {{"scenario", "fig7-full"}});
  const std::string text = os.str();
  CHECK(text.rfind("# ocw-sweep v1 scenario=fig7-full\n"
                   "delta_s,phi_plus,phi_minus,alpha_plus,alpha_minus,phi_d_deg,alpha_d\n",
                   0) == 0);
  std::istringstream is(text);
  const auto rows = read_sweep_csv(is);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].delta_s == 0.5);
  CHECK(rows[1].response.phi_plus() == 1.0 / 3);
  CHECK(rows[1].response.alpha_minus() == 1e-9);
  std::istringstream bad("# ocw-scan v1\n");
  CHECK_THROWS_AS(read_sweep_csv(bad), InputError);
}

TEST_CASE("scan CSV layout and round trip") {
  const auto cal = LcrCalibration::default_anchors();
  const OpticalResponse r(0.4, -0.1, 0.2, 0.05);
  const auto scan = synthesize_scan(r, 1.25, cal, triangular_voltages(10.0, 0.0, 11));
  std::ostringstream os;
  write_scan_csv(os, scan);
  CHECK(os.str().rfind("# ocw-scan v1 E0=1.25 direction=voltage\nvoltage,theta_rad,intensity\n", 0) == 0);
  std::istringstream is(os.str());
  const auto back = read_scan_csv(is, cal);
  REQUIRE(back.samples.size() == 11);
  CHECK(back.e0 == 1.25);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(back.samples[i].theta == scan.samples[i].theta);
    CHECK(back.samples[i].intensity == scan.samples[i].intensity);
  }
  std::istringstream volts_only("voltage,intensity\n5,0.2\n");
  CHECK(read_scan_csv(volts_only, cal).samples[0].theta == doctest::Approx(std::acos(-1.0) / 2));
  std::istringstream negative("theta_rad,intensity\n0.1,-1\n");
  CHECK_THROWS_AS(read_scan_csv(negative, cal), InputError);
  std::istringstream unknown("theta_rad,brightness\n0.1,1\n");
  CHECK_THROWS_AS(read_scan_csv(unknown, cal), InputError);
}

TEST_CASE("branching CSV layout") {
  std::ostringstream os;
  write_branching_csv(os, load_table1());
  std::istringstream is(os.str());
  std::string meta, header, first;
  std::getline(is, meta);
  std::getline(is, header);
  std::getline(is, first);
  CHECK(meta == "# ocw-branching v1");
  CHECK(header == "ground,U2:-2,U2:-1,U2:0,U2:+1,U2:+2,U1:-1,U1:0,U1:+1");
  CHECK(first.rfind("G2:-2,0.68852", 0) == 0);
}

TEST_CASE("metadata line parsing") {
  const auto m = parse_meta_line("# ocw-scan v1 E0=2 direction=theta", "scan");
  CHECK(m.at("E0") == "2");
  CHECK_THROWS_AS(parse_meta_line("# ocw-scan v2", "scan"), InputError);
  CHECK_THROWS_AS(parse_meta_line("# ocw-scan v1 junk", "scan"), InputError);
}

TEST_CASE("validation suite passes and catches a corrupted table") {
  const auto good = run_validation_suite(load_table1());
  for (const auto& r : good) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.pass);
  }
  CHECK(all_passed(good));

  const BranchingTable t = load_table1();
  Eigen::MatrixXd f = t.fraction();
  f(0, 0) += 0.05;
  const auto bad = run_validation_suite(BranchingTable(t.rows(), t.cols(), f));
  CHECK_FALSE(all_passed(bad));
}
