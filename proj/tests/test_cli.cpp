#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "ocw-cli-test.out";
  const std::string cmd = std::string("\"") + OCW_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string tmp(const std::string& name) { return (fs::temp_directory_path() / ("ocw-cli-" + name)).string(); }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("--help").code == 0);
  CHECK(run("validate").code == 0);
  CHECK(run("solve --preset two-level-oracle").code == 0);
  CHECK(run("--no-such-flag").code == 1);
  CHECK(run("solve --preset fig7-full --scenario x.json").code == 1);
  CHECK(run("solve --preset missing").code == 1);
  CHECK(run("solve --scenario /nonexistent/file.json").code == 2);
  CHECK(run("invert --scan /nonexistent/scan.csv").code == 2);
  CHECK(run("export-table1 --out /nonexistent/dir/t.csv").code == 2);
}

TEST_CASE("validate lists every check") {
  const auto r = run("validate");
  CHECK(r.out.find("all checks passed") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("solve prints the two-level populations") {
  const auto r = run("solve --preset two-level-oracle");
  CHECK(r.code == 0);
  CHECK(r.out.find("3.33333") != std::string::npos);
}

TEST_CASE("synthesised scan inverts back to the input") {
  const std::string scan = tmp("scan.csv");
  REQUIRE(run("lcr --alpha-d 0.25 --phi-d-deg 63 --alpha-minus 0.1 --out " + scan).code == 0);
  const auto r = run("invert --scan " + scan + " --alpha-minus 0.1");
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string header, three, lsq;
  std::getline(is, header);
  std::getline(is, three);
  std::getline(is, lsq);
  CHECK(header == "method,alpha_d,phi_d_deg,phi_d_deg_alt,intensity_scale,residual");
  for (const std::string& line : {three, lsq}) {
    CAPTURE(line);
    std::stringstream ls(line);
    std::string method, a, p;
    std::getline(ls, method, ',');
    std::getline(ls, a, ',');
    std::getline(ls, p, ',');
    CHECK(std::stod(a) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(std::stod(p) == doctest::Approx(63.0).epsilon(1e-6));
  }
  fs::remove(scan);
}

TEST_CASE("explicit retardance schedule") {
  const std::string scan = tmp("theta.csv");
  REQUIRE(run("lcr --alpha-d 0 --phi-d-deg 90 --theta-deg 30,90,150 --out " + scan).code == 0);
  std::ifstream in(scan);
  std::string meta, header;
  std::getline(in, meta);
  std::getline(in, header);
  CHECK(meta.rfind("# ocw-scan v1", 0) == 0);
  CHECK(header == "theta_rad,intensity");
  fs::remove(scan);
}

TEST_CASE("sweep writes a CSV and removes its checkpoint") {
  const std::string out = tmp("sweep.csv");
  const auto r = run("sweep --preset fig1-ideal --detunings 5 --quiet --out " + out);
  REQUIRE(r.code == 0);
  std::ifstream in(out);
  std::string meta, header;
  std::getline(in, meta);
  std::getline(in, header);
  CHECK(meta.rfind("# ocw-sweep v1", 0) == 0);
  CHECK(header == "delta_s,phi_plus,phi_minus,alpha_plus,alpha_minus,phi_d_deg,alpha_d");
  int rows = 0;
  for (std::string line; std::getline(in, line);) rows += !line.empty();
  CHECK(rows == 5);
  CHECK_FALSE(fs::exists(out + ".ckpt"));
  fs::remove(out);
}

TEST_CASE("Liouvillian dump") {
  const std::string out = tmp("m.txt");
  REQUIRE(run("solve --preset two-level-oracle --dump-liouvillian " + out).code == 0);
  std::ifstream in(out);
  std::string first;
  std::getline(in, first);
  CHECK(first == "# M 4 4");
  fs::remove(out);
}
