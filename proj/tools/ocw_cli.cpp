// ocw: command-line front end for the ladder-vapour waveplate model.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ocw/atomic_model.hpp"
#include "ocw/csv_io.hpp"
#include "ocw/doppler.hpp"
#include "ocw/error.hpp"
#include "ocw/polarimetry.hpp"
#include "ocw/scenario.hpp"
#include "ocw/validate.hpp"

namespace {

using namespace ocw;

constexpr double kDeg = std::numbers::pi / 180.0;

struct Source {
  std::string scenario;
  std::string preset;

  void attach(CLI::App* app) {
    auto* s = app->add_option("--scenario", scenario, "Scenario file (JSON)");
    auto* p = app->add_option("--preset", preset, "Built-in scenario name");
    s->excludes(p);
  }
  bool given() const { return !scenario.empty() || !preset.empty(); }
  Scenario load() const {
    if (!scenario.empty()) return load_scenario_file(scenario);
    if (!preset.empty()) return load_preset(preset);
    throw InputError("give --scenario <path> or --preset <name>");
  }
};

void emit(const std::string& out, const std::function<void(std::ostream&)>& body) {
  if (out.empty() || out == "-") {
    body(std::cout);
  } else {
    write_file(out, body);
  }
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  Source src;
  std::optional<double> delta_s;
  double velocity = 0.0;
  std::string geometry;
  std::string dump;
  bool complex_solver = false;
};

int cmd_solve(const SolveArgs& a) {
  Scenario s = a.src.load();
  if (!a.geometry.empty()) s.sweep.geometry = parse_geometry(a.geometry);
  const CellSolver solver = s.make_solver(a.complex_solver ? SolverKind::complex_dense : SolverKind::real_dense);
  const double ds = a.delta_s.value_or(s.fields.signal.detuning);
  const auto shifts = doppler_shifts(a.velocity, s.sweep.geometry, s.fields.pump.k, s.fields.signal.k);

  SteadyStateInfo info;
  std::optional<DensityMatrix> rho;
  try {
    rho = solver.solve(ds, shifts, &info);
  } catch (const PhysicsError& e) {
    throw PhysicsError(fmt::format("cell (delta_s={:.6g}, v={:.6g} m/s): {}", ds, a.velocity, e.what()));
  }
  if (!a.dump.empty()) {
    const Liouvillian L = solver.liouvillian(ds, shifts);
    write_file(a.dump, [&](std::ostream& os) { dump_liouvillian(os, L); });
  }

  const auto& sc = s.scheme;
  fmt::print("scenario {}  ({} levels, {} unknowns)\n", s.name, sc.size(), solver.layout().size());
  fmt::print("delta_s = {:.6g} gamma_a, v = {:.6g} m/s, geometry {}, shifts (pump {:.6g}, signal {:.6g})\n", ds,
             a.velocity, to_string(s.sweep.geometry), shifts.pump, shifts.signal);
  fmt::print("\npopulations\n");
  for (std::size_t i = 0; i < sc.size(); ++i) {
    fmt::print("  {:<8} {:>22.15e}\n", sc.level(i).id.label(), (*rho)(i, i).real());
  }
  const auto signal = s.transitions.for_field(FieldRole::signal);
  if (!signal.empty()) {
    fmt::print("\nsignal coherences rho(upper, lower)\n");
    for (const auto& t : signal) {
      const cplx c = (*rho)(t.upper, t.lower);
      fmt::print("  {:<8} {:<8} q={:+d} a={:<9.6g} {:>+.9e} {:>+.9e}i\n", sc.level(t.upper).id.label(),
                 sc.level(t.lower).id.label(), t.q, t.strength, c.real(), c.imag());
    }
    const auto r = response_from_density(*rho, s.transitions, s.fields.signal.polarization, s.medium);
    fmt::print("\nresponse\n  phi_plus  {:.12g} rad\n  phi_minus {:.12g} rad\n  alpha_plus  {:.12g}\n"
               "  alpha_minus {:.12g}\n  phi_d {:.9g} deg\n  alpha_d {:.12g}\n",
               r.phi_plus(), r.phi_minus(), r.alpha_plus(), r.alpha_minus(), r.phi_d() / kDeg, r.alpha_d());
  }
  const bool ok = std::abs(rho->trace() - 1) <= 1e-8 && rho->hermiticity_error() <= 1e-10 &&
                  rho->min_population() >= -1e-8;
  fmt::print("\nchecks  trace-1 {:.3g}  hermiticity {:.3g}  min population {:.3g}  residual {:.3g} (bound {:.3g})  "
             "rcond {:.3g}  {}\n",
             rho->trace() - 1, rho->hermiticity_error(), rho->min_population(), info.residual,
             1e-9 * std::max(1.0, info.m_norm), info.rcond, ok ? "ok" : "FAILED");
  if (!ok) throw PhysicsError("steady state violates the density-matrix invariants");
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  Source src;
  std::string out;
  unsigned workers = 1;
  std::string geometry;
  std::optional<std::size_t> detunings;
  std::optional<std::size_t> velocities;
  std::string grid;
  bool pump_off = false;
  std::string checkpoint;
  bool quiet = false;
};

int cmd_sweep(const SweepArgs& a) {
  Scenario s = a.src.load();
  if (!a.geometry.empty()) s.sweep.geometry = parse_geometry(a.geometry);
  if (a.pump_off) s.fields.pump.rabi = 0.0;
  if (a.detunings) {
    s.sweep.detunings = linear_detunings(s.sweep.detunings.front(), s.sweep.detunings.back(), *a.detunings);
  }
  if (a.velocities || !a.grid.empty()) {
    const auto& g = s.sweep.grid;
    const std::size_t n = a.velocities.value_or(g.points.size());
    std::string type = a.grid;
    if (type.empty()) type = g.span > 0 ? "uniform" : "gauss_hermite";
    if (type == "uniform") {
      s.sweep.grid = VelocityGrid::uniform(n, g.temperature_K, g.mass_amu, g.span > 0 ? g.span : 4.0);
    } else if (type == "gauss_hermite") {
      s.sweep.grid = VelocityGrid::gauss_hermite(n, g.temperature_K, g.mass_amu);
    } else {
      throw InputError("unknown --grid '" + type + "' (uniform or gauss_hermite)");
    }
  }
  const CellSolver solver = s.make_solver();
  SweepOptions opt;
  opt.workers = a.workers == 0 ? max_workers() : a.workers;
  opt.progress = !a.quiet;
  if (!a.checkpoint.empty()) opt.checkpoint = a.checkpoint;
  else if (!a.out.empty() && a.out != "-") opt.checkpoint = a.out + ".ckpt";

  const auto t0 = std::chrono::steady_clock::now();
  const auto responses = sweep(solver, s.sweep, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(a.out, [&](std::ostream& os) {
    write_sweep_csv(os, s.sweep.detunings, responses,
                    {{"scenario", s.name},
                     {"geometry", to_string(s.sweep.geometry)},
                     {"velocities", std::to_string(s.sweep.grid.points.size())},
                     {"pump_rabi", fmt::format("{:.17g}", s.fields.pump.rabi)}});
  });
  if (!a.quiet) {
    fmt::print(stderr, "sweep: {} detunings x {} velocities in {:.1f} s on {} worker(s)\n", s.sweep.detunings.size(),
               s.sweep.grid.points.size(), secs, opt.workers);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct LcrArgs {
  Source src;
  std::optional<double> alpha_d;
  std::optional<double> phi_d_deg;
  double alpha_minus = 0.0;
  std::optional<double> delta_s;
  std::vector<double> theta_deg;
  std::string out;
};

int cmd_lcr(const LcrArgs& a) {
  AnalyzerSpec analyzer;
  OpticalResponse response;
  if (a.alpha_d || a.phi_d_deg) {
    if (!a.alpha_d || !a.phi_d_deg) throw InputError("give both --alpha-d and --phi-d-deg");
    if (a.src.given()) analyzer = a.src.load().analyzer;
    response = OpticalResponse(*a.phi_d_deg * kDeg, 0.0, *a.alpha_d + a.alpha_minus, a.alpha_minus);
  } else {
    const Scenario s = a.src.load();
    analyzer = s.analyzer;
    const CellSolver solver = s.make_solver();
    const double ds = a.delta_s.value_or(s.fields.signal.detuning);
    response = average_response(solver, ds, s.sweep.geometry, s.sweep.grid);
    fmt::print(stderr, "response at delta_s = {:.6g}: phi_d = {:.6g} deg, alpha_d = {:.6g}, alpha_minus = {:.6g}\n",
               ds, response.phi_d() / kDeg, response.alpha_d(), response.alpha_minus());
  }
  LcrScan scan;
  if (!a.theta_deg.empty()) {
    std::vector<double> th;
    for (double d : a.theta_deg) th.push_back(d * kDeg);
    scan = synthesize_scan(response, analyzer.e0, th);
  } else {
    scan = synthesize_scan(response, analyzer.e0, analyzer.calibration,
                           triangular_voltages(analyzer.v_hi, analyzer.v_lo, analyzer.scan_points));
  }
  emit(a.out, [&](std::ostream& os) { write_scan_csv(os, scan); });
  return 0;
}

// ---------------------------------------------------------------------------

struct InvertArgs {
  Source src;
  std::string scan;
  std::optional<double> alpha_minus;
};

int cmd_invert(const InvertArgs& a) {
  const LcrCalibration cal = a.src.given() ? a.src.load().analyzer.calibration : LcrCalibration::default_anchors();
  std::ifstream in(a.scan);
  if (!in) throw IoError("cannot open scan file " + a.scan);
  const LcrScan scan = read_scan_csv(in, cal);
  const auto three = pick_three(scan.samples);
  std::optional<double> e0;
  if (a.alpha_minus) e0 = scan.e0;
  const auto r = invert_scan(three, e0, a.alpha_minus);
  fmt::print("method,alpha_d,phi_d_deg,phi_d_deg_alt,intensity_scale,residual\n");
  fmt::print("three-point,{:.12g},{:.12g},{:.12g},{:.12g},{:.3g}\n", r.alpha_d, r.phi_d / kDeg, -r.phi_d / kDeg,
             r.intensity_scale, r.residual);
  if (scan.samples.size() > 3) {
    const auto l = invert_scan_lsq(scan.samples);
    fmt::print("least-squares,{:.12g},{:.12g},{:.12g},{:.12g},{:.3g}\n", l.alpha_d, l.phi_d / kDeg, -l.phi_d / kDeg,
               l.intensity_scale, l.residual);
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_validate() {
  const auto results = run_validation_suite(load_table1());
  for (const auto& r : results) fmt::print("{} {:<28} {}\n", r.pass ? "PASS" : "FAIL", r.name, r.detail);
  const bool ok = all_passed(results);
  fmt::print("{}\n", ok ? "all checks passed" : "validation FAILED");
  return ok ? 0 : 1;
}

int cmd_export_table1(const std::string& out) {
  const auto t = load_table1();
  emit(out, [&](std::ostream& os) { write_branching_csv(os, t); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optically controlled waveplate model: steady states, Doppler sweeps, LCR analyser"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ocw 1.0");

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "Steady state and optical response of one (delta_s, v) cell");
  solve.src.attach(c_solve);
  c_solve->add_option("--delta-s", solve.delta_s, "Signal detuning, gamma_a");
  c_solve->add_option("--velocity", solve.velocity, "Atomic velocity along the beams, m/s");
  c_solve->add_option("--geometry", solve.geometry, "co or counter")->check(CLI::IsMember({"co", "counter"}));
  c_solve->add_option("--dump-liouvillian", solve.dump, "Write M and s to this file");
  c_solve->add_flag("--complex", solve.complex_solver, "Use the complex dense solver");

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Doppler-averaged response over the signal detuning list");
  sw.src.attach(c_sweep);
  c_sweep->add_option("--out", sw.out, "Output CSV (default stdout)");
  c_sweep->add_option("--workers", sw.workers, "Worker threads (0 = all cores)")->default_val(1);
  c_sweep->add_option("--geometry", sw.geometry, "co or counter")->check(CLI::IsMember({"co", "counter"}));
  c_sweep->add_option("--detunings", sw.detunings, "Override the number of detunings")->check(CLI::PositiveNumber);
  c_sweep->add_option("--velocities", sw.velocities, "Override the number of velocity points")
      ->check(CLI::PositiveNumber);
  c_sweep->add_option("--grid", sw.grid, "Velocity grid type: uniform or gauss_hermite");
  c_sweep->add_flag("--pump-off", sw.pump_off, "Set the pump Rabi frequency to zero");
  c_sweep->add_option("--checkpoint", sw.checkpoint, "Checkpoint file (default <out>.ckpt)");
  c_sweep->add_flag("--quiet", sw.quiet, "No progress output");

  LcrArgs lcr;
  auto* c_lcr = app.add_subcommand("lcr", "Synthesise an analyser scan");
  lcr.src.attach(c_lcr);
  c_lcr->add_option("--alpha-d", lcr.alpha_d, "Differential attenuation");
  c_lcr->add_option("--phi-d-deg", lcr.phi_d_deg, "Differential retardance, degrees");
  c_lcr->add_option("--alpha-minus", lcr.alpha_minus, "Attenuation of the sigma- component");
  c_lcr->add_option("--delta-s", lcr.delta_s, "Signal detuning for a scenario-derived response, gamma_a");
  c_lcr->add_option("--theta-deg", lcr.theta_deg, "Retardance schedule, degrees (default: voltage scan)")
      ->delimiter(',');
  c_lcr->add_option("--out", lcr.out, "Output CSV (default stdout)");

  InvertArgs inv;
  auto* c_inv = app.add_subcommand("invert", "Recover alpha_d and phi_d from an analyser scan");
  inv.src.attach(c_inv);
  c_inv->add_option("--scan", inv.scan, "Scan CSV")->required();
  c_inv->add_option("--alpha-minus", inv.alpha_minus, "Check the fitted scale against E0*exp(-2 alpha_-)");

  auto* c_val = app.add_subcommand("validate", "Run the embedded invariant checks");

  std::string table_out;
  auto* c_tab = app.add_subcommand("export-table1", "Write the effective 6S -> 5S branching table as CSV");
  c_tab->add_option("--out", table_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*c_solve) return cmd_solve(solve);
    if (*c_sweep) return cmd_sweep(sw);
    if (*c_lcr) return cmd_lcr(lcr);
    if (*c_inv) return cmd_invert(inv);
    if (*c_val) return cmd_validate();
    if (*c_tab) return cmd_export_table1(table_out);
  } catch (const IoError& e) {
    fmt::print(stderr, "ocw: I/O error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "ocw: error: {}\n", e.what());
    return 1;
  }
  return 1;
}
