#include "ocw/validate.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "ocw/doppler.hpp"
#include "ocw/polarimetry.hpp"
#include "ocw/scenario.hpp"

namespace ocw {

namespace {

using Check = std::function<std::pair<bool, std::string>()>;

std::pair<bool, std::string> table_column_sums(const BranchingTable& t) {
  const double dev = t.max_column_deviation();
  return {dev <= 2e-3, fmt::format("max |column sum - 1| = {:.3g}", dev)};
}

std::pair<bool, std::string> table_reflection(const BranchingTable& t) {
  double worst = 0.0;
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    for (std::size_t c = 0; c < t.cols().size(); ++c) {
      SublevelId rr = t.rows()[r];
      SublevelId cc = t.cols()[c];
      rr.mF = -rr.mF;
      cc.mF = -cc.mF;
      worst = std::max(worst, std::abs(t.fraction()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -
                                       t.at(rr, cc)));
    }
  }
  return {worst == 0.0, fmt::format("max mirror difference {:.3g}", worst)};
}

std::pair<bool, std::string> table_range(const BranchingTable& t) {
  const bool ok = t.fraction().minCoeff() >= 0.0 && t.fraction().maxCoeff() <= 1.0;
  return {ok, fmt::format("entries in [{:.6g}, {:.6g}]", t.fraction().minCoeff(), t.fraction().maxCoeff())};
}

std::pair<bool, std::string> decay_example() {
  const Scenario s = load_preset("fig7-full");
  const auto& sc = s.scheme;
  const std::size_t e = sc.index_of({"E2", 2, 0, false});
  double m1 = 0, p1 = 0, z = 0, f1 = 0, total = 0;
  for (const auto& r : decay_distribution(e, sc, 1.0)) {
    const auto& id = sc.level(r.target).id;
    total += r.rate;
    if (id.group == "G1") f1 += r.rate;
    if (id.group == "G2" && id.mF == -1) m1 += r.rate;
    if (id.group == "G2" && id.mF == 1) p1 += r.rate;
    if (id.group == "G2" && id.mF == 0) z += r.rate;
  }
  const bool ok = std::abs(m1 - 0.25) < 1e-12 && std::abs(p1 - 0.25) < 1e-12 && z == 0.0 &&
                  std::abs(f1 - 0.5) < 1e-12 && std::abs(total - 1.0) < 1e-12;
  return {ok, fmt::format("F'=2 mF=0 -> mF=-1: {:.12g}, +1: {:.12g}, 0: {:.12g}, F=1: {:.12g} (gamma_a)", m1, p1, z, f1)};
}

std::pair<bool, std::string> strength_ratios() {
  const angular::HyperfineLine d1{1, 1, 3};
  const double sp = relative_strength(d1, 2, 0, 2, -1, 1);
  const double sm = relative_strength(d1, 2, 0, 2, 1, -1);
  const double pi = relative_strength(d1, 2, 0, 2, 0, 0);
  const double sp1 = relative_strength(d1, 2, 0, 1, -1, 1);
  const double sm1 = relative_strength(d1, 2, 0, 1, 1, -1);
  const double pi1 = relative_strength(d1, 2, 0, 1, 0, 0);
  const bool ok = std::abs(std::abs(sp) - std::abs(sm)) < 1e-14 && pi == 0.0 &&
                  std::abs(std::abs(sm1) / std::abs(sp1) - 1) < 1e-12 &&
                  std::abs(std::abs(pi1) / std::abs(sp1) - 2) < 1e-12;
  return {ok, fmt::format("to F=2 {:.6g}:{:.6g}:{:.6g}, to F=1 1:{:.6g}:{:.6g}", std::abs(sp), std::abs(sm),
                          std::abs(pi), std::abs(sm1 / sp1), std::abs(pi1 / sp1))};
}

std::pair<bool, std::string> signal_strengths() {
  const Scenario s = load_preset("fig7-full");
  double lo = 1e300, hi = 0;
  for (const auto& t : s.transitions.for_field(FieldRole::signal)) {
    lo = std::min(lo, std::abs(t.strength));
    hi = std::max(hi, std::abs(t.strength));
  }
  const double b = s.transitions.weakest_branching(FieldRole::signal);
  const bool ok = std::abs(hi / lo - std::sqrt(6.0)) < 1e-12 && std::abs(b - 1.0 / 12) < 1e-12;
  return {ok, fmt::format("strongest/weakest signal amplitude {:.12g}, b_min^2 = {:.12g}", hi / lo, b)};
}

std::pair<bool, std::string> eq1_cases() {
  const cplx a(0.0, 1.0);
  const cplx alpha = a / (a - 1.0);
  const cplx beta = 1.0 / (a - 1.0);
  const double q = overlap(ideal_probe_state(alpha, beta, std::numbers::pi / 2), sigma_plus_vector());
  const double y = overlap(ideal_probe_state(alpha, beta, 0.0), JonesVector(0.0, 1.0));
  const double x = overlap(ideal_probe_state(1.0, 0.0, std::numbers::pi), JonesVector(1.0, 0.0));
  const bool ok = std::abs(q - 1) < 1e-10 && std::abs(y - 1) < 1e-10 && std::abs(x - 1) < 1e-10;
  return {ok, fmt::format("|<s+|p>| = {:.15g}, |<y|p(0)>| = {:.15g}, |<x|p(pi)>| = {:.15g}", q, y, x)};
}

std::pair<bool, std::string> jones_chain() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double am = 2 * u(rng), ap = 2 * u(rng), pm = 6.3 * u(rng), pp = 6.3 * u(rng), th = std::numbers::pi * u(rng);
    const OpticalResponse r(pp, pm, ap, am);
    const double a = detector_intensity(1.0, r.alpha_minus(), r.alpha_d(), r.phi_d(), th);
    const double b = detector_intensity_chain(1.0, r, th);
    worst = std::max(worst, std::abs(a - b));
  }
  return {worst <= 1e-12, fmt::format("max |closed form - Jones chain| = {:.3g} over 1000 draws", worst)};
}

std::pair<bool, std::string> inversion_example() {
  const OpticalResponse r(2.0, 0.0, 0.3, 0.0);
  const std::vector<double> th{std::numbers::pi / 6, std::numbers::pi / 2, 5 * std::numbers::pi / 6};
  const LcrScan scan = synthesize_scan(r, 1.0, th);
  const auto inv = invert_scan({scan.samples[0], scan.samples[1], scan.samples[2]}, 1.0, 0.0);
  const bool ok = std::abs(inv.alpha_d - 0.3) < 1e-6 && std::abs(inv.phi_d - 2.0) < 1e-6;
  return {ok, fmt::format("recovered alpha_d = {:.12g}, phi_d = {:.12g} rad", inv.alpha_d, inv.phi_d)};
}

std::pair<bool, std::string> two_level() {
  const Scenario s = load_preset("two-level-oracle");
  const auto rho = s.make_solver().solve(0.0, {});
  const double ee = rho(1, 1).real();
  return {std::abs(ee - 1.0 / 3) < 1e-9, fmt::format("excited population {:.15g}", ee)};
}

std::pair<bool, std::string> full_model_invariants() {
  const Scenario s = load_preset("fig7-full");
  SteadyStateInfo info;
  const auto rho = s.make_solver().solve(0.0, {}, &info);
  const bool ok = std::abs(rho.trace() - 1) < 1e-8 && rho.hermiticity_error() < 1e-10 &&
                  rho.min_population() > -1e-8 && info.residual <= 1e-9 * std::max(1.0, info.m_norm);
  return {ok, fmt::format("trace-1 {:.2g}, hermiticity {:.2g}, min population {:.3g}, residual {:.2g}",
                          rho.trace() - 1, rho.hermiticity_error(), rho.min_population(), info.residual)};
}

}  // namespace

std::vector<CheckResult> run_validation_suite(const BranchingTable& table1) {
  const std::vector<std::pair<std::string, Check>> checks{
      {"table1-column-sums", [&] { return table_column_sums(table1); }},
      {"table1-range", [&] { return table_range(table1); }},
      {"table1-mirror-symmetry", [&] { return table_reflection(table1); }},
      {"decay-distribution-F'2-mF0", decay_example},
      {"strength-ratios-F'2-mF0", strength_ratios},
      {"signal-strengths", signal_strengths},
      {"probe-state-special-cases", eq1_cases},
      {"jones-chain-consistency", jones_chain},
      {"inversion-round-trip", inversion_example},
      {"two-level-steady-state", two_level},
      {"full-model-invariants", full_model_invariants},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    try {
      auto [ok, detail] = fn();
      out.push_back({name, ok, detail});
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("error: ") + e.what()});
    }
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace ocw
