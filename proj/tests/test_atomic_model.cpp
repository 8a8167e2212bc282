#include <cmath>
#include <map>
#include <string>

#include "doctest.h"
#include "ocw/atomic_model.hpp"
#include "ocw/error.hpp"
#include "ocw/scenario.hpp"

using namespace ocw;

namespace {

std::map<std::string, double> rates_by_label(const LevelScheme& scheme, const std::vector<RateTo>& rates) {
  std::map<std::string, double> out;
  for (const auto& r : rates) out[scheme.level(r.target).id.label()] += r.rate;
  return out;
}

std::string reduced_without_fallback() {
  std::string text(preset_source("fig7-reduced"));
  const std::string key = ",\n    \"fallback\": \"G1\"";
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  text.erase(pos, key.size());
  return text;
}

}  // namespace

TEST_CASE("F'=1 mF=+1 decays with the tabulated fractions") {
  const Scenario sc = load_preset("fig7-full");
  const auto& scheme = sc.scheme;
  const auto i = scheme.index_of({"E1", 1, 1, false});
  const auto rates = rates_by_label(scheme, decay_distribution(i, scheme, 1.0));
  CHECK(rates.at("G2:+2") == doctest::Approx(1.0 / 2).epsilon(1e-13));
  CHECK(rates.at("G2:+1") == doctest::Approx(1.0 / 4).epsilon(1e-13));
  CHECK(rates.at("G2:0") == doctest::Approx(1.0 / 12).epsilon(1e-13));
  // Both F=1 channels (1/12 each) land in the lumped slot.
  CHECK(rates.at("G1") == doctest::Approx(1.0 / 6).epsilon(1e-13));
  CHECK(rates.size() == 4);
}

TEST_CASE("F'=2 mF=0 decay distribution") {
  const Scenario sc = load_preset("fig7-full");
  const auto i = sc.scheme.index_of({"E2", 2, 0, false});
  const auto rates = rates_by_label(sc.scheme, decay_distribution(i, sc.scheme, 2.0));
  CHECK(rates.at("G2:-1") == doctest::Approx(2.0 / 4).epsilon(1e-13));
  CHECK(rates.at("G2:+1") == doctest::Approx(2.0 / 4).epsilon(1e-13));
  CHECK(rates.count("G2:0") == 0);
  CHECK(rates.at("G1") == doctest::Approx(2.0 * (1.0 / 12 + 1.0 / 3 + 1.0 / 12)).epsilon(1e-13));
}

TEST_CASE("decay distributions sum to the requested rate") {
  for (const auto& name : preset_names()) {
    const Scenario sc = load_preset(name);
    if (sc.scheme.decay_config().model != DecayModel::dipole) continue;
    for (std::size_t i = 0; i < sc.scheme.size(); ++i) {
      const auto& lv = sc.scheme.level(i);
      if (lv.id.lumped || sc.scheme.manifold(lv.manifold).decays_to.empty()) continue;
      double total = 0.0;
      for (const auto& r : decay_distribution(i, sc.scheme, 0.7)) {
        CHECK(r.rate >= 0.0);
        total += r.rate;
      }
      CHECK(total == doctest::Approx(0.7).epsilon(1e-13));
    }
  }
}

TEST_CASE("decay_distribution rejects ground levels") {
  const Scenario sc = load_preset("fig7-full");
  CHECK_THROWS_AS(decay_distribution(sc.scheme.index_of({"G2", 2, 0, false}), sc.scheme, 1.0), InputError);
}

TEST_CASE("decay into a missing sublevel without fallback is reported") {
  const Scenario sc = parse_scenario(reduced_without_fallback());
  const auto i = sc.scheme.index_of({"E1", 1, 1, false});
  CHECK_THROWS_AS(decay_distribution(i, sc.scheme, 1.0), PhysicsError);
}

TEST_CASE("published effective branching table") {
  const BranchingTable t = load_table1();
  CHECK(t.rows().size() == 8);
  CHECK(t.cols().size() == 8);
  CHECK(t.at({"G", 2, -2, false}, {"U", 2, -2, false}) == doctest::Approx(0.68852));
  CHECK(t.at({"G", 1, 0, false}, {"U", 1, 0, false}) == doctest::Approx(0.199));
  CHECK(t.at({"G", 2, 0, false}, {"U", 1, 0, false}) == doctest::Approx(0.125));
  CHECK(t.max_column_deviation() < 1e-3);
  const auto& f = t.fraction();
  CHECK(f.minCoeff() >= 0.0);
  CHECK(f.maxCoeff() <= 1.0);
  // Mirror symmetry mF -> -mF in both indices.
  for (const auto& r : t.rows()) {
    for (const auto& c : t.cols()) {
      const SublevelId rm{r.group, r.F, -r.mF, false};
      const SublevelId cm{c.group, c.F, -c.mF, false};
      CHECK(t.at(r, c) == doctest::Approx(t.at(rm, cm)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(t.at({"G", 3, 0, false}, {"U", 1, 0, false}), InputError);
}

TEST_CASE("effective_branching composes stochastic tables") {
  const angular::HyperfineLine down1{1, 3, 3};  // 6S1/2 -> 5P3/2
  const angular::HyperfineLine down2{3, 1, 3};  // 5P3/2 -> 5S1/2
  const auto upper = dipole_branching(down1, "U", {2, 1}, "P", {0, 1, 2, 3});
  const auto lower = dipole_branching(down2, "P", {0, 1, 2, 3}, "G", {2, 1});
  CHECK(upper.max_column_deviation() < 1e-13);
  CHECK(lower.max_column_deviation() < 1e-13);
  const auto eff = effective_branching(upper, lower);
  CHECK(eff.max_column_deviation() < 1e-13);
  CHECK(eff.rows() == lower.rows());
  CHECK(eff.cols() == upper.cols());

  // Brute-force path sum for one entry.
  double path = 0.0;
  for (const auto& mid : upper.rows()) {
    path += lower.at({"G", 2, -2, false}, mid) * upper.at(mid, {"U", 1, -1, false});
  }
  CHECK(eff.at({"G", 2, -2, false}, {"U", 1, -1, false}) == doctest::Approx(path).epsilon(1e-14));

  SUBCASE("identity composition") {
    const std::vector<SublevelId> ids = lower.rows();
    const BranchingTable id(ids, ids, Eigen::MatrixXd::Identity(8, 8));
    const auto same = effective_branching(eff, id);
    CHECK((same.fraction() - eff.fraction()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("mismatched intermediate manifold") {
    CHECK_THROWS_AS(effective_branching(lower, upper), InputError);
  }
}

TEST_CASE("dipole composition reproduces the published stretched entry" * doctest::may_fail()) {
  const auto upper = dipole_branching({1, 3, 3}, "U", {2, 1}, "P", {0, 1, 2, 3});
  const auto lower = dipole_branching({3, 1, 3}, "P", {0, 1, 2, 3}, "G", {2, 1});
  const auto eff = effective_branching(upper, lower);
  MESSAGE("computed stretched fraction " << eff.at({"G", 2, -2, false}, {"U", 2, -2, false}));
  CHECK(eff.at({"G", 2, -2, false}, {"U", 2, -2, false}) == doctest::Approx(0.68852).epsilon(1e-3));
}

TEST_CASE("branching table rejects mismatched labels") {
  CHECK_THROWS_AS(BranchingTable({{"G", 1, 0, false}}, {{"U", 1, 0, false}}, Eigen::MatrixXd::Zero(2, 1)),
                  InputError);
}

TEST_CASE("transition strengths are normalised per field") {
  for (const auto& name : preset_names()) {
    const Scenario sc = load_preset(name);
    for (const FieldRole role : {FieldRole::pump, FieldRole::signal}) {
      const auto tr = sc.transitions.for_field(role);
      if (tr.empty()) continue;
      double weakest = 1e300;
      for (const auto& t : tr) weakest = std::min(weakest, std::abs(t.strength));
      CHECK(weakest == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  const Scenario full = load_preset("fig7-full");
  const auto sig = full.transitions.for_field(FieldRole::signal);
  double strongest = 0.0;
  for (const auto& t : sig) strongest = std::max(strongest, std::abs(t.strength));
  CHECK(strongest == doctest::Approx(std::sqrt(6.0)).epsilon(1e-13));
  CHECK(full.transitions.weakest_branching(FieldRole::signal) == doctest::Approx(1.0 / 12).epsilon(1e-13));
  CHECK(full.transitions.weakest_branching(FieldRole::pump) == doctest::Approx(1.0 / 12).epsilon(1e-13));
  for (const auto& t : full.transitions.entries()) {
    CHECK(t.q == full.scheme.level(t.upper).id.mF - full.scheme.level(t.lower).id.mF);
  }
}

TEST_CASE("decay network conserves population and matches configured rates") {
  for (const auto& name : preset_names()) {
    const Scenario sc = load_preset(name);
    const DecayNetwork net = build_decay_network(sc.scheme);
    std::vector<double> out(sc.scheme.size(), 0.0);
    for (const auto& c : net.channels()) {
      CHECK(c.rate > 0.0);
      CHECK(c.from != c.to);
      out[c.from] += c.rate;
    }
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(net.loss()[i]));
  }
  const Scenario sc = load_preset("fig7-full");
  const DecayNetwork net = build_decay_network(sc.scheme);
  const double gg = sc.scheme.decay().gamma_g;
  CHECK(gg == doctest::Approx(0.1 / 5.75));
  for (std::size_t i = 0; i < sc.scheme.size(); ++i) {
    const auto role = sc.scheme.manifold_of(i).role;
    if (role == ManifoldRole::intermediate) CHECK(net.loss()[i] == doctest::Approx(1.0).epsilon(1e-12));
    if (role == ManifoldRole::upper) CHECK(net.loss()[i] == doctest::Approx(0.6).epsilon(1e-12));
  }
}

TEST_CASE("level scheme lookups") {
  const Scenario sc = load_preset("fig7-full");
  CHECK(sc.scheme.size() == 17);
  CHECK(load_preset("fig7-reduced").scheme.size() == 15);
  CHECK(load_preset("fig7-reservoir").scheme.size() == 18);
  CHECK_FALSE(sc.scheme.find({"G2", 2, 3, false}).has_value());
  CHECK_THROWS_AS(sc.scheme.index_of({"X", 0, 0, false}), InputError);
  CHECK(sc.scheme.resolve_target("5S1/2", 1, 0) == sc.scheme.find({"G1", 1, 0, true}));
  CHECK(sc.scheme.group_offset("E2") == doctest::Approx(141.4));
}
