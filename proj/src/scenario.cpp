#include "ocw/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ocw/error.hpp"
#include "ocw/presets_data.hpp"

namespace ocw {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

class Reader {
 public:
  Reader(std::string origin, double gamma_a_mhz) : origin_(std::move(origin)), gamma_a_mhz_(gamma_a_mhz) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw InputError(fmt::format("{}: {}: {}", origin_, path, msg));
  }

  void keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!ok.count(k)) fail(path, fmt::format("unknown key '{}'", k));
    }
  }

  const json& need(const json& j, const std::string& path, const char* key) const {
    if (!j.contains(key)) fail(path, fmt::format("missing required key '{}'", key));
    return j.at(key);
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
  }

  long integer(const json& j, const std::string& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  bool boolean(const json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  /// Frequency in gamma_a units: a bare number, or {"value", "unit"} with
  /// unit gamma_a, MHz or GHz.
  double frequency(const json& j, const std::string& path) const {
    if (j.is_number()) return j.get<double>();
    keys(j, path, {"value", "unit"});
    const double v = number(need(j, path, "value"), path + ".value");
    const std::string unit = string(need(j, path, "unit"), path + ".unit");
    if (unit == "gamma_a") return v;
    if (unit == "MHz") return v / gamma_a_mhz_;
    if (unit == "GHz") return 1e3 * v / gamma_a_mhz_;
    fail(path + ".unit", fmt::format("unknown unit '{}' (expected gamma_a, MHz or GHz)", unit));
  }

  std::vector<double> numbers(const json& j, const std::string& path) const {
    if (!j.is_array()) fail(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], fmt::format("{}[{}]", path, i)));
    return out;
  }

  cplx complex(const json& j, const std::string& path) const {
    if (j.is_number()) return {j.get<double>(), 0.0};
    const auto v = numbers(j, path);
    if (v.size() != 2) fail(path, "expected a number or [re, im]");
    return {v[0], v[1]};
  }

 private:
  std::string origin_;
  double gamma_a_mhz_;
};

FieldRole parse_role(const Reader& r, const json& j, const std::string& path) {
  const std::string s = r.string(j, path);
  if (s == "pump") return FieldRole::pump;
  if (s == "signal") return FieldRole::signal;
  r.fail(path, fmt::format("unknown field '{}' (expected pump or signal)", s));
}

ManifoldRole parse_manifold_role(const Reader& r, const json& j, const std::string& path) {
  const std::string s = r.string(j, path);
  if (s == "ground") return ManifoldRole::ground;
  if (s == "intermediate") return ManifoldRole::intermediate;
  if (s == "upper") return ManifoldRole::upper;
  if (s == "reservoir") return ManifoldRole::reservoir;
  r.fail(path, fmt::format("unknown manifold role '{}'", s));
}

Polarization parse_polarization(const Reader& r, const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "sigma+") return {1.0, 0.0};
    if (s == "sigma-") return {0.0, 1.0};
    if (s == "x") return polarization_of(JonesVector(1.0, 0.0));
    if (s == "y") return polarization_of(JonesVector(0.0, 1.0));
    r.fail(path, fmt::format("unknown polarisation '{}' (sigma+, sigma-, x, y)", s));
  }
  if (j.is_object() && j.contains("linear_deg")) {
    r.keys(j, path, {"linear_deg"});
    const double a = r.number(j.at("linear_deg"), path + ".linear_deg") * kDeg;
    return polarization_of(JonesVector(std::cos(a), std::sin(a)));
  }
  r.keys(j, path, {"alpha", "beta"});
  Polarization p{r.complex(r.need(j, path, "alpha"), path + ".alpha"),
                 r.complex(r.need(j, path, "beta"), path + ".beta")};
  if (std::abs(p.norm_sq() - 1.0) > 1e-12) {
    r.fail(path, fmt::format("|alpha|^2 + |beta|^2 = {:.15g}, expected 1", p.norm_sq()));
  }
  return p;
}

// "G2:-2", "E1:+1", "G2:0" or a bare group name for lumped levels.
SublevelId parse_level_ref(const Reader& r, const json& j, const std::string& path,
                           const std::vector<LevelGroupSpec>& groups) {
  const std::string s = r.string(j, path);
  const auto colon = s.find(':');
  const std::string group = s.substr(0, colon);
  for (const auto& g : groups) {
    if (g.group != group) continue;
    if (colon == std::string::npos) {
      if (!g.lumped) r.fail(path, fmt::format("'{}' is resolved; write {}:<mF>", group, group));
      return {group, g.F, 0, true};
    }
    if (g.lumped) r.fail(path, fmt::format("'{}' is lumped and has no mF", group));
    int mf = 0;
    try {
      mf = std::stoi(s.substr(colon + 1));
    } catch (const std::exception&) {
      r.fail(path, fmt::format("bad mF in '{}'", s));
    }
    const bool listed = g.mf.empty() ? std::abs(mf) <= g.F : std::find(g.mf.begin(), g.mf.end(), mf) != g.mf.end();
    if (!listed) r.fail(path, fmt::format("level '{}' is not part of the scheme", s));
    return {group, g.F, mf, false};
  }
  r.fail(path, fmt::format("unknown level group '{}'", group));
}

}  // namespace

CellSolver Scenario::make_solver(SolverKind kind) const {
  return CellSolver(scheme, transitions, fields, medium, kind);
}

Scenario parse_scenario(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("{}: {}", origin, e.what()));
  }
  {
    const Reader pre(origin, 5.75);
    pre.keys(doc, "$", {"schema_version", "name", "description", "units", "nuclear_spin", "manifolds", "levels",
                        "couplings", "decay", "fields", "medium", "sweep", "analyzer"});
    const long version = pre.integer(pre.need(doc, "$", "schema_version"), "$.schema_version");
    if (version != kScenarioSchemaVersion) {
      pre.fail("$.schema_version", fmt::format("unsupported version {} (this build reads {})", version,
                                               kScenarioSchemaVersion));
    }
  }

  double gamma_a_mhz = 5.75;
  if (doc.contains("units")) {
    const Reader pre(origin, 5.75);
    pre.keys(doc["units"], "$.units", {"gamma_a_mhz"});
    if (doc["units"].contains("gamma_a_mhz")) {
      gamma_a_mhz = pre.number(doc["units"]["gamma_a_mhz"], "$.units.gamma_a_mhz");
      if (!(gamma_a_mhz > 0)) pre.fail("$.units.gamma_a_mhz", "must be positive");
    }
  }
  const Reader r(origin, gamma_a_mhz);

  const std::string name = r.string(r.need(doc, "$", "name"), "$.name");
  const std::string description = doc.contains("description") ? r.string(doc["description"], "$.description") : "";
  const double nuclear_spin = doc.contains("nuclear_spin") ? r.number(doc["nuclear_spin"], "$.nuclear_spin") : 1.5;
  const int two_i = static_cast<int>(std::lround(2 * nuclear_spin));

  // Manifolds.
  std::vector<Manifold> manifolds;
  const json& jm = r.need(doc, "$", "manifolds");
  if (!jm.is_array() || jm.empty()) r.fail("$.manifolds", "expected a non-empty array");
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const std::string p = fmt::format("$.manifolds[{}]", i);
    r.keys(jm[i], p, {"name", "J", "role", "frame", "decays_to"});
    Manifold m;
    m.name = r.string(r.need(jm[i], p, "name"), p + ".name");
    m.two_j = static_cast<int>(std::lround(2 * r.number(r.need(jm[i], p, "J"), p + ".J")));
    m.role = parse_manifold_role(r, r.need(jm[i], p, "role"), p + ".role");
    if (jm[i].contains("frame")) {
      const json& f = jm[i]["frame"];
      if (!f.is_array()) r.fail(p + ".frame", "expected an array");
      for (std::size_t k = 0; k < f.size(); ++k) m.frame.push_back(parse_role(r, f[k], fmt::format("{}.frame[{}]", p, k)));
    }
    if (jm[i].contains("decays_to")) m.decays_to = r.string(jm[i]["decays_to"], p + ".decays_to");
    manifolds.push_back(std::move(m));
  }

  // Level groups.
  std::vector<LevelGroupSpec> groups;
  const json& jl = r.need(doc, "$", "levels");
  if (!jl.is_array() || jl.empty()) r.fail("$.levels", "expected a non-empty array");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string p = fmt::format("$.levels[{}]", i);
    r.keys(jl[i], p, {"group", "manifold", "F", "lumped", "mF", "offset", "multiplicity"});
    LevelGroupSpec g;
    g.group = r.string(r.need(jl[i], p, "group"), p + ".group");
    if (g.group.find(':') != std::string::npos) r.fail(p + ".group", "group names may not contain ':'");
    g.manifold = r.string(r.need(jl[i], p, "manifold"), p + ".manifold");
    g.F = static_cast<int>(r.integer(r.need(jl[i], p, "F"), p + ".F"));
    if (g.F < 0) r.fail(p + ".F", "must be >= 0");
    if (jl[i].contains("lumped")) g.lumped = r.boolean(jl[i]["lumped"], p + ".lumped");
    if (jl[i].contains("mF")) {
      if (g.lumped) r.fail(p + ".mF", "lumped levels carry no mF");
      const json& mf = jl[i]["mF"];
      if (!mf.is_array() || mf.empty()) r.fail(p + ".mF", "expected a non-empty array");
      for (std::size_t k = 0; k < mf.size(); ++k) {
        g.mf.push_back(static_cast<int>(r.integer(mf[k], fmt::format("{}.mF[{}]", p, k))));
      }
    }
    if (jl[i].contains("offset")) g.energy_offset = r.frequency(jl[i]["offset"], p + ".offset");
    if (jl[i].contains("multiplicity")) {
      g.multiplicity = static_cast<int>(r.integer(jl[i]["multiplicity"], p + ".multiplicity"));
      if (g.multiplicity < 1) r.fail(p + ".multiplicity", "must be >= 1");
    }
    groups.push_back(std::move(g));
  }

  // Decay.
  DecayParams dp;
  DecayConfig dc;
  {
    const json& jd = r.need(doc, "$", "decay");
    const std::string p = "$.decay";
    r.keys(jd, p, {"model", "gamma_a", "gamma_b", "gamma_g", "d1_d2_ratio", "d2_route", "reservoir",
                   "reservoir_rate", "fallback", "channels"});
    const std::string model = jd.contains("model") ? r.string(jd["model"], p + ".model") : "dipole";
    if (model == "dipole") {
      dc.model = DecayModel::dipole;
    } else if (model == "explicit") {
      dc.model = DecayModel::explicit_rates;
    } else {
      r.fail(p + ".model", fmt::format("unknown decay model '{}' (dipole or explicit)", model));
    }
    if (jd.contains("gamma_a")) dp.gamma_a = r.frequency(jd["gamma_a"], p + ".gamma_a");
    if (jd.contains("gamma_b")) dp.gamma_b = r.frequency(jd["gamma_b"], p + ".gamma_b");
    if (jd.contains("gamma_g")) dp.gamma_g = r.frequency(jd["gamma_g"], p + ".gamma_g");
    if (jd.contains("d1_d2_ratio")) dp.d1_d2_ratio = r.number(jd["d1_d2_ratio"], p + ".d1_d2_ratio");
    if (jd.contains("d2_route")) {
      const std::string s = r.string(jd["d2_route"], p + ".d2_route");
      if (s == "none") {
        dc.d2_route = D2Route::none;
      } else if (s == "table1") {
        dc.d2_route = D2Route::table1;
      } else if (s == "reservoir") {
        dc.d2_route = D2Route::reservoir;
      } else {
        r.fail(p + ".d2_route", fmt::format("unknown route '{}' (none, table1, reservoir)", s));
      }
    }
    if (jd.contains("reservoir")) dc.reservoir = parse_level_ref(r, jd["reservoir"], p + ".reservoir", groups);
    if (jd.contains("reservoir_rate")) dc.reservoir_rate = r.frequency(jd["reservoir_rate"], p + ".reservoir_rate");
    if (jd.contains("fallback")) dc.fallback = parse_level_ref(r, jd["fallback"], p + ".fallback", groups);
    if (jd.contains("channels")) {
      const json& ch = jd["channels"];
      if (!ch.is_array()) r.fail(p + ".channels", "expected an array");
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const std::string q = fmt::format("{}.channels[{}]", p, i);
        r.keys(ch[i], q, {"from", "to", "rate"});
        dc.channels.push_back({parse_level_ref(r, r.need(ch[i], q, "from"), q + ".from", groups),
                               parse_level_ref(r, r.need(ch[i], q, "to"), q + ".to", groups),
                               r.frequency(r.need(ch[i], q, "rate"), q + ".rate")});
      }
    }
    if (dc.model == DecayModel::explicit_rates && !dc.channels.empty() && dc.d2_route != D2Route::none) {
      r.fail(p + ".d2_route", "explicit decay models take no D2 route");
    }
  }
  if (dp.gamma_g > 0 && !(dp.gamma_g < dp.gamma_b && dp.gamma_b < dp.gamma_a)) {
    fmt::print(stderr, "warning: {}: decay rates outside gamma_g << gamma_b < gamma_a\n", origin);
  }

  LevelScheme scheme(std::move(manifolds), groups, dp, dc, two_i);

  // Couplings.
  TransitionTable transitions;
  {
    const json& jc = r.need(doc, "$", "couplings");
    const std::string p = "$.couplings";
    if (!jc.is_array()) r.fail(p, "expected an array");
    std::vector<CouplingSpec> dipole;
    std::vector<ExplicitTransition> explicit_entries;
    for (std::size_t i = 0; i < jc.size(); ++i) {
      const std::string q = fmt::format("{}[{}]", p, i);
      if (jc[i].contains("q") || jc[i].contains("strength")) {
        r.keys(jc[i], q, {"field", "upper", "lower", "q", "strength"});
        ExplicitTransition t;
        t.field = parse_role(r, r.need(jc[i], q, "field"), q + ".field");
        t.upper = parse_level_ref(r, r.need(jc[i], q, "upper"), q + ".upper", groups);
        t.lower = parse_level_ref(r, r.need(jc[i], q, "lower"), q + ".lower", groups);
        t.q = static_cast<int>(r.integer(r.need(jc[i], q, "q"), q + ".q"));
        t.strength = jc[i].contains("strength") ? r.number(jc[i]["strength"], q + ".strength") : 1.0;
        explicit_entries.push_back(t);
      } else {
        r.keys(jc[i], q, {"field", "upper", "lower"});
        dipole.push_back({parse_role(r, r.need(jc[i], q, "field"), q + ".field"),
                          r.string(r.need(jc[i], q, "lower"), q + ".lower"),
                          r.string(r.need(jc[i], q, "upper"), q + ".upper")});
      }
    }
    if (!dipole.empty() && !explicit_entries.empty()) {
      r.fail(p, "mixes group couplings with explicit transitions");
    }
    transitions = explicit_entries.empty() ? build_dipole_transitions(scheme, dipole)
                                           : build_explicit_transitions(scheme, explicit_entries);
  }

  // Fields.
  FieldSet fields;
  std::optional<double> signal_lambda;
  {
    const json& jf = r.need(doc, "$", "fields");
    r.keys(jf, "$.fields", {"pump", "signal"});
    for (FieldRole role : {FieldRole::pump, FieldRole::signal}) {
      const std::string p = fmt::format("$.fields.{}", to_string(role));
      FieldSpec& f = role == FieldRole::pump ? fields.pump : fields.signal;
      f.role = role;
      if (!jf.contains(to_string(role))) continue;
      const json& j = jf[to_string(role)];
      r.keys(j, p, {"rabi", "detuning", "polarization", "wavelength_nm"});
      if (j.contains("rabi")) f.rabi = r.frequency(j["rabi"], p + ".rabi");
      if (j.contains("detuning")) f.detuning = r.frequency(j["detuning"], p + ".detuning");
      if (j.contains("polarization")) f.polarization = parse_polarization(r, j["polarization"], p + ".polarization");
      if (j.contains("wavelength_nm")) {
        const double lambda = r.number(j["wavelength_nm"], p + ".wavelength_nm");
        f.k = doppler_k(lambda, gamma_a_mhz);
        if (role == FieldRole::signal) signal_lambda = lambda;
      }
    }
    fields.validate();
  }

  // Medium.
  MediumParams medium;
  medium.gamma = dp.gamma_b;
  medium.omega_min = fields.signal.rabi > 0 ? fields.signal.rabi : 1.0;
  medium.b_min_sq = transitions.weakest_branching(FieldRole::signal);
  if (signal_lambda) medium.lambda_nm = *signal_lambda;
  if (doc.contains("medium")) {
    const json& j = doc["medium"];
    const std::string p = "$.medium";
    r.keys(j, p, {"n_atom_cm3", "length_cm", "lambda_nm", "gamma", "omega_min", "b_min_sq"});
    if (j.contains("n_atom_cm3")) medium.n_atom = r.number(j["n_atom_cm3"], p + ".n_atom_cm3");
    if (j.contains("length_cm")) medium.length_cm = r.number(j["length_cm"], p + ".length_cm");
    if (j.contains("lambda_nm")) medium.lambda_nm = r.number(j["lambda_nm"], p + ".lambda_nm");
    if (j.contains("gamma")) medium.gamma = r.frequency(j["gamma"], p + ".gamma");
    if (j.contains("omega_min")) medium.omega_min = r.frequency(j["omega_min"], p + ".omega_min");
    if (j.contains("b_min_sq")) medium.b_min_sq = r.number(j["b_min_sq"], p + ".b_min_sq");
  }
  if (medium.b_min_sq == 0.0) {
    if (!transitions.for_field(FieldRole::signal).empty()) {
      r.fail("$.medium.b_min_sq", "required when signal strengths are not dipole-derived");
    }
    medium.b_min_sq = 1.0;
  }
  medium.validate();

  // Sweep.
  SweepSpec sweep;
  {
    double t_k = 403.0;
    double mass = 86.909;
    std::string grid_type = "gauss_hermite";
    std::size_t points = 1;
    double span = 4.0;
    double v0 = 0.0;
    double start = -1200, stop = 1200;
    std::size_t count = 512;
    if (doc.contains("sweep")) {
      const json& j = doc["sweep"];
      const std::string p = "$.sweep";
      r.keys(j, p, {"delta_s", "geometry", "velocity_grid", "temperature_K", "mass_amu"});
      if (j.contains("delta_s")) {
        const json& d = j["delta_s"];
        r.keys(d, p + ".delta_s", {"start", "stop", "count"});
        start = r.frequency(r.need(d, p + ".delta_s", "start"), p + ".delta_s.start");
        stop = r.frequency(r.need(d, p + ".delta_s", "stop"), p + ".delta_s.stop");
        if (d.contains("count")) {
          const long c = r.integer(d["count"], p + ".delta_s.count");
          if (c < 1) r.fail(p + ".delta_s.count", "must be >= 1");
          count = static_cast<std::size_t>(c);
        }
      }
      if (j.contains("geometry")) {
        try {
          sweep.geometry = parse_geometry(r.string(j["geometry"], p + ".geometry"));
        } catch (const InputError& e) {
          r.fail(p + ".geometry", e.what());
        }
      }
      if (j.contains("temperature_K")) t_k = r.number(j["temperature_K"], p + ".temperature_K");
      if (j.contains("mass_amu")) mass = r.number(j["mass_amu"], p + ".mass_amu");
      if (j.contains("velocity_grid")) {
        const json& g = j["velocity_grid"];
        const std::string q = p + ".velocity_grid";
        r.keys(g, q, {"type", "points", "span", "velocity"});
        grid_type = g.contains("type") ? r.string(g["type"], q + ".type") : grid_type;
        if (g.contains("points")) {
          const long n = r.integer(g["points"], q + ".points");
          if (n < 1) r.fail(q + ".points", "must be >= 1");
          points = static_cast<std::size_t>(n);
        }
        if (g.contains("span")) span = r.number(g["span"], q + ".span");
        if (g.contains("velocity")) v0 = r.number(g["velocity"], q + ".velocity");
      }
    }
    sweep.detunings = linear_detunings(start, stop, count);
    if (grid_type == "gauss_hermite") {
      sweep.grid = VelocityGrid::gauss_hermite(points, t_k, mass);
    } else if (grid_type == "uniform") {
      sweep.grid = VelocityGrid::uniform(points, t_k, mass, span);
    } else if (grid_type == "single") {
      sweep.grid = VelocityGrid::single(v0);
      sweep.grid.temperature_K = t_k;
      sweep.grid.mass_amu = mass;
    } else {
      r.fail("$.sweep.velocity_grid.type", fmt::format("unknown grid '{}' (gauss_hermite, uniform, single)", grid_type));
    }
    sweep.validate();
  }

  // Analyzer.
  AnalyzerSpec analyzer;
  if (doc.contains("analyzer")) {
    const json& j = doc["analyzer"];
    const std::string p = "$.analyzer";
    r.keys(j, p, {"E0", "polarizer_axis_deg", "calibration", "scan"});
    if (j.contains("E0")) analyzer.e0 = r.number(j["E0"], p + ".E0");
    if (!(analyzer.e0 > 0)) r.fail(p + ".E0", "must be positive");
    if (j.contains("polarizer_axis_deg")) {
      analyzer.polarizer_axis = r.number(j["polarizer_axis_deg"], p + ".polarizer_axis_deg") * kDeg;
    }
    if (j.contains("calibration")) {
      const json& c = j["calibration"];
      r.keys(c, p + ".calibration", {"voltage", "retardance_deg"});
      auto th = r.numbers(r.need(c, p + ".calibration", "retardance_deg"), p + ".calibration.retardance_deg");
      for (double& t : th) t *= kDeg;
      try {
        analyzer.calibration =
            LcrCalibration(r.numbers(r.need(c, p + ".calibration", "voltage"), p + ".calibration.voltage"), th);
      } catch (const InputError& e) {
        r.fail(p + ".calibration", e.what());
      }
    }
    if (j.contains("scan")) {
      const json& s = j["scan"];
      r.keys(s, p + ".scan", {"v_hi", "v_lo", "points"});
      if (s.contains("v_hi")) analyzer.v_hi = r.number(s["v_hi"], p + ".scan.v_hi");
      if (s.contains("v_lo")) analyzer.v_lo = r.number(s["v_lo"], p + ".scan.v_lo");
      if (s.contains("points")) {
        const long n = r.integer(s["points"], p + ".scan.points");
        if (n < 3) r.fail(p + ".scan.points", "must be >= 3");
        analyzer.scan_points = static_cast<std::size_t>(n);
      }
    }
  }

  return Scenario{name,   description, gamma_a_mhz, std::move(scheme), std::move(transitions), fields,
                  medium, sweep,       analyzer};
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, src] : detail::kPresetSources) out.emplace_back(name);
  return out;
}

std::string_view preset_source(std::string_view name) {
  for (const auto& [n, src] : detail::kPresetSources) {
    if (n == name) return src;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw InputError(fmt::format("unknown preset '{}' (known: {})", name, known));
}

Scenario load_preset(std::string_view name) {
  return parse_scenario(preset_source(name), "preset " + std::string(name));
}

}  // namespace ocw
