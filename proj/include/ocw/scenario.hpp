#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocw/atomic_model.hpp"
#include "ocw/doppler.hpp"
#include "ocw/liouville.hpp"
#include "ocw/polarimetry.hpp"

namespace ocw {

inline constexpr int kScenarioSchemaVersion = 1;

struct AnalyzerSpec {
  double e0 = 1.0;
  double polarizer_axis = 0.0;  // radians, 0 = x (orthogonal to a y-polarised probe)
  LcrCalibration calibration = LcrCalibration::default_anchors();
  double v_hi = 10.0;
  double v_lo = 0.0;
  std::size_t scan_points = 201;
};

/// Everything one configuration file describes.
struct Scenario {
  std::string name;
  std::string description;
  double gamma_a_mhz = 5.75;
  LevelScheme scheme;
  TransitionTable transitions;
  FieldSet fields;
  MediumParams medium;
  SweepSpec sweep;
  AnalyzerSpec analyzer;

  CellSolver make_solver(SolverKind kind = SolverKind::real_dense) const;
};

/// Parses a scenario document. Unknown keys, missing required keys and
/// unsupported schema versions raise InputError naming the offending path.
Scenario parse_scenario(std::string_view text, const std::string& origin = "<string>");
Scenario load_scenario_file(const std::string& path);
Scenario load_preset(std::string_view name);

std::vector<std::string> preset_names();
std::string_view preset_source(std::string_view name);

}  // namespace ocw
