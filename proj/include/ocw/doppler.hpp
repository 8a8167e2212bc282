#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocw/atomic_model.hpp"
#include "ocw/liouville.hpp"
#include "ocw/polarimetry.hpp"

namespace ocw {

enum class Geometry { counter_propagating, co_propagating };

const char* to_string(Geometry g);
/// Accepts "counter", "co" and the long forms.
Geometry parse_geometry(std::string_view s);

struct VelocityPoint {
  double v = 0.0;  // m/s
  double weight = 0.0;
};

struct VelocityGrid {
  std::vector<VelocityPoint> points;
  double temperature_K = 403.0;
  double mass_amu = 86.909;
  double span = 4.0;  // uniform grids only, multiples of the rms velocity

  /// Probabilists' Gauss-Hermite rule scaled to the thermal distribution.
  static VelocityGrid gauss_hermite(std::size_t n, double temperature_K, double mass_amu);
  /// Evenly spaced over +-span rms velocities, Gaussian weights renormalised.
  static VelocityGrid uniform(std::size_t n, double temperature_K, double mass_amu, double span = 4.0);
  static VelocityGrid single(double v = 0.0);

  void validate() const;
};

/// One-dimensional rms thermal velocity sqrt(kT/m), m/s.
double thermal_velocity(double temperature_K, double mass_amu);

/// Doppler shift per unit velocity, in gamma_a per (m/s).
double doppler_k(double lambda_nm, double gamma_a_mhz);

VelocityShifts doppler_shifts(double v, Geometry geometry, double k_pump, double k_signal);

std::vector<double> linear_detunings(double start, double stop, std::size_t count);

struct SweepSpec {
  std::vector<double> detunings;  // signal detunings, gamma_a
  Geometry geometry = Geometry::counter_propagating;
  VelocityGrid grid;

  void validate() const;
};

/// Steady state and optical response for single (signal detuning, velocity)
/// cells of one scenario. The field-coupling and decay parts of the
/// Liouvillian are assembled once; each cell only adds its diagonal.
class CellSolver {
 public:
  CellSolver(LevelScheme scheme, TransitionTable transitions, FieldSet fields, MediumParams medium,
             SolverKind kind = SolverKind::real_dense);

  const LevelScheme& scheme() const { return scheme_; }
  const TransitionTable& transitions() const { return transitions_; }
  const FieldSet& fields() const { return fields_; }
  const MediumParams& medium() const { return medium_; }
  const StateLayout& layout() const { return builder_.layout(); }
  const DecayNetwork& network() const { return builder_.network(); }

  ComplexMatrix hamiltonian(double delta_s, VelocityShifts shifts) const;
  Liouvillian liouvillian(double delta_s, VelocityShifts shifts) const;
  DensityMatrix solve(double delta_s, VelocityShifts shifts, SteadyStateInfo* info = nullptr) const;
  OpticalResponse response(double delta_s, VelocityShifts shifts) const;

 private:
  LevelScheme scheme_;
  TransitionTable transitions_;
  FieldSet fields_;
  MediumParams medium_;
  SolverKind kind_;
  LiouvillianBuilder builder_;
  ComplexMatrix base_;
  Eigen::VectorXd offset_;
  Eigen::VectorXd pump_frame_;
  Eigen::VectorXd signal_frame_;
};

/// Weighted sum of responses over the grid, in grid order.
OpticalResponse average_response(const CellSolver& solver, double delta_s, Geometry geometry,
                                 const VelocityGrid& grid);

struct SweepOptions {
  unsigned workers = 1;
  std::optional<std::string> checkpoint;  // path; resumed from if it exists
  std::size_t checkpoint_every = 16;
  bool progress = false;
};

std::vector<OpticalResponse> sweep(const CellSolver& solver, const SweepSpec& spec,
                                   const SweepOptions& options = {});

unsigned max_workers();

}  // namespace ocw
