#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ocw/angular.hpp"

namespace ocw {

enum class FieldRole { pump, signal };

const char* to_string(FieldRole role);

/// One slot of the state space. Lumped reservoir levels carry no mF.
struct SublevelId {
  std::string group;  // configuration label, e.g. "G2", "E1", "U1", "R"
  int F = 0;
  int mF = 0;
  bool lumped = false;

  bool operator==(const SublevelId&) const = default;
  std::string label() const;
};

enum class ManifoldRole { ground, intermediate, upper, reservoir };

struct Manifold {
  std::string name;
  int two_j = 1;
  ManifoldRole role = ManifoldRole::ground;
  // Fields whose detunings enter this manifold's rotating-frame energy.
  std::vector<FieldRole> frame;
  // Manifold reached by dipole decay (empty for ground).
  std::string decays_to;
};

struct Level {
  SublevelId id;
  std::string manifold;
  double energy_offset = 0.0;  // units of gamma_a
  int multiplicity = 1;        // physical sublevels represented by the slot
};

struct DecayParams {
  double gamma_a = 1.0;
  double gamma_b = 0.6;
  double gamma_g = 0.0;
  double d1_d2_ratio = 0.5;  // D1 : D2 share of the upper-level decay

  /// Fraction of upper-level decay going into the resolved intermediate manifold.
  double d1_fraction() const { return d1_d2_ratio / (1.0 + d1_d2_ratio); }
};

enum class DecayModel { dipole, explicit_rates };
enum class D2Route { none, table1, reservoir };

struct ExplicitDecay {
  SublevelId from;
  SublevelId to;
  double rate = 0.0;
};

struct DecayConfig {
  DecayModel model = DecayModel::dipole;
  D2Route d2_route = D2Route::none;
  std::optional<SublevelId> reservoir;  // target of the D2 route in reservoir mode
  double reservoir_rate = 1.0;
  std::optional<SublevelId> fallback;  // absorbs decays into unmodelled sublevels
  std::vector<ExplicitDecay> channels;
};

/// A block of levels as written in a scenario: one hyperfine level, either
/// resolved into a set of mF sublevels or lumped into a single slot.
struct LevelGroupSpec {
  std::string group;
  std::string manifold;
  int F = 0;
  bool lumped = false;
  std::vector<int> mf;  // empty and !lumped means all -F..F
  double energy_offset = 0.0;
  int multiplicity = 0;  // 0 means derive (2F+1 for lumped, 1 for resolved)
};

class LevelScheme {
 public:
  LevelScheme(std::vector<Manifold> manifolds, const std::vector<LevelGroupSpec>& groups,
              DecayParams decay, DecayConfig decay_config, int two_nuclear_spin);

  std::size_t size() const { return levels_.size(); }
  const std::vector<Level>& levels() const { return levels_; }
  const Level& level(std::size_t i) const { return levels_.at(i); }
  const std::vector<Manifold>& manifolds() const { return manifolds_; }
  const Manifold& manifold(const std::string& name) const;
  const Manifold& manifold_of(std::size_t i) const { return manifold(levels_.at(i).manifold); }
  const DecayParams& decay() const { return decay_; }
  const DecayConfig& decay_config() const { return decay_config_; }
  int two_nuclear_spin() const { return two_i_; }

  std::size_t index_of(const SublevelId& id) const;
  std::optional<std::size_t> find(const SublevelId& id) const;

  /// Slot that receives population decaying into sublevel (F, mF) of a
  /// manifold: the resolved sublevel, else a lumped level with that F, else
  /// the configured fallback.
  std::optional<std::size_t> resolve_target(const std::string& manifold, int F, int mF) const;

  bool is_lumped(std::size_t i) const { return levels_.at(i).id.lumped; }
  std::vector<std::size_t> levels_in(ManifoldRole role) const;

  /// Energy offset (units of gamma_a) of the named hyperfine group relative
  /// to the reference level of its manifold.
  double group_offset(const std::string& group) const;

 private:
  std::vector<Manifold> manifolds_;
  std::vector<Level> levels_;
  DecayParams decay_;
  DecayConfig decay_config_;
  int two_i_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Transition {
  std::size_t upper = 0;
  std::size_t lower = 0;
  int q = 0;              // mF(upper) - mF(lower)
  double strength = 0.0;  // signed, in units of the weakest transition of this field
  FieldRole field = FieldRole::pump;
};

class TransitionTable {
 public:
  TransitionTable() = default;
  /// Normalises each field's entries so the weakest |strength| is 1.
  /// `line_units_min` records, per field, the weakest raw amplitude when the
  /// raw values are in reduced-line units (0 when unknown).
  TransitionTable(std::vector<Transition> raw, std::vector<std::pair<FieldRole, double>> line_units_min);

  const std::vector<Transition>& entries() const { return entries_; }
  std::vector<Transition> for_field(FieldRole field) const;

  /// Squared amplitude of the weakest transition of `field` in line units:
  /// the branching fraction of the weakest decay channel. 0 when unknown.
  double weakest_branching(FieldRole field) const;

  double strength(std::size_t upper, std::size_t lower, FieldRole field) const;

 private:
  std::vector<Transition> entries_;
  std::vector<std::pair<FieldRole, double>> line_min_;
};

struct CouplingSpec {
  FieldRole field = FieldRole::pump;
  std::string lower_group;
  std::string upper_group;
};

/// Dipole strengths for every resolved sublevel pair of each configured
/// coupling, from angular-momentum algebra.
TransitionTable build_dipole_transitions(const LevelScheme& scheme,
                                         const std::vector<CouplingSpec>& couplings);

struct ExplicitTransition {
  FieldRole field = FieldRole::pump;
  SublevelId upper;
  SublevelId lower;
  int q = 0;
  double strength = 1.0;
};

TransitionTable build_explicit_transitions(const LevelScheme& scheme,
                                           const std::vector<ExplicitTransition>& entries);

using angular::relative_strength;

struct RateTo {
  std::size_t target = 0;
  double rate = 0.0;
};

/// Spontaneous decay of an excited resolved level into its lower manifold,
/// rates proportional to squared matrix elements and summing to total_rate.
std::vector<RateTo> decay_distribution(std::size_t level, const LevelScheme& scheme,
                                       double total_rate);

/// Column-stochastic table: fraction(r, c) = probability that column level c
/// ends up in row level r.
class BranchingTable {
 public:
  BranchingTable(std::vector<SublevelId> rows, std::vector<SublevelId> cols, Eigen::MatrixXd fraction);

  const std::vector<SublevelId>& rows() const { return rows_; }
  const std::vector<SublevelId>& cols() const { return cols_; }
  const Eigen::MatrixXd& fraction() const { return fraction_; }
  double at(const SublevelId& row, const SublevelId& col) const;
  std::optional<std::size_t> col_index(const SublevelId& id) const;
  std::optional<std::size_t> row_index(const SublevelId& id) const;

  /// Largest |column sum - 1|.
  double max_column_deviation() const;

 private:
  std::vector<SublevelId> rows_;
  std::vector<SublevelId> cols_;
  Eigen::MatrixXd fraction_;
};

/// Composition through an intermediate manifold: mid_to_ground * upper_to_mid.
BranchingTable effective_branching(const BranchingTable& upper_to_mid,
                                   const BranchingTable& mid_to_ground);

/// Branching of every sublevel of the upper F set into every sublevel of the
/// lower F set on one hyperfine line.
BranchingTable dipole_branching(const angular::HyperfineLine& line, const std::string& upper_group,
                                const std::vector<int>& upper_f, const std::string& lower_group,
                                const std::vector<int>& lower_f);

/// Effective 6S1/2 -> 5S1/2 decay fractions through 5P3/2 for 87Rb, as
/// published (rows: F=2 mF=-2..2, F=1 mF=-1..1; cols: F''=2 mF=-2..2,
/// F''=1 mF=-1..1).
BranchingTable load_table1();

struct DecayChannel {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;
};

/// All incoherent population transfer channels of the scheme, including
/// ground-state cross relaxation.
class DecayNetwork {
 public:
  explicit DecayNetwork(std::vector<DecayChannel> channels, std::size_t n_levels);

  const std::vector<DecayChannel>& channels() const { return channels_; }
  /// Total out-rate of every level.
  const std::vector<double>& loss() const { return loss_; }
  double max_rate() const;
  double min_positive_rate() const;

 private:
  std::vector<DecayChannel> channels_;
  std::vector<double> loss_;
};

DecayNetwork build_decay_network(const LevelScheme& scheme);

}  // namespace ocw
