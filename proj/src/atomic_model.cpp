#include "ocw/atomic_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "ocw/error.hpp"

namespace ocw {

const char* to_string(FieldRole role) { return role == FieldRole::pump ? "pump" : "signal"; }

std::string SublevelId::label() const {
  if (lumped) return group;
  if (mF == 0) return group + ":0";
  return fmt::format("{}:{:+d}", group, mF);
}

// ---------------------------------------------------------------------------
// LevelScheme

LevelScheme::LevelScheme(std::vector<Manifold> manifolds, const std::vector<LevelGroupSpec>& groups,
                         DecayParams decay, DecayConfig decay_config, int two_nuclear_spin)
    : manifolds_(std::move(manifolds)),
      decay_(decay),
      decay_config_(std::move(decay_config)),
      two_i_(two_nuclear_spin) {
  if (decay_.gamma_a < 0 || decay_.gamma_b < 0 || decay_.gamma_g < 0 || decay_.d1_d2_ratio < 0) {
    throw InputError("decay rates and the D1/D2 ratio must be non-negative");
  }
  for (const auto& g : groups) {
    manifold(g.manifold);  // validates the name
    if (g.lumped) {
      const int mult = g.multiplicity > 0 ? g.multiplicity : 2 * g.F + 1;
      levels_.push_back({{g.group, g.F, 0, true}, g.manifold, g.energy_offset, mult});
      continue;
    }
    std::vector<int> mf = g.mf;
    if (mf.empty()) {
      for (int m = -g.F; m <= g.F; ++m) mf.push_back(m);
    }
    for (int m : mf) {
      if (std::abs(m) > g.F) {
        throw InputError(fmt::format("level group {}: |mF|={} exceeds F={}", g.group, m, g.F));
      }
      levels_.push_back({{g.group, g.F, m, false}, g.manifold, g.energy_offset,
                         g.multiplicity > 0 ? g.multiplicity : 1});
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto [it, inserted] = index_.emplace(levels_[i].id.label(), i);
    if (!inserted) throw InputError("duplicate sublevel " + levels_[i].id.label());
  }
  if (levels_.empty()) throw InputError("level scheme is empty");
}

const Manifold& LevelScheme::manifold(const std::string& name) const {
  for (const auto& m : manifolds_) {
    if (m.name == name) return m;
  }
  throw InputError("unknown manifold '" + name + "'");
}

std::optional<std::size_t> LevelScheme::find(const SublevelId& id) const {
  const auto it = index_.find(id.label());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LevelScheme::index_of(const SublevelId& id) const {
  if (auto i = find(id)) return *i;
  throw InputError("unknown level " + id.label());
}

std::optional<std::size_t> LevelScheme::resolve_target(const std::string& manifold, int F,
                                                       int mF) const {
  std::optional<std::size_t> lumped;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& lv = levels_[i];
    if (lv.manifold != manifold || lv.id.F != F) continue;
    if (!lv.id.lumped && lv.id.mF == mF) return i;
    if (lv.id.lumped) lumped = i;
  }
  if (lumped) return lumped;
  if (decay_config_.fallback) return find(*decay_config_.fallback);
  return std::nullopt;
}

std::vector<std::size_t> LevelScheme::levels_in(ManifoldRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (manifold(levels_[i].manifold).role == role) out.push_back(i);
  }
  return out;
}

double LevelScheme::group_offset(const std::string& group) const {
  for (const auto& lv : levels_) {
    if (lv.id.group == group) return lv.energy_offset;
  }
  throw InputError("unknown level group '" + group + "'");
}

// ---------------------------------------------------------------------------
// Transitions

TransitionTable::TransitionTable(std::vector<Transition> raw,
                                 std::vector<std::pair<FieldRole, double>> line_units_min)
    : entries_(std::move(raw)), line_min_(std::move(line_units_min)) {
  for (FieldRole f : {FieldRole::pump, FieldRole::signal}) {
    double weakest = std::numeric_limits<double>::infinity();
    for (const auto& t : entries_) {
      if (t.field == f && std::abs(t.strength) > 0) weakest = std::min(weakest, std::abs(t.strength));
    }
    if (!std::isfinite(weakest)) continue;
    for (auto& t : entries_) {
      if (t.field == f) t.strength /= weakest;
    }
  }
}

std::vector<Transition> TransitionTable::for_field(FieldRole field) const {
  std::vector<Transition> out;
  std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(out),
               [field](const Transition& t) { return t.field == field; });
  return out;
}

double TransitionTable::weakest_branching(FieldRole field) const {
  for (const auto& [f, v] : line_min_) {
    if (f == field) return v * v;
  }
  return 0.0;
}

double TransitionTable::strength(std::size_t upper, std::size_t lower, FieldRole field) const {
  for (const auto& t : entries_) {
    if (t.upper == upper && t.lower == lower && t.field == field) return t.strength;
  }
  return 0.0;
}

TransitionTable build_dipole_transitions(const LevelScheme& scheme,
                                         const std::vector<CouplingSpec>& couplings) {
  std::vector<Transition> raw;
  std::map<FieldRole, double> weakest;
  for (const auto& c : couplings) {
    std::vector<std::size_t> lower;
    std::vector<std::size_t> upper;
    for (std::size_t i = 0; i < scheme.size(); ++i) {
      const auto& id = scheme.level(i).id;
      if (id.group == c.lower_group) lower.push_back(i);
      if (id.group == c.upper_group) upper.push_back(i);
    }
    if (lower.empty() || upper.empty()) {
      throw InputError(fmt::format("coupling {} -> {} references an unknown level group",
                                   c.lower_group, c.upper_group));
    }
    if (scheme.is_lumped(lower.front()) || scheme.is_lumped(upper.front())) {
      throw InputError(fmt::format("coupling {} -> {}: lumped levels cannot be field coupled",
                                   c.lower_group, c.upper_group));
    }
    const angular::HyperfineLine line{scheme.manifold_of(upper.front()).two_j,
                                      scheme.manifold_of(lower.front()).two_j,
                                      scheme.two_nuclear_spin()};
    for (std::size_t u : upper) {
      for (std::size_t l : lower) {
        const auto& iu = scheme.level(u).id;
        const auto& il = scheme.level(l).id;
        const int q = iu.mF - il.mF;
        if (std::abs(q) > 1) continue;
        const double a = relative_strength(line, iu.F, iu.mF, il.F, il.mF, q);
        if (std::abs(a) < 1e-14) continue;
        raw.push_back({u, l, q, a, c.field});
        auto [it, inserted] = weakest.emplace(c.field, std::abs(a));
        if (!inserted) it->second = std::min(it->second, std::abs(a));
      }
    }
  }
  return TransitionTable(std::move(raw), {weakest.begin(), weakest.end()});
}

TransitionTable build_explicit_transitions(const LevelScheme& scheme,
                                           const std::vector<ExplicitTransition>& entries) {
  std::vector<Transition> raw;
  for (const auto& e : entries) {
    const std::size_t u = scheme.index_of(e.upper);
    const std::size_t l = scheme.index_of(e.lower);
    if (scheme.is_lumped(u) || scheme.is_lumped(l)) {
      throw InputError("lumped levels cannot be field coupled: " + e.upper.label());
    }
    if (e.q < -1 || e.q > 1) throw InputError("transition polarisation q must be -1, 0 or +1");
    if (e.q != e.upper.mF - e.lower.mF) {
      throw InputError(fmt::format("transition {} -> {}: q={} violates q = mF(upper) - mF(lower)",
                                   e.lower.label(), e.upper.label(), e.q));
    }
    raw.push_back({u, l, e.q, e.strength, e.field});
  }
  return TransitionTable(std::move(raw), {});
}

// ---------------------------------------------------------------------------
// Decay

std::vector<RateTo> decay_distribution(std::size_t level, const LevelScheme& scheme,
                                       double total_rate) {
  const auto& lv = scheme.level(level);
  const auto& man = scheme.manifold(lv.manifold);
  if (lv.id.lumped || man.decays_to.empty()) {
    throw InputError("decay_distribution requires an excited resolved level, got " + lv.id.label());
  }
  const auto& lower = scheme.manifold(man.decays_to);
  const angular::HyperfineLine line{man.two_j, lower.two_j, scheme.two_nuclear_spin()};

  std::map<std::size_t, double> acc;
  double allowed = 0.0;
  const int f_min = std::abs(lower.two_j - line.two_i) / 2;
  const int f_max = (lower.two_j + line.two_i) / 2;
  for (int fl = f_min; fl <= f_max; ++fl) {
    for (int ml = -fl; ml <= fl; ++ml) {
      const int q = lv.id.mF - ml;
      if (std::abs(q) > 1) continue;
      const double a = relative_strength(line, lv.id.F, lv.id.mF, fl, ml, q);
      const double b = a * a;
      if (b < 1e-15) continue;
      allowed += b;
      const auto target = scheme.resolve_target(lower.name, fl, ml);
      if (!target) {
        throw PhysicsError(fmt::format(
            "decay of {} into {} F={} mF={} has no slot in the scheme and no fallback is configured",
            lv.id.label(), lower.name, fl, ml));
      }
      acc[*target] += b;
    }
  }
  if (allowed <= 0.0) {
    throw PhysicsError("level " + lv.id.label() + " has no dipole-allowed decay channel");
  }
  std::vector<RateTo> out;
  out.reserve(acc.size());
  for (const auto& [target, b] : acc) out.push_back({target, total_rate * b / allowed});
  return out;
}

BranchingTable::BranchingTable(std::vector<SublevelId> rows, std::vector<SublevelId> cols,
                               Eigen::MatrixXd fraction)
    : rows_(std::move(rows)), cols_(std::move(cols)), fraction_(std::move(fraction)) {
  if (fraction_.rows() != static_cast<Eigen::Index>(rows_.size()) ||
      fraction_.cols() != static_cast<Eigen::Index>(cols_.size())) {
    throw InputError("branching table dimensions do not match its labels");
  }
  if ((fraction_.array() < 0.0).any() || (fraction_.array() > 1.0 + 1e-12).any()) {
    throw InputError("branching fractions must lie in [0, 1]");
  }
}

std::optional<std::size_t> BranchingTable::col_index(const SublevelId& id) const {
  const auto it = std::find(cols_.begin(), cols_.end(), id);
  if (it == cols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cols_.begin());
}

std::optional<std::size_t> BranchingTable::row_index(const SublevelId& id) const {
  const auto it = std::find(rows_.begin(), rows_.end(), id);
  if (it == rows_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - rows_.begin());
}

double BranchingTable::at(const SublevelId& row, const SublevelId& col) const {
  const auto r = row_index(row);
  const auto c = col_index(col);
  if (!r || !c) throw InputError("branching table has no entry " + row.label() + " | " + col.label());
  return fraction_(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(*c));
}

double BranchingTable::max_column_deviation() const {
  return (fraction_.colwise().sum().array() - 1.0).abs().maxCoeff();
}

BranchingTable effective_branching(const BranchingTable& upper_to_mid,
                                   const BranchingTable& mid_to_ground) {
  if (upper_to_mid.rows() != mid_to_ground.cols()) {
    throw InputError(fmt::format("cannot compose branching tables: {} intermediate rows vs {} columns",
                                 upper_to_mid.rows().size(), mid_to_ground.cols().size()));
  }
  return BranchingTable(mid_to_ground.rows(), upper_to_mid.cols(),
                        mid_to_ground.fraction() * upper_to_mid.fraction());
}

BranchingTable dipole_branching(const angular::HyperfineLine& line, const std::string& upper_group,
                                const std::vector<int>& upper_f, const std::string& lower_group,
                                const std::vector<int>& lower_f) {
  std::vector<SublevelId> cols;
  std::vector<SublevelId> rows;
  for (int f : upper_f) {
    for (int m = -f; m <= f; ++m) cols.push_back({upper_group, f, m, false});
  }
  for (int f : lower_f) {
    for (int m = -f; m <= f; ++m) rows.push_back({lower_group, f, m, false});
  }
  Eigen::MatrixXd frac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                               static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int q = cols[c].mF - rows[r].mF;
      if (std::abs(q) > 1) continue;
      const double a = relative_strength(line, cols[c].F, cols[c].mF, rows[r].F, rows[r].mF, q);
      frac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a * a;
    }
  }
  return BranchingTable(std::move(rows), std::move(cols), std::move(frac));
}

DecayNetwork::DecayNetwork(std::vector<DecayChannel> channels, std::size_t n_levels)
    : channels_(std::move(channels)), loss_(n_levels, 0.0) {
  for (const auto& c : channels_) {
    if (c.from >= n_levels || c.to >= n_levels) throw InputError("decay channel index out of range");
    if (c.rate < 0) throw InputError("negative decay rate");
    loss_[c.from] += c.rate;
  }
}

double DecayNetwork::max_rate() const {
  double m = 0.0;
  for (double l : loss_) m = std::max(m, l);
  return m;
}

double DecayNetwork::min_positive_rate() const {
  double m = std::numeric_limits<double>::infinity();
  for (double l : loss_) {
    if (l > 0) m = std::min(m, l);
  }
  return std::isfinite(m) ? m : 0.0;
}

namespace {

void add_channel(std::map<std::pair<std::size_t, std::size_t>, double>& acc, std::size_t from,
                 std::size_t to, double rate) {
  if (from == to || rate == 0.0) return;
  acc[{from, to}] += rate;
}

void add_table1_route(const LevelScheme& scheme, std::size_t u, double rate,
                      std::map<std::pair<std::size_t, std::size_t>, double>& acc) {
  static const BranchingTable table = load_table1();
  const auto& id = scheme.level(u).id;
  const auto col = table.col_index({"U", id.F, id.mF, false});
  if (!col) {
    throw InputError("no effective D2 branching column for " + id.label());
  }
  const auto grounds = scheme.levels_in(ManifoldRole::ground);
  if (grounds.empty()) throw InputError("D2 route requires a ground manifold");
  const std::string ground = scheme.level(grounds.front()).manifold;
  const auto& frac = table.fraction();
  const double col_sum = frac.col(static_cast<Eigen::Index>(*col)).sum();
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const double f = frac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*col));
    if (f == 0.0) continue;
    const auto& row = table.rows()[r];
    const auto target = scheme.resolve_target(ground, row.F, row.mF);
    if (!target) {
      throw PhysicsError("effective decay of " + id.label() + " into F=" + std::to_string(row.F) +
                         " has no slot and no fallback");
    }
    // Printed columns sum to 1 only to ~1e-4; renormalise so population is conserved.
    add_channel(acc, u, *target, rate * f / col_sum);
  }
}

}  // namespace

DecayNetwork build_decay_network(const LevelScheme& scheme) {
  const auto& cfg = scheme.decay_config();
  const auto& dp = scheme.decay();
  std::map<std::pair<std::size_t, std::size_t>, double> acc;

  if (cfg.model == DecayModel::explicit_rates) {
    for (const auto& ch : cfg.channels) {
      add_channel(acc, scheme.index_of(ch.from), scheme.index_of(ch.to), ch.rate);
    }
  } else {
    for (std::size_t i = 0; i < scheme.size(); ++i) {
      const auto& lv = scheme.level(i);
      const auto& man = scheme.manifold(lv.manifold);
      if (lv.id.lumped) continue;
      if (man.role == ManifoldRole::intermediate) {
        for (const auto& r : decay_distribution(i, scheme, dp.gamma_a)) add_channel(acc, i, r.target, r.rate);
      } else if (man.role == ManifoldRole::upper) {
        const double d1 = cfg.d2_route == D2Route::none ? dp.gamma_b : dp.gamma_b * dp.d1_fraction();
        const double d2 = dp.gamma_b - d1;
        for (const auto& r : decay_distribution(i, scheme, d1)) add_channel(acc, i, r.target, r.rate);
        if (cfg.d2_route == D2Route::table1) {
          add_table1_route(scheme, i, d2, acc);
        } else if (cfg.d2_route == D2Route::reservoir) {
          if (!cfg.reservoir) throw InputError("reservoir D2 route requires a reservoir level");
          add_channel(acc, i, scheme.index_of(*cfg.reservoir), d2);
        }
      }
    }
    if (cfg.d2_route == D2Route::reservoir && cfg.reservoir) {
      // The reservoir repopulates the ground manifold in proportion to the
      // number of physical sublevels behind each slot.
      const std::size_t r = scheme.index_of(*cfg.reservoir);
      const auto grounds = scheme.levels_in(ManifoldRole::ground);
      double total = 0.0;
      for (std::size_t g : grounds) total += scheme.level(g).multiplicity;
      for (std::size_t g : grounds) {
        add_channel(acc, r, g, cfg.reservoir_rate * scheme.level(g).multiplicity / total);
      }
    }
  }

  if (dp.gamma_g > 0.0) {
    const auto grounds = scheme.levels_in(ManifoldRole::ground);
    double total = 0.0;
    for (std::size_t g : grounds) total += scheme.level(g).multiplicity;
    for (std::size_t from : grounds) {
      for (std::size_t to : grounds) {
        add_channel(acc, from, to, dp.gamma_g * scheme.level(to).multiplicity / total);
      }
    }
  }

  std::vector<DecayChannel> channels;
  channels.reserve(acc.size());
  for (const auto& [key, rate] : acc) channels.push_back({key.first, key.second, rate});
  return DecayNetwork(std::move(channels), scheme.size());
}

}  // namespace ocw
