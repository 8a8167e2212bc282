#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ocw/atomic_model.hpp"

namespace ocw {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Field polarisation on the spherical basis (sigma+, sigma-), i.e. the
/// complex pair (alpha, beta) of alpha*sigma+ + beta*sigma-.
struct Polarization {
  cplx sigma_plus{1.0, 0.0};
  cplx sigma_minus{0.0, 0.0};

  /// Amplitude driving a transition with polarisation index q (pi has none
  /// for beams along the quantisation axis).
  cplx component(int q) const {
    if (q == 1) return sigma_plus;
    if (q == -1) return sigma_minus;
    return {0.0, 0.0};
  }
  double norm_sq() const { return std::norm(sigma_plus) + std::norm(sigma_minus); }
};

struct FieldSpec {
  FieldRole role = FieldRole::pump;
  double rabi = 0.0;      // units of gamma_a, for a strength-1 transition
  double detuning = 0.0;  // units of gamma_a, from the reference transition
  Polarization polarization{};
  double k = 0.0;  // Doppler shift per unit velocity, gamma_a / (m/s)
};

/// Validated pump and signal fields.
struct FieldSet {
  FieldSpec pump{FieldRole::pump};
  FieldSpec signal{FieldRole::signal};

  const FieldSpec& get(FieldRole r) const { return r == FieldRole::pump ? pump : signal; }
  void validate() const;
};

/// Extra detuning seen by a moving atom.
struct VelocityShifts {
  double pump = 0.0;
  double signal = 0.0;
};

ComplexMatrix build_hamiltonian(const LevelScheme& scheme, const TransitionTable& transitions,
                                const FieldSet& fields, VelocityShifts shifts = {});

/// Which density-matrix elements enter the state vector. All populations and
/// all coherences between resolved levels; coherences touching lumped levels
/// are never driven and are left out.
class StateLayout {
 public:
  explicit StateLayout(const LevelScheme& scheme);

  std::size_t levels() const { return n_; }
  std::size_t size() const { return slots_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& slots() const { return slots_; }
  /// -1 when (i, j) is excluded.
  long index(std::size_t i, std::size_t j) const { return map_[i * n_ + j]; }
  std::size_t population(std::size_t i) const { return static_cast<std::size_t>(map_[i * n_ + i]); }
  /// The population slot whose balance equation is replaced by the trace
  /// constraint: the last diagonal slot.
  std::size_t trace_slot() const { return population(n_ - 1); }

  ComplexVector to_vector(const ComplexMatrix& rho) const;
  ComplexMatrix to_matrix(const ComplexVector& x) const;

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> slots_;
  std::vector<long> map_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {}

  const ComplexMatrix& matrix() const { return rho_; }
  cplx operator()(std::size_t i, std::size_t j) const {
    return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::size_t size() const { return static_cast<std::size_t>(rho_.rows()); }
  double trace() const { return rho_.trace().real(); }
  double hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }
  double min_population() const { return rho_.diagonal().real().minCoeff(); }

  /// Pure population in one level.
  static DensityMatrix pure(std::size_t n, std::size_t level);

 private:
  ComplexMatrix rho_;
};

/// d vec(rho)/dt = M vec(rho) + s on a StateLayout.
struct Liouvillian {
  ComplexMatrix M;
  ComplexVector s;

  ComplexVector derivative(const ComplexVector& x) const { return M * x + s; }
  double norm_inf() const;
};

/// Assembles Liouvillians for a fixed scheme and decay network. The
/// commutator with the diagonal of H only touches the diagonal of M, so the
/// field-coupling and decay parts can be built once and reused across a sweep.
class LiouvillianBuilder {
 public:
  LiouvillianBuilder(const LevelScheme& scheme, DecayNetwork network);

  const StateLayout& layout() const { return layout_; }
  const DecayNetwork& network() const { return network_; }

  Liouvillian build(const ComplexMatrix& hamiltonian) const;
  /// M assembled from the off-diagonal part of H plus decay; add_diagonal()
  /// completes it for a given diagonal of H.
  ComplexMatrix coupling_part(const ComplexMatrix& hamiltonian) const;
  void add_diagonal(ComplexMatrix& m, const Eigen::VectorXd& h_diag) const;

 private:
  StateLayout layout_;
  DecayNetwork network_;
};

/// One-shot form of LiouvillianBuilder::build.
Liouvillian vectorize(const ComplexMatrix& hamiltonian, const LevelScheme& scheme,
                      const DecayNetwork& network);

/// -i[H, rho] + decay terms evaluated directly on matrices, independently of
/// the vectorised form.
ComplexMatrix liouville_rhs(const ComplexMatrix& hamiltonian, const DecayNetwork& network,
                            const LevelScheme& scheme, const ComplexMatrix& rho);

/// Equivalent representation with the last population eliminated through the
/// trace: unknowns are all other slots, and s carries the constant terms.
struct ReducedLiouvillian {
  ComplexMatrix M;
  ComplexVector s;
  std::size_t eliminated = 0;
};
ReducedLiouvillian eliminate_trace(const Liouvillian& L, const StateLayout& layout);

struct SteadyStateInfo {
  double residual = 0.0;  // ||M x + s||_inf
  double m_norm = 0.0;    // ||M||_inf
  double rcond = 0.0;
};

enum class SolverKind { complex_dense, real_dense };

/// Steady state with trace 1. Throws PhysicsError when the system is singular
/// beyond the trace redundancy or the residual bound fails.
DensityMatrix steady_state(const Liouvillian& L, const StateLayout& layout,
                           SolverKind kind = SolverKind::complex_dense,
                           SteadyStateInfo* info = nullptr);

/// Steady state through the trace-eliminated representation.
DensityMatrix steady_state(const ReducedLiouvillian& L, const StateLayout& layout);

/// Fixed-step RK4 integration of the vectorised equation.
DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& L, const StateLayout& layout,
                     double t_final, double dt);

/// Largest rate-like scale of a configuration, for picking dt.
double fastest_scale(const ComplexMatrix& hamiltonian, const DecayNetwork& network);

/// Plain-text dump: "# M rows cols" then "row,col,re,im" for each nonzero,
/// then "# s size" and "row,re,im".
void dump_liouvillian(std::ostream& os, const Liouvillian& L);

}  // namespace ocw
