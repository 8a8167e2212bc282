#include "ocw/liouville.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ocw/error.hpp"

namespace ocw {

namespace {
constexpr cplx kI{0.0, 1.0};
}

void FieldSet::validate() const {
  for (const FieldSpec* f : {&pump, &signal}) {
    if (f->rabi < 0) throw InputError(fmt::format("{} Rabi frequency must be >= 0", to_string(f->role)));
    if (std::abs(f->polarization.norm_sq() - 1.0) > 1e-12) {
      throw InputError(fmt::format("{} polarisation is not normalised (|alpha|^2+|beta|^2 = {:.15g})",
                                   to_string(f->role), f->polarization.norm_sq()));
    }
  }
}

ComplexMatrix build_hamiltonian(const LevelScheme& scheme, const TransitionTable& transitions,
                                const FieldSet& fields, VelocityShifts shifts) {
  fields.validate();
  const auto n = static_cast<Eigen::Index>(scheme.size());
  ComplexMatrix h = ComplexMatrix::Zero(n, n);

  // Rotating frame: every manifold is shifted by the photon energies that
  // connect it to the ground manifold, so all entries are time independent.
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& lv = scheme.level(static_cast<std::size_t>(i));
    double e = lv.energy_offset;
    for (FieldRole r : scheme.manifold(lv.manifold).frame) {
      e -= fields.get(r).detuning + (r == FieldRole::pump ? shifts.pump : shifts.signal);
    }
    h(i, i) = e;
  }

  for (FieldRole role : {FieldRole::pump, FieldRole::signal}) {
    const auto& f = fields.get(role);
    const auto entries = transitions.for_field(role);
    if (entries.empty() && f.rabi > 0) {
      throw InputError(fmt::format("{} field couples no transition", to_string(role)));
    }
    for (const auto& t : entries) {
      if (t.upper >= scheme.size() || t.lower >= scheme.size()) {
        throw InputError("transition references an unknown level");
      }
      // Dipole coupling -d.E with the field's spherical component for q.
      const cplx v = -0.5 * t.strength * f.rabi * f.polarization.component(t.q);
      const auto u = static_cast<Eigen::Index>(t.upper);
      const auto l = static_cast<Eigen::Index>(t.lower);
      h(u, l) += v;
      h(l, u) += std::conj(v);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

StateLayout::StateLayout(const LevelScheme& scheme) : n_(scheme.size()), map_(n_ * n_, -1) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (i != j && (scheme.is_lumped(i) || scheme.is_lumped(j))) continue;
      map_[i * n_ + j] = static_cast<long>(slots_.size());
      slots_.emplace_back(i, j);
    }
  }
}

ComplexVector StateLayout::to_vector(const ComplexMatrix& rho) const {
  ComplexVector x(static_cast<Eigen::Index>(slots_.size()));
  for (std::size_t a = 0; a < slots_.size(); ++a) {
    x(static_cast<Eigen::Index>(a)) =
        rho(static_cast<Eigen::Index>(slots_[a].first), static_cast<Eigen::Index>(slots_[a].second));
  }
  return x;
}

ComplexMatrix StateLayout::to_matrix(const ComplexVector& x) const {
  const auto n = static_cast<Eigen::Index>(n_);
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < slots_.size(); ++a) {
    rho(static_cast<Eigen::Index>(slots_[a].first), static_cast<Eigen::Index>(slots_[a].second)) =
        x(static_cast<Eigen::Index>(a));
  }
  return rho;
}

DensityMatrix DensityMatrix::pure(std::size_t n, std::size_t level) {
  ComplexMatrix rho = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  rho(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
  return DensityMatrix(std::move(rho));
}

double Liouvillian::norm_inf() const { return M.cwiseAbs().rowwise().sum().maxCoeff(); }

// ---------------------------------------------------------------------------

LiouvillianBuilder::LiouvillianBuilder(const LevelScheme& scheme, DecayNetwork network)
    : layout_(scheme), network_(std::move(network)) {
  if (network_.loss().size() != scheme.size()) {
    throw InputError("decay network does not match the level scheme");
  }
}

ComplexMatrix LiouvillianBuilder::coupling_part(const ComplexMatrix& h) const {
  const std::size_t n = layout_.levels();
  const auto dim = static_cast<Eigen::Index>(layout_.size());
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  const auto& loss = network_.loss();

  for (std::size_t a = 0; a < layout_.size(); ++a) {
    const auto [i, j] = layout_.slots()[a];
    const auto ra = static_cast<Eigen::Index>(a);
    // -i (H rho - rho H)_{ij}, off-diagonal entries of H only.
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) {
        const cplx hik = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        if (hik != 0.0) {
          const long b = layout_.index(k, j);
          if (b < 0) throw InputError("field couples a lumped level");
          m(ra, b) += -kI * hik;
        }
      }
      if (k != j) {
        const cplx hkj = h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        if (hkj != 0.0) {
          const long b = layout_.index(i, k);
          if (b < 0) throw InputError("field couples a lumped level");
          m(ra, b) += kI * hkj;
        }
      }
    }
    m(ra, ra) -= 0.5 * (loss[i] + loss[j]);
  }
  for (const auto& c : network_.channels()) {
    m(static_cast<Eigen::Index>(layout_.population(c.to)),
      static_cast<Eigen::Index>(layout_.population(c.from))) += c.rate;
  }
  return m;
}

void LiouvillianBuilder::add_diagonal(ComplexMatrix& m, const Eigen::VectorXd& h_diag) const {
  for (std::size_t a = 0; a < layout_.size(); ++a) {
    const auto [i, j] = layout_.slots()[a];
    if (i == j) continue;
    const auto ra = static_cast<Eigen::Index>(a);
    m(ra, ra) += -kI * (h_diag(static_cast<Eigen::Index>(i)) - h_diag(static_cast<Eigen::Index>(j)));
  }
}

Liouvillian LiouvillianBuilder::build(const ComplexMatrix& h) const {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw InputError("Hamiltonian is not Hermitian");
  }
  Liouvillian L;
  L.M = coupling_part(h);
  add_diagonal(L.M, h.diagonal().real());
  L.s = ComplexVector::Zero(L.M.rows());

  // Population conservation: every population column of M sums to zero over
  // the population rows.
  const std::size_t n = layout_.levels();
  for (std::size_t k = 0; k < n; ++k) {
    cplx col{0.0, 0.0};
    for (std::size_t r = 0; r < n; ++r) {
      col += L.M(static_cast<Eigen::Index>(layout_.population(r)),
                 static_cast<Eigen::Index>(layout_.population(k)));
    }
    if (std::abs(col) > 1e-10 * std::max(1.0, network_.max_rate())) {
      throw PhysicsError(fmt::format("decay network loses population from level {} (deficit {:.3g})",
                                     k, std::abs(col)));
    }
  }
  return L;
}

Liouvillian vectorize(const ComplexMatrix& hamiltonian, const LevelScheme& scheme,
                      const DecayNetwork& network) {
  return LiouvillianBuilder(scheme, network).build(hamiltonian);
}

ComplexMatrix liouville_rhs(const ComplexMatrix& h, const DecayNetwork& network,
                            const LevelScheme& scheme, const ComplexMatrix& rho) {
  ComplexMatrix d = -kI * (h * rho - rho * h);
  const auto n = static_cast<Eigen::Index>(scheme.size());
  const auto& loss = network.loss();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      d(i, j) -= 0.5 * (loss[static_cast<std::size_t>(i)] + loss[static_cast<std::size_t>(j)]) * rho(i, j);
    }
  }
  for (const auto& c : network.channels()) {
    const auto from = static_cast<Eigen::Index>(c.from);
    const auto to = static_cast<Eigen::Index>(c.to);
    d(to, to) += c.rate * rho(from, from);
  }
  return d;
}

ReducedLiouvillian eliminate_trace(const Liouvillian& L, const StateLayout& layout) {
  // rho_last = 1 - sum of the other populations.
  const auto e = static_cast<Eigen::Index>(layout.trace_slot());
  const Eigen::Index dim = L.M.rows();
  ReducedLiouvillian r;
  r.eliminated = static_cast<std::size_t>(e);
  r.M = ComplexMatrix::Zero(dim - 1, dim - 1);
  r.s = ComplexVector::Zero(dim - 1);
  auto shrink = [e](Eigen::Index k) { return k < e ? k : k - 1; };
  for (Eigen::Index a = 0; a < dim; ++a) {
    if (a == e) continue;
    const Eigen::Index ra = shrink(a);
    r.s(ra) = L.s(a) + L.M(a, e);
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (b == e) continue;
      r.M(ra, shrink(b)) = L.M(a, b);
    }
    for (std::size_t p = 0; p < layout.levels(); ++p) {
      const auto b = static_cast<Eigen::Index>(layout.population(p));
      if (b == e) continue;
      r.M(ra, shrink(b)) -= L.M(a, e);
    }
  }
  return r;
}

namespace {

[[noreturn]] void report_singular(const ComplexMatrix& m) {
  Eigen::FullPivLU<ComplexMatrix> lu(m);
  lu.setThreshold(1e-10);
  throw PhysicsError(fmt::format("non-unique steady state: null-space dimension {}",
                                 lu.dimensionOfKernel()));
}

// rcond() alone misses exactly singular systems: Eigen's estimate stays finite
// when a pivot is zero.
template <typename Lu>
bool lu_singular(const Lu& lu) {
  const auto d = lu.matrixLU().diagonal().cwiseAbs();
  return !(lu.rcond() > 1e-15) || !(d.minCoeff() > 1e-14 * d.maxCoeff());
}

// Solve with the trace row in place of the last population balance, using the
// complex system directly.
ComplexVector solve_complex(const Liouvillian& L, const StateLayout& layout, double& rcond) {
  ComplexMatrix a = L.M;
  ComplexVector b = -L.s;
  const auto t = static_cast<Eigen::Index>(layout.trace_slot());
  a.row(t).setZero();
  for (std::size_t p = 0; p < layout.levels(); ++p) a(t, static_cast<Eigen::Index>(layout.population(p))) = 1.0;
  b(t) = 1.0;
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  rcond = lu.rcond();
  if (lu_singular(lu)) report_singular(L.M);
  ComplexVector x = lu.solve(b);
  x += lu.solve(b - a * x);
  return x;
}

// Hermiticity halves the unknowns: one real variable per population, and
// (Re, Im) of rho_ij for i < j. The rows for i > j are conjugates of i < j.
ComplexVector solve_real(const Liouvillian& L, const StateLayout& layout, double& rcond) {
  const std::size_t dim = layout.size();
  const auto& slots = layout.slots();
  std::vector<long> re_var(dim, -1);
  std::vector<long> im_var(dim, -1);
  long next = 0;
  for (std::size_t a = 0; a < dim; ++a) {
    const auto [i, j] = slots[a];
    if (i == j) {
      re_var[a] = next++;
    } else if (i < j) {
      re_var[a] = next++;
      im_var[a] = next++;
    }
  }
  for (std::size_t a = 0; a < dim; ++a) {
    const auto [i, j] = slots[a];
    if (i > j) {
      const auto partner = static_cast<std::size_t>(layout.index(j, i));
      re_var[a] = re_var[partner];
      im_var[a] = im_var[partner];
    }
  }

  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t a = 0; a < dim; ++a) {
    const auto [i, j] = slots[a];
    if (i > j) continue;
    const long row_re = re_var[a];
    const long row_im = im_var[a];
    const auto ra = static_cast<Eigen::Index>(a);
    for (std::size_t b = 0; b < dim; ++b) {
      const cplx mab = L.M(ra, static_cast<Eigen::Index>(b));
      if (mab == 0.0) continue;
      const auto [k, l] = slots[b];
      if (k == l) {
        r(row_re, re_var[b]) += mab.real();
        if (row_im >= 0) r(row_im, re_var[b]) += mab.imag();
      } else {
        // rho_b = u + i*sgn*w with sgn = +1 for k < l and -1 for k > l.
        const double sgn = k < l ? 1.0 : -1.0;
        r(row_re, re_var[b]) += mab.real();
        r(row_re, im_var[b]) += -sgn * mab.imag();
        if (row_im >= 0) {
          r(row_im, re_var[b]) += mab.imag();
          r(row_im, im_var[b]) += sgn * mab.real();
        }
      }
    }
    const cplx sa = L.s(ra);
    rhs(row_re) = -sa.real();
    if (row_im >= 0) rhs(row_im) = -sa.imag();
  }
  const long t = re_var[layout.trace_slot()];
  r.row(t).setZero();
  for (std::size_t p = 0; p < layout.levels(); ++p) r(t, re_var[layout.population(p)]) = 1.0;
  rhs(t) = 1.0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(r);
  rcond = lu.rcond();
  if (lu_singular(lu)) report_singular(L.M);
  Eigen::VectorXd y = lu.solve(rhs);
  y += lu.solve(rhs - r * y);

  ComplexVector x(n);
  for (std::size_t a = 0; a < dim; ++a) {
    const auto [i, j] = slots[a];
    if (i == j) {
      x(static_cast<Eigen::Index>(a)) = y(re_var[a]);
    } else {
      const double sgn = i < j ? 1.0 : -1.0;
      x(static_cast<Eigen::Index>(a)) = cplx(y(re_var[a]), sgn * y(im_var[a]));
    }
  }
  return x;
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& L, const StateLayout& layout, SolverKind kind,
                           SteadyStateInfo* info) {
  if (L.M.rows() != static_cast<Eigen::Index>(layout.size())) {
    throw InputError("Liouvillian does not match the state layout");
  }
  double rcond = 0.0;
  const ComplexVector x = kind == SolverKind::real_dense ? solve_real(L, layout, rcond)
                                                   : solve_complex(L, layout, rcond);
  const double m_norm = L.norm_inf();
  const double bound = 1e-9 * std::max(1.0, m_norm);
  const double residual = (L.M * x + L.s).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual)) report_singular(L.M);
  if (info) *info = {residual, m_norm, rcond};
  if (residual > bound) {
    throw PhysicsError(fmt::format("steady-state residual {:.3e} exceeds bound {:.3e} (rcond {:.3e})",
                                   residual, bound, rcond));
  }
  return DensityMatrix(layout.to_matrix(x));
}

DensityMatrix steady_state(const ReducedLiouvillian& L, const StateLayout& layout) {
  Eigen::PartialPivLU<ComplexMatrix> lu(L.M);
  if (lu_singular(lu)) {
    Eigen::FullPivLU<ComplexMatrix> full(L.M);
    full.setThreshold(1e-10);
    throw PhysicsError(fmt::format("non-unique steady state: null-space dimension {}",
                                   full.dimensionOfKernel()));
  }
  const ComplexVector y = lu.solve(-L.s);
  const auto e = static_cast<Eigen::Index>(L.eliminated);
  ComplexVector x(y.size() + 1);
  x.head(e) = y.head(e);
  x.tail(y.size() - e) = y.tail(y.size() - e);
  cplx others{0.0, 0.0};
  for (std::size_t p = 0; p < layout.levels(); ++p) {
    const auto b = static_cast<Eigen::Index>(layout.population(p));
    if (b != e) others += x(b);
  }
  x(e) = 1.0 - others;
  return DensityMatrix(layout.to_matrix(x));
}

DensityMatrix evolve(const DensityMatrix& rho0, const Liouvillian& L, const StateLayout& layout,
                     double t_final, double dt) {
  if (!(dt > 0) || t_final < 0) throw InputError("evolve needs dt > 0 and t_final >= 0");
  ComplexVector x = layout.to_vector(rho0.matrix());
  const double trace0 = rho0.trace();
  const auto steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  const double h = steps > 0 ? t_final / static_cast<double>(steps) : 0.0;
  auto trace_of = [&layout](const ComplexVector& v) {
    double t = 0.0;
    for (std::size_t p = 0; p < layout.levels(); ++p) t += v(static_cast<Eigen::Index>(layout.population(p))).real();
    return t;
  };
  for (long step = 0; step < steps; ++step) {
    const ComplexVector k1 = L.derivative(x);
    const ComplexVector k2 = L.derivative(x + 0.5 * h * k1);
    const ComplexVector k3 = L.derivative(x + 0.5 * h * k2);
    const ComplexVector k4 = L.derivative(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((step & 255) == 0 || step + 1 == steps) {
      const double drift = std::abs(trace_of(x) - trace0);
      const double peak = x.cwiseAbs().maxCoeff();
      if (drift > 1e-3 || !(peak < 10.0)) {
        throw PhysicsError(fmt::format(
            "unstable integration at t={:.4g} (trace drift {:.3g}, max |rho| {:.3g}); use a smaller dt",
            static_cast<double>(step + 1) * h, drift, peak));
      }
    }
  }
  return DensityMatrix(layout.to_matrix(x));
}

double fastest_scale(const ComplexMatrix& h, const DecayNetwork& network) {
  double s = network.max_rate();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) s = std::max(s, (i == j ? 1.0 : 2.0) * std::abs(h(i, j)));
  }
  return s;
}

void dump_liouvillian(std::ostream& os, const Liouvillian& L) {
  os << "# M " << L.M.rows() << ' ' << L.M.cols() << '\n';
  for (Eigen::Index r = 0; r < L.M.rows(); ++r) {
    for (Eigen::Index c = 0; c < L.M.cols(); ++c) {
      const cplx v = L.M(r, c);
      if (v != 0.0) os << fmt::format("{},{},{:.17g},{:.17g}\n", r, c, v.real(), v.imag());
    }
  }
  os << "# s " << L.s.size() << '\n';
  for (Eigen::Index r = 0; r < L.s.size(); ++r) {
    os << fmt::format("{},{:.17g},{:.17g}\n", r, L.s(r).real(), L.s(r).imag());
  }
}

}  // namespace ocw
