#include "ocw/doppler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "ocw/error.hpp"

namespace ocw {

namespace {
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kAtomicMass = 1.66053906660e-27;
}  // namespace

const char* to_string(Geometry g) {
  return g == Geometry::counter_propagating ? "counter" : "co";
}

Geometry parse_geometry(std::string_view s) {
  if (s == "counter" || s == "counter_propagating" || s == "counter-propagating") return Geometry::counter_propagating;
  if (s == "co" || s == "co_propagating" || s == "co-propagating") return Geometry::co_propagating;
  throw InputError(fmt::format("unknown geometry '{}' (expected co or counter)", s));
}

double thermal_velocity(double temperature_K, double mass_amu) {
  if (!(temperature_K > 0) || !(mass_amu > 0)) throw InputError("temperature and mass must be positive");
  return std::sqrt(kBoltzmann * temperature_K / (mass_amu * kAtomicMass));
}

double doppler_k(double lambda_nm, double gamma_a_mhz) {
  if (!(lambda_nm > 0) || !(gamma_a_mhz > 0)) throw InputError("wavelength and gamma_a must be positive");
  return 1.0 / (lambda_nm * 1e-9 * gamma_a_mhz * 1e6);
}

VelocityShifts doppler_shifts(double v, Geometry geometry, double k_pump, double k_signal) {
  const double sign = geometry == Geometry::counter_propagating ? 1.0 : -1.0;
  return {-k_pump * v, sign * k_signal * v};
}

VelocityGrid VelocityGrid::gauss_hermite(std::size_t n, double temperature_K, double mass_amu) {
  if (n == 0) throw InputError("velocity grid needs at least one point");
  const double sigma = thermal_velocity(temperature_K, mass_amu);
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 1; k < m; ++k) {
    j(k, k - 1) = std::sqrt(static_cast<double>(k));
    j(k - 1, k) = j(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  VelocityGrid g;
  g.temperature_K = temperature_K;
  g.mass_amu = mass_amu;
  g.span = 0.0;
  std::vector<double> x(n);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    x[k] = es.eigenvalues()(kk);
    w[k] = es.eigenvectors()(0, kk) * es.eigenvectors()(0, kk);
  }
  // Exact mirror symmetry.
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double xs = 0.5 * (x[n - 1 - k] - x[k]);
    const double ws = 0.5 * (w[k] + w[n - 1 - k]);
    x[k] = -xs;
    x[n - 1 - k] = xs;
    w[k] = w[n - 1 - k] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  double total = 0.0;
  for (double v : w) total += v;
  for (std::size_t k = 0; k < n; ++k) g.points.push_back({sigma * x[k], w[k] / total});
  return g;
}

VelocityGrid VelocityGrid::uniform(std::size_t n, double temperature_K, double mass_amu, double span) {
  if (n == 0) throw InputError("velocity grid needs at least one point");
  if (!(span > 0)) throw InputError("velocity grid span must be positive");
  const double sigma = thermal_velocity(temperature_K, mass_amu);
  VelocityGrid g;
  g.temperature_K = temperature_K;
  g.mass_amu = mass_amu;
  g.span = span;
  if (n == 1) {
    g.points.push_back({0.0, 1.0});
    return g;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = -span + 2 * span * static_cast<double>(k) / static_cast<double>(n - 1);
    const double w = std::exp(-0.5 * x * x);
    g.points.push_back({sigma * x, w});
    total += w;
  }
  for (auto& p : g.points) p.weight /= total;
  return g;
}

VelocityGrid VelocityGrid::single(double v) {
  VelocityGrid g;
  g.span = 0.0;
  g.points.push_back({v, 1.0});
  return g;
}

void VelocityGrid::validate() const {
  if (points.empty()) throw InputError("velocity grid is empty");
  double total = 0.0;
  for (const auto& p : points) {
    if (!(p.weight >= 0) || !std::isfinite(p.v)) throw InputError("velocity grid has an invalid point");
    total += p.weight;
  }
  if (std::abs(total - 1.0) > 1e-6) throw InputError(fmt::format("velocity weights sum to {:.9g}", total));
}

std::vector<double> linear_detunings(double start, double stop, std::size_t count) {
  if (count == 0) throw InputError("detuning list is empty");
  if (count == 1) return {start};
  std::vector<double> d(count);
  for (std::size_t i = 0; i < count; ++i) {
    d[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return d;
}

void SweepSpec::validate() const {
  if (detunings.empty()) throw InputError("detuning list is empty");
  const bool up = detunings.size() < 2 || detunings[1] > detunings[0];
  for (std::size_t i = 1; i < detunings.size(); ++i) {
    if (up ? !(detunings[i] > detunings[i - 1]) : !(detunings[i] < detunings[i - 1])) {
      throw InputError("signal detunings must be strictly monotone");
    }
  }
  grid.validate();
}

// ---------------------------------------------------------------------------

CellSolver::CellSolver(LevelScheme scheme, TransitionTable transitions, FieldSet fields, MediumParams medium,
                       SolverKind kind)
    : scheme_(std::move(scheme)),
      transitions_(std::move(transitions)),
      fields_(std::move(fields)),
      medium_(medium),
      kind_(kind),
      builder_(scheme_, build_decay_network(scheme_)) {
  fields_.validate();
  medium_.validate();
  const ComplexMatrix h = build_hamiltonian(scheme_, transitions_, fields_);
  builder_.build(h);  // Hermiticity and conservation checks
  base_ = builder_.coupling_part(h);
  const auto n = static_cast<Eigen::Index>(scheme_.size());
  offset_.resize(n);
  pump_frame_.setZero(n);
  signal_frame_.setZero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& lv = scheme_.level(static_cast<std::size_t>(i));
    offset_(i) = lv.energy_offset;
    for (FieldRole r : scheme_.manifold(lv.manifold).frame) {
      (r == FieldRole::pump ? pump_frame_ : signal_frame_)(i) += 1.0;
    }
  }
}

ComplexMatrix CellSolver::hamiltonian(double delta_s, VelocityShifts shifts) const {
  FieldSet f = fields_;
  f.signal.detuning = delta_s;
  return build_hamiltonian(scheme_, transitions_, f, shifts);
}

Liouvillian CellSolver::liouvillian(double delta_s, VelocityShifts shifts) const {
  const Eigen::VectorXd diag = offset_ - (fields_.pump.detuning + shifts.pump) * pump_frame_ -
                               (delta_s + shifts.signal) * signal_frame_;
  Liouvillian L;
  L.M = base_;
  builder_.add_diagonal(L.M, diag);
  L.s = ComplexVector::Zero(L.M.rows());
  return L;
}

DensityMatrix CellSolver::solve(double delta_s, VelocityShifts shifts, SteadyStateInfo* info) const {
  return steady_state(liouvillian(delta_s, shifts), builder_.layout(), kind_, info);
}

OpticalResponse CellSolver::response(double delta_s, VelocityShifts shifts) const {
  return response_from_density(solve(delta_s, shifts), transitions_, fields_.signal.polarization, medium_);
}

OpticalResponse average_response(const CellSolver& solver, double delta_s, Geometry geometry,
                                 const VelocityGrid& grid) {
  OpticalResponse acc;
  for (const auto& p : grid.points) {
    const auto shifts = doppler_shifts(p.v, geometry, solver.fields().pump.k, solver.fields().signal.k);
    try {
      acc += p.weight * solver.response(delta_s, shifts);
    } catch (const PhysicsError& e) {
      throw PhysicsError(fmt::format("cell (delta_s={:.6g}, v={:.6g} m/s): {}", delta_s, p.v, e.what()));
    }
  }
  return acc;
}

unsigned max_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

namespace {

std::string checkpoint_fingerprint(const SweepSpec& spec) {
  return fmt::format("detunings={} first={:a} last={:a} velocities={} geometry={}", spec.detunings.size(),
                     spec.detunings.front(), spec.detunings.back(), spec.grid.points.size(),
                     to_string(spec.geometry));
}

void load_checkpoint(const std::string& path, const SweepSpec& spec, std::vector<OpticalResponse>& out,
                     std::vector<char>& done) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::getline(in, line);
  if (line != "# ocw sweep checkpoint v1") throw InputError("not a sweep checkpoint: " + path);
  std::getline(in, line);
  if (line != "# " + checkpoint_fingerprint(spec)) {
    throw InputError("checkpoint " + path + " belongs to a different sweep");
  }
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::size_t idx = 0;
    std::string f[4];
    if (!(ss >> idx >> f[0] >> f[1] >> f[2] >> f[3]) || idx >= out.size()) {
      throw InputError("corrupt checkpoint line: " + line);
    }
    double v[4];
    for (int k = 0; k < 4; ++k) v[k] = std::strtod(f[k].c_str(), nullptr);
    out[idx] = OpticalResponse(v[0], v[1], v[2], v[3]);
    done[idx] = 1;
  }
}

void write_checkpoint(const std::string& path, const SweepSpec& spec, const std::vector<OpticalResponse>& out,
                      const std::vector<char>& done) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw IoError("cannot write checkpoint " + tmp);
    os << "# ocw sweep checkpoint v1\n# " << checkpoint_fingerprint(spec) << '\n';
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!done[i]) continue;
      const auto& r = out[i];
      os << fmt::format("{} {:a} {:a} {:a} {:a}\n", i, r.phi_plus(), r.phi_minus(), r.alpha_plus(),
                        r.alpha_minus());
    }
    if (!os) throw IoError("cannot write checkpoint " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

}  // namespace

std::vector<OpticalResponse> sweep(const CellSolver& solver, const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  const std::size_t n = spec.detunings.size();
  std::vector<OpticalResponse> out(n);
  std::vector<char> done(n, 0);
  if (options.checkpoint) load_checkpoint(*options.checkpoint, spec, out, done);

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < n; ++i) {
    if (!done[i]) todo.push_back(i);
  }
  const unsigned workers = std::clamp(options.workers, 1u, std::max(1u, static_cast<unsigned>(todo.size())));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;  // guards done, checkpoint writes, error and progress
  std::exception_ptr error;
  std::size_t finished = n - todo.size();
  std::size_t since_checkpoint = 0;

  auto work = [&] {
    while (!stop.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      const std::size_t i = todo[t];
      try {
        const OpticalResponse r = average_response(solver, spec.detunings[i], spec.geometry, spec.grid);
        std::lock_guard lock(mu);
        out[i] = r;
        done[i] = 1;
        ++finished;
        if (options.progress) std::cerr << fmt::format("\rsweep: {}/{} detunings", finished, n) << std::flush;
        if (options.checkpoint && ++since_checkpoint >= options.checkpoint_every) {
          since_checkpoint = 0;
          write_checkpoint(*options.checkpoint, spec, out, done);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (options.progress && !todo.empty()) std::cerr << '\n';
  if (error) {
    if (options.checkpoint) write_checkpoint(*options.checkpoint, spec, out, done);
    std::rethrow_exception(error);
  }
  if (options.checkpoint) std::filesystem::remove(*options.checkpoint);
  return out;
}

}  // namespace ocw
