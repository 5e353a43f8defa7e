#include "scatgeo/grid.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scatgeo {

GridSpec::GridSpec(int d, double l, int m) : dim(d), extent(l), points(m) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("grid dim must be 1 or 2");
  if (!(extent > 0)) throw std::invalid_argument("grid extent must be positive");
  if (points < 16 || (points & (points - 1)) != 0)
    throw std::invalid_argument("grid points must be a power of two >= 16");
}

std::size_t GridSpec::total() const {
  std::size_t t = 1;
  for (int d = 0; d < dim; ++d) t *= static_cast<std::size_t>(points);
  return t;
}

std::vector<double> GridSpec::axis() const {
  std::vector<double> x(points);
  double h = spacing();
  for (int i = 0; i < points; ++i) x[i] = -extent + i * h;
  return x;
}

std::vector<double> GridSpec::frequencies() const {
  std::vector<double> k(points);
  double dk = std::numbers::pi / extent;
  for (int i = 0; i < points; ++i)
    k[i] = dk * (i < points / 2 ? i : i - points);
  return k;
}

double PairPotential::evaluate(double x) const {
  switch (kind) {
    case PotentialKind::zero:
      return 0.0;
    case PotentialKind::long_range_power:
      return c * std::pow(1.0 + x * x, -epsilon / 2.0);
    case PotentialKind::poschl_teller: {
      double s = 1.0 / std::cosh(x);
      return c * s * s;
    }
  }
  return 0.0;
}

double GridState::norm_sq() const {
  double s = 0;
  for (const auto& v : values) s += std::norm(v);
  return s * std::pow(spec.spacing(), spec.dim);
}

void GridState::normalize() {
  double n = std::sqrt(norm_sq());
  if (!(n > 0)) throw std::runtime_error("cannot normalize zero state");
  for (auto& v : values) v /= n;
}

GridState make_gaussian(const GridSpec& spec, const std::vector<double>& center,
                        const std::vector<double>& width,
                        const std::vector<double>& momentum) {
  if (static_cast<int>(center.size()) != spec.dim ||
      static_cast<int>(width.size()) != spec.dim ||
      static_cast<int>(momentum.size()) != spec.dim)
    throw std::invalid_argument("make_gaussian: parameter size mismatch");
  GridState psi(spec);
  auto x = spec.axis();
  const int m = spec.points;
  if (spec.dim == 1) {
    for (int i = 0; i < m; ++i) {
      double d = x[i] - center[0];
      psi.values[i] = std::polar(
          std::exp(-d * d / (4.0 * width[0] * width[0])), momentum[0] * x[i]);
    }
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double d0 = x[i] - center[0], d1 = x[j] - center[1];
        double amp = std::exp(-d0 * d0 / (4.0 * width[0] * width[0]) -
                              d1 * d1 / (4.0 * width[1] * width[1]));
        psi.values[i * m + j] =
            std::polar(amp, momentum[0] * x[i] + momentum[1] * x[j]);
      }
  }
  psi.normalize();
  return psi;
}

std::complex<double> overlap(const GridState& a, const GridState& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("overlap: grid mismatch");
  std::complex<double> s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    s += std::conj(a.values[i]) * b.values[i];
  return s * std::pow(a.spec.spacing(), a.spec.dim);
}

struct Propagator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

Propagator::Propagator(const GridSpec& spec, const HamiltonianSpec& ham)
    : spec_(spec), ham_(ham), plans_(std::make_unique<Plans>()) {
  if (ham_.frame.nu() != 1)
    throw std::invalid_argument("grid dynamics requires nu = 1");
  if (ham_.frame.dim() != spec_.dim)
    throw std::invalid_argument("frame dimension does not match grid");

  std::vector<std::complex<double>> scratch(spec_.total());
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (spec_.dim == 1) {
    plans_->forward =
        fftw_plan_dft_1d(spec_.points, ptr, ptr, FFTW_FORWARD, flags);
    plans_->backward =
        fftw_plan_dft_1d(spec_.points, ptr, ptr, FFTW_BACKWARD, flags);
  } else {
    plans_->forward = fftw_plan_dft_2d(spec_.points, spec_.points, ptr, ptr,
                                       FFTW_FORWARD, flags);
    plans_->backward = fftw_plan_dft_2d(spec_.points, spec_.points, ptr, ptr,
                                        FFTW_BACKWARD, flags);
  }

  auto k = spec_.frequencies();
  const auto& w = ham_.frame.weights();
  const double h2 = ham_.hbar * ham_.hbar;
  kinetic_.resize(spec_.total());
  if (spec_.dim == 1) {
    for (int i = 0; i < spec_.points; ++i)
      kinetic_[i] = h2 * k[i] * k[i] / (2.0 * w(0));
  } else {
    for (int i = 0; i < spec_.points; ++i)
      for (int j = 0; j < spec_.points; ++j)
        kinetic_[i * spec_.points + j] =
            h2 * (k[i] * k[i] / (2.0 * w(0)) + k[j] * k[j] / (2.0 * w(1)));
  }
  potential_ = potential_grid(PotentialTerm::full);
}

Propagator::~Propagator() = default;

void Propagator::fft_forward(std::vector<std::complex<double>>& data) const {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, ptr, ptr);
}

void Propagator::fft_backward(std::vector<std::complex<double>>& data) const {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, ptr, ptr);
  double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

std::vector<double> Propagator::potential_grid(
    PotentialTerm term, const ClusterDecomposition* a) const {
  if (term != PotentialTerm::full && a == nullptr)
    throw std::invalid_argument("potential restriction needs a decomposition");
  std::vector<double> v(spec_.total(), 0.0);
  auto x = spec_.axis();
  const int m = spec_.points;
  for (const auto& entry : ham_.potential.entries) {
    if (entry.kind == PotentialKind::zero) continue;
    if (term == PotentialTerm::cluster && !pair_leq(entry.pair, *a)) continue;
    if (term == PotentialTerm::intercluster && pair_leq(entry.pair, *a))
      continue;
    Eigen::RowVectorXd row = pair_coordinate(entry.pair, ham_.frame);
    if (spec_.dim == 1) {
      for (int i = 0; i < m; ++i) v[i] += entry.evaluate(row(0) * x[i]);
    } else {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          v[i * m + j] += entry.evaluate(row(0) * x[i] + row(1) * x[j]);
    }
  }
  return v;
}

GridState Propagator::apply_hamiltonian(const GridState& psi,
                                        PotentialTerm term,
                                        const ClusterDecomposition* a) const {
  if (psi.values.size() != spec_.total())
    throw std::invalid_argument("apply_hamiltonian: grid mismatch");
  GridState out = psi;
  fft_forward(out.values);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] *= kinetic_[i];
  fft_backward(out.values);
  const std::vector<double>& v = (term == PotentialTerm::full)
                                     ? potential_
                                     : potential_grid(term, a);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += v[i] * psi.values[i];
  return out;
}

void Propagator::propagate(GridState& psi, double dt, int steps) const {
  if (psi.values.size() != spec_.total())
    throw std::invalid_argument("propagate: grid mismatch");
  if (steps == 0) return;
  const double hb = ham_.hbar;
  std::vector<std::complex<double>> half_v(potential_.size()), kin(kinetic_.size());
  for (std::size_t i = 0; i < potential_.size(); ++i)
    half_v[i] = std::polar(1.0, -0.5 * dt * potential_[i] / hb);
  for (std::size_t i = 0; i < kinetic_.size(); ++i)
    kin[i] = std::polar(1.0, -dt * kinetic_[i] / hb);

  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < psi.values.size(); ++i)
      psi.values[i] *= half_v[i];
    fft_forward(psi.values);
    for (std::size_t i = 0; i < psi.values.size(); ++i)
      psi.values[i] *= kin[i];
    fft_backward(psi.values);
    for (std::size_t i = 0; i < psi.values.size(); ++i)
      psi.values[i] *= half_v[i];
    if ((s & 1023) == 1023 || s + 1 == steps) {
      for (const auto& v : psi.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw std::runtime_error("non-finite state at step " +
                                   std::to_string(s));
    }
  }
}

void Propagator::propagate_imaginary(GridState& psi, double dtau,
                                     int steps) const {
  const double hb = ham_.hbar;
  std::vector<double> half_v(potential_.size()), kin(kinetic_.size());
  for (std::size_t i = 0; i < potential_.size(); ++i)
    half_v[i] = std::exp(-0.5 * dtau * potential_[i] / hb);
  for (std::size_t i = 0; i < kinetic_.size(); ++i)
    kin[i] = std::exp(-dtau * kinetic_[i] / hb);
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < psi.values.size(); ++i)
      psi.values[i] *= half_v[i];
    fft_forward(psi.values);
    for (std::size_t i = 0; i < psi.values.size(); ++i)
      psi.values[i] *= kin[i];
    fft_backward(psi.values);
    for (std::size_t i = 0; i < psi.values.size(); ++i)
      psi.values[i] *= half_v[i];
    psi.normalize();
  }
}

double Propagator::energy(const GridState& psi) const {
  return overlap(psi, apply_hamiltonian(psi)).real();
}

std::vector<BoundState> solve_bound_states(const PairSubsystem& sub,
                                           const GridSpec& spec, int count) {
  if (spec.dim != 1)
    throw std::invalid_argument("solve_bound_states: subsystem must be 1D");
  const int m = spec.points;
  auto k = spec.frequencies();
  const double h2 = sub.hbar * sub.hbar;
  std::vector<double> lambda(m);
  for (int i = 0; i < m; ++i)
    lambda[i] = h2 * k[i] * k[i] / (2.0 * sub.reduced_mass);

  // Circulant kinetic matrix: first row from the inverse transform of the
  // mode energies.
  std::vector<double> c(m, 0.0);
  const double tau = 2.0 * std::numbers::pi / m;
  for (int r = 0; r < m; ++r) {
    double s = 0;
    for (int q = 0; q < m; ++q) s += lambda[q] * std::cos(tau * q * r);
    c[r] = s / m;
  }

  Eigen::MatrixXd a(m, m);
  auto x = spec.axis();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = c[(i - j + m) % m];
  for (int i = 0; i < m; ++i) a(i, i) += sub.potential.evaluate(x[i]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  std::vector<BoundState> out;
  double h = spec.spacing();
  for (int i = 0; i < m && static_cast<int>(out.size()) < count; ++i) {
    if (es.eigenvalues()(i) >= 0) break;
    BoundState bs;
    bs.energy = es.eigenvalues()(i);
    bs.wavefunction.resize(m);
    for (int j = 0; j < m; ++j)
      bs.wavefunction[j] = es.eigenvectors()(j, i) / std::sqrt(h);
    out.push_back(std::move(bs));
  }
  return out;
}

double imaginary_time_ground_energy(const PairSubsystem& sub,
                                    const GridSpec& spec, double dtau,
                                    int steps) {
  // Two fictitious particles of mass 2*mu give the requested reduced mass.
  MassSpec mass({2.0 * sub.reduced_mass, 2.0 * sub.reduced_mass}, sub.hbar);
  ClusterDecomposition pair({{1, 2}}, 2);
  JacobiFrame frame(mass, pair, 1);
  HamiltonianSpec ham{frame, PotentialSpec{{sub.potential}}, sub.hbar};
  Propagator prop(spec, ham);
  GridState psi = make_gaussian(spec, {0.0}, {1.0}, {0.0});
  prop.propagate_imaginary(psi, dtau, steps);
  return prop.energy(psi);
}

std::vector<double> thresholds(const MassSpec& mass,
                               const PotentialSpec& potential,
                               const GridSpec& pair_grid) {
  if (mass.n_particles() != 3)
    throw std::invalid_argument("thresholds: implemented for N = 3");
  std::vector<double> out{0.0};
  for (const auto& entry : potential.entries) {
    if (entry.kind == PotentialKind::zero) continue;
    double mi = mass.masses[entry.pair.i - 1];
    double mj = mass.masses[entry.pair.j - 1];
    PairSubsystem sub{mi * mj / (mi + mj), entry, mass.hbar};
    for (const auto& bs : solve_bound_states(sub, pair_grid, 16))
      out.push_back(bs.energy);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-9; }),
            out.end());
  return out;
}

}  // namespace scatgeo
