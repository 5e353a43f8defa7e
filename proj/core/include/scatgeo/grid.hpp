#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "scatgeo/clusters.hpp"
#include "scatgeo/mass_geometry.hpp"

namespace scatgeo {

/// Uniform periodic grid over [-L, L)^dim with M points per axis.
struct GridSpec {
  int dim;
  double extent;  // half-width L
  int points;     // M per axis, power of two, >= 16

  GridSpec(int d, double l, int m);
  double spacing() const { return 2.0 * extent / points; }
  std::size_t total() const;
  /// Grid nodes along one axis.
  std::vector<double> axis() const;
  /// FFT wavenumbers in transform order.
  std::vector<double> frequencies() const;
};

enum class PotentialKind { zero, long_range_power, poschl_teller };

/// One pair interaction V_alpha(x_alpha): c*(1+x^2)^(-eps/2) for the
/// long-range kind, c*sech^2(x) for poschl_teller.
struct PairPotential {
  PairIndex pair;
  PotentialKind kind = PotentialKind::zero;
  double c = 0.0;
  double epsilon = 0.5;

  double evaluate(double x) const;
};

struct PotentialSpec {
  std::vector<PairPotential> entries;
};

enum class PotentialTerm { full, cluster, intercluster };  // V, V_a, I_a

/// Complex wavefunction over a grid in clustered Jacobi coordinates.
struct GridState {
  GridSpec spec;
  std::vector<std::complex<double>> values;

  explicit GridState(const GridSpec& s)
      : spec(s), values(s.total(), {0.0, 0.0}) {}
  double norm_sq() const;
  void normalize();
};

/// Product of per-axis Gaussians exp(-(x-x0)^2/(4 w^2) + i k0 x); unit norm.
GridState make_gaussian(const GridSpec& spec, const std::vector<double>& center,
                        const std::vector<double>& width,
                        const std::vector<double>& momentum);

std::complex<double> overlap(const GridState& a, const GridState& b);

struct HamiltonianSpec {
  JacobiFrame frame;
  PotentialSpec potential;
  double hbar = 1.0;
};

/// Split-step spectral Hamiltonian on a grid whose axes are the frame's
/// internal Jacobi coordinates (nu = 1, dim = N-1 in {1,2}).  Owns the FFT
/// plans and the cached kinetic/potential tables.
class Propagator {
 public:
  Propagator(const GridSpec& spec, const HamiltonianSpec& ham);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  const GridSpec& spec() const { return spec_; }
  const HamiltonianSpec& hamiltonian() const { return ham_; }

  /// H psi, with the potential restricted to V (full), V_a or I_a.
  GridState apply_hamiltonian(const GridState& psi,
                              PotentialTerm term = PotentialTerm::full,
                              const ClusterDecomposition* a = nullptr) const;

  /// Strang split-step evolution by `steps` steps of size dt (dt may be
  /// negative for backward evolution).  Throws on non-finite values.
  void propagate(GridState& psi, double dt, int steps) const;

  /// Same splitting with exp(-tau H) factors and per-step renormalization.
  void propagate_imaginary(GridState& psi, double dtau, int steps) const;

  /// <psi, H psi> (real up to rounding).
  double energy(const GridState& psi) const;

  /// Pointwise potential table for a term.
  std::vector<double> potential_grid(PotentialTerm term,
                                     const ClusterDecomposition* a = nullptr) const;

  void fft_forward(std::vector<std::complex<double>>& data) const;
  void fft_backward(std::vector<std::complex<double>>& data) const;

  /// Kinetic energy of each FFT mode.
  const std::vector<double>& kinetic_table() const { return kinetic_; }

 private:
  GridSpec spec_;
  HamiltonianSpec ham_;
  std::vector<double> kinetic_;  // per FFT mode
  std::vector<double> potential_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// A single interacting pair reduced to its 1D internal coordinate.
struct PairSubsystem {
  double reduced_mass;
  PairPotential potential;
  double hbar = 1.0;
};

struct BoundState {
  double energy;
  std::vector<double> wavefunction;  // real, unit norm (with volume element)
};

/// Negative-energy eigenpairs of the 1D spectral pair Hamiltonian, lowest
/// first, at most `count`.
std::vector<BoundState> solve_bound_states(const PairSubsystem& sub,
                                           const GridSpec& spec, int count);

/// Ground-state energy estimate by normalized imaginary-time split-step
/// iteration, independent of the dense solve.
double imaginary_time_ground_energy(const PairSubsystem& sub,
                                    const GridSpec& spec, double dtau,
                                    int steps);

/// Threshold set for an N=3, nu=1 model: {0} plus the pair bound-state
/// energies of every 2-cluster subsystem, sorted ascending.
std::vector<double> thresholds(const MassSpec& mass,
                               const PotentialSpec& potential,
                               const GridSpec& pair_grid);

}  // namespace scatgeo
