#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "scatgeo/grid.hpp"

namespace scatgeo {

/// Effective intercluster tail c*(1+|z|^2)^(-eps/2) with 1/2 < eps <= 1.
struct LongRangeTail {
  double c = 1.0;
  double epsilon = 0.8;

  double value_sq(double z_sq) const;
  double value(double z) const { return value_sq(z * z); }
  double derivative(double z) const;
};

struct PhaseParams {
  double theta = 0.5;  // direction-cone parameter
  double d = 0.5;      // low-momentum cutoff scale
  double r0 = 16.0;    // spatial cutoff radius
  int depth = 2;       // iteration count K of the eikonal correction
};

/// Approximate outgoing/incoming phase phi(x, xi) = x.xi + correction, glued
/// to the free phase near the origin and at small momenta.  The 1D routines
/// use the closed iteration e_0 = I, e_k = I + e_{k-1}^2/(2 xi^2),
/// u = -(1/xi) int_0^x e_{K-1}; the quadrature routines integrate the same
/// iteration along rays in any dimension and serve as a cross-check.
class PhaseFunction {
 public:
  PhaseFunction(LongRangeTail tail, PhaseParams params);

  const PhaseParams& params() const { return params_; }
  const LongRangeTail& tail() const { return tail_; }

  /// u_K and its derivatives (1D closed route; xi != 0).
  double correction(double x, double xi) const;
  double correction_dx(double x, double xi) const;
  double correction_dxx(double x, double xi) const;
  double correction_dxi(double x, double xi) const;

  /// Glued phase x*xi + u_K * chi0(2|xi|/d) * chi0(2|x|/r0); identically
  /// x*xi for |xi| <= d/2 or |x| <= r0/2.
  double phase(double x, double xi) const;

  /// Stationary remainder (1/2)(phi_x)^2 + I - (1/2)xi^2 - (i/2)phi_xx of
  /// the pure correction (valid where both cutoffs equal 1).
  std::complex<double> residual(double x, double xi) const;

  /// Ray-quadrature u_K^{sign} in any dimension (oracle route).
  double correction_quadrature(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& xi, int sign,
                               int depth) const;
  /// Glued phase through the quadrature route with directional gluing
  /// psi_+/psi_- on cos(x, xi).
  double phase_quadrature(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& xi) const;

  /// e_{k}(x, xi^2) of the closed 1D iteration and its x-derivative.
  double e_level(double x, double xi_sq, int k) const;
  double e_level_dx(double x, double xi_sq, int k) const;

 private:
  LongRangeTail tail_;
  PhaseParams params_;
};

struct ShellDecay {
  std::vector<double> shell_center;
  std::vector<double> sup_value;
  double slope = 0;  // log-log least-squares slope

  std::string to_json() const;
};

/// sup |phi(z,xi) - z xi| over `shells` geometric shells subdividing
/// [z_lo, z_hi] and the given momenta, with the decay exponent fitted
/// across shells.
ShellDecay phase_deviation_decay(const PhaseFunction& phase, double z_lo,
                                 double z_hi, int shells,
                                 const std::vector<double>& xi_samples);
/// Same for the stationary remainder |a(z, xi)|.
ShellDecay residual_decay(const PhaseFunction& phase, double z_lo, double z_hi,
                          int shells, const std::vector<double>& xi_samples);
/// Same for |d/dx of the correction|.
ShellDecay correction_derivative_decay(const PhaseFunction& phase, double z_lo,
                                       double z_hi, int shells,
                                       const std::vector<double>& xi_samples);

/// Stationary modifier J on a 1D grid, applied as psi -> (1/2pi) sum_j
/// exp(i phi(x_l, k_j)) psi_hat(k_j) dk with a precomputed kernel matrix.
/// Reduces to the exact inverse transform when phi = x xi.
class Modifier {
 public:
  Modifier(const PhaseFunction& phase, const GridSpec& spec);
  ~Modifier();
  Modifier(const Modifier&) = delete;
  Modifier& operator=(const Modifier&) = delete;

  const GridSpec& spec() const { return spec_; }
  GridState apply(const GridState& psi) const;

 private:
  GridSpec spec_;
  Eigen::MatrixXcd kernel_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

struct ProbeReport {
  bool modified = true;
  std::vector<double> times;
  std::vector<double> increments;    // ||Omega(t_k) - Omega(t_{k-1})||
  std::vector<double> localization;  // far-region mass of Omega(t_k)

  std::string to_json() const;
};

/// Omega(T) = exp(iTH) J exp(-iTH_0) psi0 sampled on an increasing schedule
/// (each time a multiple of dt); J is the identity when mod is null.
/// Throws if more than `boundary_tol` mass reaches the outer 10% of the
/// grid at any sampled time.
ProbeReport wave_operator_probe(const GridState& psi0, const Propagator& full,
                                const Propagator& free_prop,
                                const Modifier* mod,
                                const std::vector<double>& schedule, double dt,
                                double loc_sigma,
                                double boundary_tol = 1e-6);

}  // namespace scatgeo
