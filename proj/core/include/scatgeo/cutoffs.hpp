#pragma once

#include <cmath>
#include <stdexcept>

namespace scatgeo {

/// Transition width sigma and threshold tau for the one-sided cutoffs.
struct CutoffSpec {
  double sigma;
  double tau;
  CutoffSpec(double s, double t) : sigma(s), tau(t) {
    if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
  }
};

namespace detail {
// exp(-1/t) continued by 0; the standard mollifier seed.  Exact zero for
// t <= 0 keeps the plateaus bitwise.
inline double bump_seed(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace detail

/// Smooth monotone step: exactly 1 for lambda <= -1, exactly 0 for
/// lambda >= 0, strictly decreasing in between, symmetric about -1/2.
inline double rho(double lambda) {
  if (lambda <= -1.0) return 1.0;
  if (lambda >= 0.0) return 0.0;
  double a = detail::bump_seed(-lambda);
  double b = detail::bump_seed(lambda + 1.0);
  return a / (a + b);
}

/// phi_sigma(lambda < tau): 1 for lambda <= tau, 0 for lambda >= tau+sigma.
inline double phi_less(double lambda, const CutoffSpec& spec) {
  return rho((lambda - (spec.tau + spec.sigma)) / spec.sigma);
}

/// phi_sigma(lambda > tau): 0 for lambda <= tau-sigma, 1 for lambda >= tau.
inline double phi_greater(double lambda, const CutoffSpec& spec) {
  return 1.0 - phi_less(lambda, CutoffSpec(spec.sigma, spec.tau - spec.sigma));
}

/// Radial cutoff: exactly 0 for |x| <= 1, exactly 1 for |x| >= 2.
inline double chi0(double radius) { return 1.0 - rho(radius - 2.0); }

/// Direction cutoffs on cos(z, zeta) in [-1, 1]: psi_plus is 1 on
/// [theta, 1] and 0 on [-1, theta/2]; psi_minus mirrors it.
inline double psi_plus(double tau, double theta) {
  return 1.0 - rho((tau - theta) / (theta / 2.0));
}
inline double psi_minus(double tau, double theta) {
  return psi_plus(-tau, theta);
}

}  // namespace scatgeo
