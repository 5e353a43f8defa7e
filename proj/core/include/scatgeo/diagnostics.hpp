#pragma once

#include <string>
#include <vector>

#include "scatgeo/clusters.hpp"
#include "scatgeo/grid.hpp"

namespace scatgeo {

/// Parameters of the scattering region attached to a decomposition b:
/// all pairs crossing b at least sigma*t apart, internal size at most
/// delta*t^r (or the fixed radius R when r = 0).
struct RegionParams {
  ClusterDecomposition b;
  double r = 1.0;
  double sigma = 0.25;
  double delta = 0.5;
  double R = 10.0;
  /// Mollification collar in grid spacings; 0 selects sharp indicators.
  double mollify_spacings = 5.0;
};

/// Pointwise region mask in [0,1] over the propagator's grid at time t.
/// Pair separations use the reduced-mass-weighted pair coordinate; the
/// internal size |x^b| uses the b-frame mass metric.
std::vector<double> region_mask(const Propagator& prop, const RegionParams& p,
                                double t);

/// psi restricted to the region (pointwise mask multiplication).
GridState region_project(const GridState& psi, const Propagator& prop,
                         const RegionParams& p, double t);

struct DeficitSeries {
  std::vector<double> times;
  std::vector<double> deficit;     // ||psi - F psi||
  std::vector<double> occupation;  // ||F psi||^2
  std::string to_csv() const;
};

/// Propagates psi0 and records region deficit/occupation at the scheduled
/// times (each must be a multiple of dt).
DeficitSeries deficit_series(const GridState& psi0, const Propagator& prop,
                             const RegionParams& p,
                             const std::vector<double>& schedule, double dt);

struct EnergyWindow {
  double lo;
  double hi;
  double width;  // mollifier transition width
};

/// Smooth spectral window applied through a Chebyshev expansion of
/// phi(E > lo) * phi(E < hi) in the Hamiltonian.  Throws if the window
/// (plus its transition collar) touches any listed threshold.
GridState energy_filter(const GridState& psi, const Propagator& prop,
                        const EnergyWindow& window,
                        const std::vector<double>& threshold_list);

struct ChannelEntry {
  ClusterDecomposition b;
  double occupation;
};

struct ChannelReport {
  double time = 0;
  double norm_sq = 0;
  std::vector<ChannelEntry> entries;
  double occupation_sum = 0;
  double residual = 0;      // norm_sq - occupation_sum
  double overlap_mass = 0;  // pairwise mask-product mass
  std::string to_json() const;
};

/// Final-time channel occupation for every b with 2 <= |b| <= N, with the
/// same (sigma, delta, r) region profile for each b.
ChannelReport channel_decomposition(const GridState& psi0,
                                    const Propagator& prop, double sigma,
                                    double delta, double r, double time,
                                    double dt, double mollify_spacings = 5.0);

/// Two-cluster channel state on a 2D grid: the pair's bound state on the
/// internal axis tensored with a Gaussian packet of the given center,
/// width and velocity on the intercluster axis.  The propagator's frame
/// must have the pair as one block (N = 3, nu = 1).
GridState make_channel_state(const Propagator& prop, const PairIndex& pair,
                             int bound_index, double packet_center,
                             double packet_width, double packet_velocity);

/// || (phi(x_b/t) - phi(v_b)) psi || for a Gaussian test profile of the
/// given width on the leading intercluster coordinate.
double velocity_position_discrepancy(const GridState& psi,
                                     const Propagator& prop, double t,
                                     double test_width);

}  // namespace scatgeo
