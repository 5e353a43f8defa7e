#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scatgeo/clusters.hpp"
#include "scatgeo/cutoffs.hpp"
#include "scatgeo/mass_geometry.hpp"

namespace scatgeo {

/// The admissible constant tuple (theta_j, rho_j, gamma, sigma) driving the
/// phase-space partition of unity.  theta_j is indexed j = 1..N-1 and rho_j
/// by j = 2..N.
struct PartitionConstants {
  int n = 0;
  std::vector<double> theta;  // theta[j-1] = theta_j
  std::vector<double> rho;    // rho[j-2]   = rho_j
  double gamma = 0;
  double sigma = 0;

  // theta_N = 0 by convention: the |b| = N cutoff degenerates to the shell
  // boundary.
  double theta_j(int j) const { return j == n ? 0.0 : theta.at(j - 1); }
  double rho_j(int j) const { return rho.at(j - 2); }
  double gamma1_prime() const { return gamma * (1.0 + theta_j(n - 1)); }
  double gamma2_prime() const {
    return (1.0 + gamma) / (1.0 + theta_j(n - 1));
  }
  /// min_j rho_j/theta_j over 2 <= j <= N-1 (infinite for N = 2).
  double r0() const;

  std::string to_json() const;
};

struct ConstraintCheck {
  std::string name;
  bool pass;
  double slack;  // positive means satisfied with this margin
};

struct ConstantsReport {
  bool all_pass = true;
  std::vector<ConstraintCheck> items;
};

/// Deterministic admissible constants for 2 <= N <= 6 (gamma = 1.1, theta
/// chain shrinking by 200x per level, sigma at 90% of its bound).
PartitionConstants select_constants(int n);

/// Itemized check of every admissibility inequality.
ConstantsReport verify_constants(const PartitionConstants& c, int n);

enum class RegionKind { T, TTilde, S, STheta };

/// Evaluator for the partition of unity over all decompositions with
/// 2 <= |b| <= N.  Evaluation points are particle positions (COM zero,
/// length nu*N); all per-decomposition norms use that decomposition's
/// mass-metric frame.
class PhasePartition {
 public:
  PhasePartition(MassSpec mass, int nu, PartitionConstants constants);

  const std::vector<ClusterDecomposition>& decompositions() const {
    return decomps_;
  }
  const JacobiFrame& frame(int b_index) const { return frames_[b_index]; }
  const PartitionConstants& constants() const { return constants_; }
  int nu() const { return nu_; }

  /// Frame-independent |x|^2 of a configuration.
  double config_norm_sq(const Eigen::VectorXd& r) const;

  bool in_region(const Eigen::VectorXd& r, int b_index, RegionKind kind,
                 double rho, double theta) const;

  /// varphi_b of (3.18)-style cutoff product.
  double varphi(int b_index, const Eigen::VectorXd& r) const;

  /// Telescoping-product J_b (valid everywhere).
  double J(int b_index, const Eigen::VectorXd& r) const;

  /// Restricted-sum form of J_b (inner sums limited to b < b_j); agrees
  /// with J on the shell.
  double J_restricted(int b_index, const Eigen::VectorXd& r) const;

  double sum_J(const Eigen::VectorXd& r) const;

  /// varphi for every decomposition at one configuration.
  std::vector<double> all_varphi(const Eigen::VectorXd& r) const;
  /// J_b from a precomputed all_varphi vector.
  double J_cached(int b_index, const std::vector<double>& phis) const;

 private:
  MassSpec mass_;
  int nu_;
  PartitionConstants constants_;
  std::vector<ClusterDecomposition> decomps_;
  std::vector<JacobiFrame> frames_;
  std::vector<std::vector<InterclusterLink>> links_;
  std::vector<std::vector<int>> by_size_;  // decomposition indices per |b|
  std::vector<std::vector<char>> refines_;  // refines_[i][j]: b_i <= b_j
};

struct PartitionReport {
  PartitionConstants constants;
  int n = 0;
  int nu = 1;
  std::uint64_t seed = 0;
  int shell_samples = 0;
  int covering_samples = 0;
  double max_identity_deviation = 0;
  double max_restricted_mismatch = 0;
  double max_locality_change = 0;
  int support_violations = 0;
  int covering_violations = 0;
  int disjointness_violations = 0;
  double max_gradient = 0;
  double max_gradient_half_step = 0;

  std::string to_json() const;
};

/// Sampled verification of the partition identity, support, covering,
/// disjointness, locality and gradient-bound properties.  Sampling mixes
/// uniform shell draws with adversarial draws near cutoff transitions.
PartitionReport verify_partition(const MassSpec& mass, int nu,
                                 const PartitionConstants& constants,
                                 int samples, std::uint64_t seed);

}  // namespace scatgeo
