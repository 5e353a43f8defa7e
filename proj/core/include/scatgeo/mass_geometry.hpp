#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "scatgeo/clusters.hpp"

namespace scatgeo {

/// Particle masses and hbar.  hbar defaults to 1 (the unit system used by
/// all dynamics).
struct MassSpec {
  std::vector<double> masses;
  double hbar = 1.0;

  MassSpec(std::vector<double> m, double hb = 1.0);
  int n_particles() const { return static_cast<int>(masses.size()); }
  double total_mass() const;
};

/// Clustered Jacobi coordinate frame for a decomposition b: the first
/// nu*(|b|-1) coordinates are the intercluster part x_b (Jacobi chain over
/// block centers of mass in canonical block order), the remainder x^b
/// (per-block Jacobi chains in ascending particle order).
///
/// Coordinate vectors are length nu*(N-1) with components of each nu-vector
/// contiguous.  The scalar maps below act per spatial component.
class JacobiFrame {
 public:
  JacobiFrame(const MassSpec& mass, const ClusterDecomposition& b, int nu);

  const MassSpec& mass() const { return mass_; }
  const ClusterDecomposition& decomposition() const { return decomp_; }
  int nu() const { return nu_; }
  int n_coords() const { return static_cast<int>(weights_.size()); }  // N-1
  int dim() const { return nu_ * n_coords(); }
  int n_intercluster() const { return decomp_.size() - 1; }

  /// Reduced-mass weights, one per Jacobi coordinate (M_1..M_{|b|-1} then
  /// the per-block mu's).
  const Eigen::VectorXd& weights() const { return weights_; }

  /// (N-1) x N matrix: clustered coordinates from particle positions.
  const Eigen::MatrixXd& coord_map() const { return to_coords_; }
  /// N x (N-1) matrix: particle positions (COM zero) from coordinates.
  const Eigen::MatrixXd& position_map() const { return to_positions_; }

  /// Total mass of block l and reduced mass of a block pair.
  double block_mass(int l) const { return block_masses_[l]; }
  double link_weight(const InterclusterLink& link) const;

  /// Row over particle positions evaluating the intercluster vector
  /// z_{bk} = com(to_block) - com(from_block).
  Eigen::RowVectorXd link_row(const InterclusterLink& link) const;

  /// Coordinate vector -> particle positions (length nu*N, COM zero).
  Eigen::VectorXd to_positions(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_positions(const Eigen::VectorXd& r) const;

  std::string to_json() const;

 private:
  MassSpec mass_;
  ClusterDecomposition decomp_;
  int nu_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd to_coords_;
  Eigen::MatrixXd to_positions_;
  std::vector<double> block_masses_;
};

/// Mass inner product <x,y> = sum_i w_i x_i . y_i in a frame.
double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
             const JacobiFrame& frame);
double norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame);

/// Mass norm^2 of the intercluster part x_b of a coordinate vector.
double intercluster_norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame);
/// Mass norm^2 of the internal part x^b.
double internal_norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame);

/// Weighted |z_{bk}|^2 of an intercluster link evaluated on a coordinate
/// vector, using the reduced mass of the two block masses.
double link_norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame,
                    const InterclusterLink& link);

/// dim x dim linear map from f1-coordinates to f2-coordinates; orthogonal
/// for the mass metrics on the COM-zero subspace.
Eigen::MatrixXd change_frame(const JacobiFrame& f1, const JacobiFrame& f2);

/// Row over frame coordinates evaluating x_alpha = r_i - r_j (per spatial
/// component).
Eigen::RowVectorXd pair_coordinate(const PairIndex& alpha,
                                   const JacobiFrame& frame);

/// The nu-vector x_alpha = r_i - r_j evaluated on a coordinate vector.
Eigen::VectorXd pair_vector(const PairIndex& alpha, const Eigen::VectorXd& x,
                            const JacobiFrame& frame);

/// Weighted |x_alpha|^2 for a pair alpha crossing two blocks of b:
/// the link term plus the internal mass norms of the two blocks involved,
/// matching the (z_{bk}, x^{(C_l)}, x^{(C_m)}) embedding.  For alpha inside
/// a block, the pair reduced-mass norm of x_alpha itself.
double pair_norm_sq(const PairIndex& alpha, const Eigen::VectorXd& x,
                    const JacobiFrame& frame);

/// (|x_b|^2, |z_{ck}|^2, |x^c|^2) for an immediate refinement c < b,
/// |c| = |b|+1, satisfying |x|^2 = |x_b|^2 + |z_{ck}|^2 + |x^c|^2.
/// x is given in frame_b coordinates.
std::array<double, 3> norm_split(const Eigen::VectorXd& x,
                                 const JacobiFrame& frame_b,
                                 const JacobiFrame& frame_c);

}  // namespace scatgeo
