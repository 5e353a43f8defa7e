#include "scatgeo/mass_geometry.hpp"

#include <sstream>
#include <stdexcept>

namespace scatgeo {

namespace {

double reduced(double m1, double m2) { return m1 * m2 / (m1 + m2); }

}  // namespace

MassSpec::MassSpec(std::vector<double> m, double hb)
    : masses(std::move(m)), hbar(hb) {
  if (masses.size() < 2) throw std::invalid_argument("need at least 2 masses");
  for (double v : masses)
    if (!(v > 0)) throw std::invalid_argument("masses must be positive");
  if (!(hbar > 0)) throw std::invalid_argument("hbar must be positive");
}

double MassSpec::total_mass() const {
  double s = 0;
  for (double v : masses) s += v;
  return s;
}

JacobiFrame::JacobiFrame(const MassSpec& mass, const ClusterDecomposition& b,
                         int nu)
    : mass_(mass), decomp_(b), nu_(nu) {
  const int n = mass.n_particles();
  if (b.n_particles() != n)
    throw std::invalid_argument("decomposition/mass particle count mismatch");
  if (nu < 1) throw std::invalid_argument("nu must be >= 1");

  const int k = b.size();
  for (int l = 0; l < k; ++l) {
    double s = 0;
    for (int p : b.block(l)) s += mass.masses[p - 1];
    block_masses_.push_back(s);
  }

  to_coords_ = Eigen::MatrixXd::Zero(n - 1, n);
  weights_ = Eigen::VectorXd::Zero(n - 1);
  int row = 0;

  // Intercluster Jacobi chain over block centers of mass.
  double acc_mass = block_masses_[0];
  for (int l = 0; l + 1 < k; ++l, ++row) {
    for (int j = 0; j <= l; ++j)
      for (int p : b.block(j))
        to_coords_(row, p - 1) -= mass.masses[p - 1] / acc_mass;
    for (int p : b.block(l + 1))
      to_coords_(row, p - 1) += mass.masses[p - 1] / block_masses_[l + 1];
    weights_(row) = reduced(block_masses_[l + 1], acc_mass);
    acc_mass += block_masses_[l + 1];
  }

  // Intra-block Jacobi chains, ascending particle order within each block.
  for (int l = 0; l < k; ++l) {
    const auto& blk = b.block(l);
    double acc = mass.masses[blk[0] - 1];
    for (size_t i = 1; i < blk.size(); ++i, ++row) {
      double sum_prev = acc;
      for (size_t j = 0; j < i; ++j)
        to_coords_(row, blk[j] - 1) -= mass.masses[blk[j] - 1] / sum_prev;
      to_coords_(row, blk[i] - 1) += 1.0;
      weights_(row) = reduced(mass.masses[blk[i] - 1], sum_prev);
      acc += mass.masses[blk[i] - 1];
    }
  }

  // Invert on the COM-zero subspace by augmenting with the COM row.
  Eigen::MatrixXd full(n, n);
  full.topRows(n - 1) = to_coords_;
  double mt = mass.total_mass();
  for (int p = 0; p < n; ++p) full(n - 1, p) = mass.masses[p] / mt;
  to_positions_ = full.inverse().leftCols(n - 1);
}

double JacobiFrame::link_weight(const InterclusterLink& link) const {
  return reduced(block_masses_[link.from_block], block_masses_[link.to_block]);
}

Eigen::RowVectorXd JacobiFrame::link_row(const InterclusterLink& link) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(mass_.n_particles());
  for (int p : decomp_.block(link.to_block))
    row(p - 1) += mass_.masses[p - 1] / block_masses_[link.to_block];
  for (int p : decomp_.block(link.from_block))
    row(p - 1) -= mass_.masses[p - 1] / block_masses_[link.from_block];
  return row;
}

Eigen::VectorXd JacobiFrame::to_positions(const Eigen::VectorXd& x) const {
  const int n = mass_.n_particles();
  if (x.size() != dim()) throw std::invalid_argument("coordinate size mismatch");
  Eigen::VectorXd r(nu_ * n);
  for (int c = 0; c < nu_; ++c) {
    Eigen::VectorXd xc(n - 1);
    for (int i = 0; i < n - 1; ++i) xc(i) = x(i * nu_ + c);
    Eigen::VectorXd rc = to_positions_ * xc;
    for (int p = 0; p < n; ++p) r(p * nu_ + c) = rc(p);
  }
  return r;
}

Eigen::VectorXd JacobiFrame::from_positions(const Eigen::VectorXd& r) const {
  const int n = mass_.n_particles();
  if (r.size() != nu_ * n) throw std::invalid_argument("position size mismatch");
  Eigen::VectorXd x(dim());
  for (int c = 0; c < nu_; ++c) {
    Eigen::VectorXd rc(n);
    for (int p = 0; p < n; ++p) rc(p) = r(p * nu_ + c);
    Eigen::VectorXd xc = to_coords_ * rc;
    for (int i = 0; i < n - 1; ++i) x(i * nu_ + c) = xc(i);
  }
  return x;
}

std::string JacobiFrame::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"weights\":[";
  for (int i = 0; i < weights_.size(); ++i)
    out << (i ? "," : "") << weights_(i);
  out << "],\"matrix\":[";
  for (int i = 0; i < to_coords_.rows(); ++i)
    for (int j = 0; j < to_coords_.cols(); ++j)
      out << ((i + j) ? "," : "") << to_coords_(i, j);
  out << "]}";
  return out.str();
}

double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
             const JacobiFrame& frame) {
  if (x.size() != frame.dim() || y.size() != frame.dim())
    throw std::invalid_argument("inner: dimension mismatch");
  double s = 0;
  const int nu = frame.nu();
  for (int i = 0; i < frame.n_coords(); ++i) {
    double dot = 0;
    for (int c = 0; c < nu; ++c) dot += x(i * nu + c) * y(i * nu + c);
    s += frame.weights()(i) * dot;
  }
  return s;
}

double norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame) {
  return inner(x, x, frame);
}

namespace {

double partial_norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame,
                       int begin, int end) {
  double s = 0;
  const int nu = frame.nu();
  for (int i = begin; i < end; ++i) {
    double dot = 0;
    for (int c = 0; c < nu; ++c) dot += x(i * nu + c) * x(i * nu + c);
    s += frame.weights()(i) * dot;
  }
  return s;
}

// Coordinate-row range [begin, end) of the intra chain of a block.
std::pair<int, int> block_coord_range(const JacobiFrame& frame, int block) {
  int begin = frame.decomposition().size() - 1;
  for (int l = 0; l < block; ++l)
    begin += static_cast<int>(frame.decomposition().block(l).size()) - 1;
  int count = static_cast<int>(frame.decomposition().block(block).size()) - 1;
  return {begin, begin + count};
}

}  // namespace

double intercluster_norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame) {
  return partial_norm_sq(x, frame, 0, frame.n_intercluster());
}

double internal_norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame) {
  return partial_norm_sq(x, frame, frame.n_intercluster(), frame.n_coords());
}

double link_norm_sq(const Eigen::VectorXd& x, const JacobiFrame& frame,
                    const InterclusterLink& link) {
  Eigen::VectorXd r = frame.to_positions(x);
  Eigen::RowVectorXd row = frame.link_row(link);
  const int nu = frame.nu();
  double sq = 0;
  for (int c = 0; c < nu; ++c) {
    double z = 0;
    for (int p = 0; p < frame.mass().n_particles(); ++p)
      z += row(p) * r(p * nu + c);
    sq += z * z;
  }
  return frame.link_weight(link) * sq;
}

Eigen::MatrixXd change_frame(const JacobiFrame& f1, const JacobiFrame& f2) {
  if (f1.mass().masses != f2.mass().masses || f1.nu() != f2.nu())
    throw std::invalid_argument("change_frame: incompatible frames");
  Eigen::MatrixXd u_scalar = f2.coord_map() * f1.position_map();
  const int nu = f1.nu();
  const int n = f1.n_coords();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(nu * n, nu * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < nu; ++c) u(i * nu + c, j * nu + c) = u_scalar(i, j);
  return u;
}

Eigen::RowVectorXd pair_coordinate(const PairIndex& alpha,
                                   const JacobiFrame& frame) {
  const int n = frame.mass().n_particles();
  if (alpha.j > n) throw std::invalid_argument("pair index out of range");
  Eigen::RowVectorXd diff = Eigen::RowVectorXd::Zero(n);
  diff(alpha.i - 1) = 1.0;
  diff(alpha.j - 1) = -1.0;
  return diff * frame.position_map();
}

Eigen::VectorXd pair_vector(const PairIndex& alpha, const Eigen::VectorXd& x,
                            const JacobiFrame& frame) {
  Eigen::RowVectorXd row = pair_coordinate(alpha, frame);
  const int nu = frame.nu();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(nu);
  for (int c = 0; c < nu; ++c)
    for (int i = 0; i < frame.n_coords(); ++i) v(c) += row(i) * x(i * nu + c);
  return v;
}

double pair_norm_sq(const PairIndex& alpha, const Eigen::VectorXd& x,
                    const JacobiFrame& frame) {
  const auto& b = frame.decomposition();
  int bi = b.block_of(alpha.i), bj = b.block_of(alpha.j);
  if (bi == bj) {
    Eigen::VectorXd v = pair_vector(alpha, x, frame);
    double mu = reduced(frame.mass().masses[alpha.i - 1],
                        frame.mass().masses[alpha.j - 1]);
    return mu * v.squaredNorm();
  }
  InterclusterLink link{0, std::min(bi, bj), std::max(bi, bj)};
  double s = link_norm_sq(x, frame, link);
  for (int blk : {bi, bj}) {
    auto [beg, end] = block_coord_range(frame, blk);
    s += partial_norm_sq(x, frame, beg, end);
  }
  return s;
}

std::array<double, 3> norm_split(const Eigen::VectorXd& x,
                                 const JacobiFrame& frame_b,
                                 const JacobiFrame& frame_c) {
  const auto& b = frame_b.decomposition();
  const auto& c = frame_c.decomposition();
  if (c.size() != b.size() + 1 || !is_refinement(c, b))
    throw std::invalid_argument("norm_split: c must split one block of b");

  // Locate the two blocks of c that partition the split block of b.
  int first = -1, second = -1;
  for (int l = 0; l < c.size(); ++l) {
    int host = b.block_of(c.block(l).front());
    if (b.block(host).size() != c.block(l).size()) {
      if (first < 0)
        first = l;
      else
        second = l;
    }
  }
  InterclusterLink split_link{0, first, second};

  Eigen::VectorXd r = frame_b.to_positions(x);
  Eigen::VectorXd xc = frame_c.from_positions(r);
  return {intercluster_norm_sq(x, frame_b), link_norm_sq(xc, frame_c, split_link),
          internal_norm_sq(xc, frame_c)};
}

}  // namespace scatgeo
