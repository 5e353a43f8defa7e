#include "scatgeo/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace scatgeo {

double PartitionConstants::r0() const {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 2; j <= n - 1; ++j) m = std::min(m, rho_j(j) / theta_j(j));
  return m;
}

std::string PartitionConstants::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"n\":" << n << ",\"theta\":[";
  for (size_t i = 0; i < theta.size(); ++i) out << (i ? "," : "") << theta[i];
  out << "],\"rho\":[";
  for (size_t i = 0; i < rho.size(); ++i) out << (i ? "," : "") << rho[i];
  out << "],\"gamma\":" << gamma << ",\"sigma\":" << sigma << "}";
  return out.str();
}

PartitionConstants select_constants(int n) {
  if (n < 2 || n > 6)
    throw std::invalid_argument("select_constants: N must be in [2,6]");
  PartitionConstants c;
  c.n = n;
  c.gamma = 1.1;
  c.theta.resize(n - 1);
  c.rho.resize(n - 1);
  c.theta[0] = 1.0;
  for (int j = 2; j <= n - 1; ++j) {
    c.rho[j - 2] = 0.5 * c.theta[j - 2];
    c.theta[j - 1] = c.theta[j - 2] / 200.0;
  }
  c.rho[n - 2] = (n == 2) ? 0.5 : c.theta[n - 2] / 2.0;

  double bound = (1.0 - 1.0 / c.gamma) * c.rho_j(n);
  for (int j = 2; j <= n - 1; ++j) {
    bound = std::min(bound, (1.0 - 1.0 / c.gamma) * c.rho_j(j));
    bound = std::min(bound, (c.gamma - 1.0) * c.theta_j(j));
  }
  c.sigma = 0.9 * bound;

  auto report = verify_constants(c, n);
  if (!report.all_pass)
    throw std::runtime_error("select_constants: generated constants invalid");
  return c;
}

ConstantsReport verify_constants(const PartitionConstants& c, int n) {
  ConstantsReport rep;
  auto check = [&](const std::string& name, double slack) {
    bool pass = slack > 0;
    rep.items.push_back({name, pass, slack});
    rep.all_pass = rep.all_pass && pass;
  };

  check("theta_1 <= 1", 1.0 - c.theta_j(1) + 1e-300);
  check("rho_N > 0", c.rho_j(n));
  check("sigma > 0", c.sigma);
  check("gamma > 1", c.gamma - 1.0);
  for (int j = 2; j <= n - 1; ++j) {
    check("theta_1 > rho_" + std::to_string(j), c.theta_j(1) - c.rho_j(j));
    check("rho_" + std::to_string(j) + " > theta_" + std::to_string(j),
          c.rho_j(j) - c.theta_j(j));
    check("theta_" + std::to_string(j) + " > rho_N",
          c.theta_j(j) - c.rho_j(n));
    check("theta_" + std::to_string(j - 1) + " >= theta_" + std::to_string(j) +
              " + rho_" + std::to_string(j),
          c.theta_j(j - 1) - c.theta_j(j) - c.rho_j(j) + 1e-300);
  }
  if (n == 2) check("theta_1 > rho_2", c.theta_j(1) - c.rho_j(2));

  double g1 = c.gamma1_prime();
  if (n >= 3) {
    check("gamma'_1 < 2", 2.0 - g1);
    double r0 = c.r0();
    check("gamma(1+gamma) < r_0", r0 - c.gamma * (1.0 + c.gamma));
    check("2 gamma'_1 gamma'_2 / (2 - gamma'_1) < r_0",
          r0 - 2.0 * g1 * c.gamma2_prime() / (2.0 - g1));
  }

  double bound = (1.0 - 1.0 / c.gamma) * c.rho_j(n);
  for (int j = 2; j <= n - 1; ++j) {
    bound = std::min(bound, (1.0 - 1.0 / c.gamma) * c.rho_j(j));
    bound = std::min(bound, (c.gamma - 1.0) * c.theta_j(j));
  }
  check("sigma below its bound", bound - c.sigma);
  return rep;
}

PhasePartition::PhasePartition(MassSpec mass, int nu,
                               PartitionConstants constants)
    : mass_(std::move(mass)), nu_(nu), constants_(std::move(constants)) {
  const int n = mass_.n_particles();
  if (constants_.n != n)
    throw std::invalid_argument("constants built for a different N");
  for (auto& d : enumerate_decompositions(n))
    if (d.size() >= 2) decomps_.push_back(d);
  by_size_.resize(n + 1);
  for (size_t i = 0; i < decomps_.size(); ++i) {
    frames_.emplace_back(mass_, decomps_[i], nu_);
    links_.push_back(intercluster_links(decomps_[i]));
    by_size_[decomps_[i].size()].push_back(static_cast<int>(i));
  }
  refines_.assign(decomps_.size(),
                  std::vector<char>(decomps_.size(), 0));
  for (size_t i = 0; i < decomps_.size(); ++i)
    for (size_t j = 0; j < decomps_.size(); ++j)
      refines_[i][j] = is_refinement(decomps_[i], decomps_[j]);
}

double PhasePartition::config_norm_sq(const Eigen::VectorXd& r) const {
  return norm_sq(frames_[0].from_positions(r), frames_[0]);
}

bool PhasePartition::in_region(const Eigen::VectorXd& r, int b_index,
                               RegionKind kind, double rho_p,
                               double theta_p) const {
  const auto& frame = frames_[b_index];
  double xsq = config_norm_sq(r);
  switch (kind) {
    case RegionKind::S:
      return xsq >= 1.0;
    case RegionKind::STheta:
      return xsq >= 1.0 && xsq <= 1.0 + theta_p;
    case RegionKind::T:
    case RegionKind::TTilde: {
      bool relative = (kind == RegionKind::T);
      double scale = relative ? xsq : 1.0;
      Eigen::VectorXd x = frame.from_positions(r);
      for (const auto& link : links_[b_index])
        if (!(link_norm_sq(x, frame, link) > rho_p * scale)) return false;
      // For |b| = N the intercluster part is all of x and the size
      // condition holds for any positive theta.
      if (frame.n_intercluster() * nu_ == frame.dim()) return true;
      return intercluster_norm_sq(x, frame) > (1.0 - theta_p) * scale;
    }
  }
  return false;
}

double PhasePartition::varphi(int b_index, const Eigen::VectorXd& r) const {
  const auto& frame = frames_[b_index];
  const int size = decomps_[b_index].size();
  const double rho_b = constants_.rho_j(size);
  const double theta_b = constants_.theta_j(size);
  Eigen::VectorXd x = frame.from_positions(r);
  double prod = 1.0;
  for (const auto& link : links_[b_index]) {
    prod *= phi_greater(link_norm_sq(x, frame, link),
                        CutoffSpec(constants_.sigma, rho_b));
    if (prod == 0.0) return 0.0;
  }
  prod *= phi_greater(intercluster_norm_sq(x, frame),
                      CutoffSpec(constants_.sigma, 1.0 - theta_b));
  return prod;
}

std::vector<double> PhasePartition::all_varphi(const Eigen::VectorXd& r) const {
  std::vector<double> phis(decomps_.size());
  for (size_t i = 0; i < decomps_.size(); ++i)
    phis[i] = varphi(static_cast<int>(i), r);
  return phis;
}

double PhasePartition::J_cached(int b_index,
                                const std::vector<double>& phis) const {
  const int k = decomps_[b_index].size();
  double value = phis[b_index];
  for (int j = k - 1; j >= 2 && value != 0.0; --j) {
    double level_sum = 0;
    for (int idx : by_size_[j]) level_sum += phis[idx];
    value *= (1.0 - level_sum);
  }
  return value;
}

double PhasePartition::J(int b_index, const Eigen::VectorXd& r) const {
  return J_cached(b_index, all_varphi(r));
}

double PhasePartition::J_restricted(int b_index, const Eigen::VectorXd& r) const {
  const int k = decomps_[b_index].size();
  double value = varphi(b_index, r);
  for (int j = k - 1; j >= 2 && value != 0.0; --j) {
    double level_sum = 0;
    for (int idx : by_size_[j])
      if (refines_[b_index][idx] && idx != b_index)
        level_sum += varphi(idx, r);
    value *= (1.0 - level_sum);
  }
  return value;
}

double PhasePartition::sum_J(const Eigen::VectorXd& r) const {
  double s = 0;
  for (size_t i = 0; i < decomps_.size(); ++i) s += J(static_cast<int>(i), r);
  return s;
}

namespace {

// Uniform direction in the reference-frame mass metric, scaled to |x| = rad.
Eigen::VectorXd sample_config(std::mt19937_64& rng, const PhasePartition& pp,
                              double rad_sq) {
  const auto& frame = pp.frame(0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x(frame.dim());
  for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
  x *= std::sqrt(rad_sq / norm_sq(x, frame));
  return frame.to_positions(x);
}

}  // namespace

PartitionReport verify_partition(const MassSpec& mass, int nu,
                                 const PartitionConstants& constants,
                                 int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  PhasePartition pp(mass, nu, constants);
  const int n = mass.n_particles();
  PartitionReport rep;
  rep.constants = constants;
  rep.n = n;
  rep.nu = nu;
  rep.seed = seed;
  rep.shell_samples = samples;
  rep.covering_samples = samples;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double theta_shell = constants.theta_j(n - 1);
  const int n_b = static_cast<int>(pp.decompositions().size());

  // Precompute pairs for the support property and the lemma pair list.
  auto pairs = all_pairs(n);

  auto check_shell_point = [&](const Eigen::VectorXd& r) {
    double xsq = pp.config_norm_sq(r);
    auto phis = pp.all_varphi(r);
    // Partition identity and restricted-form equivalence.
    double sum = 0;
    for (int b = 0; b < n_b; ++b) {
      double jb = pp.J_cached(b, phis);
      sum += jb;
      rep.max_restricted_mismatch = std::max(
          rep.max_restricted_mismatch, std::abs(jb - pp.J_restricted(b, r)));
      // Support property (3.25): every pair not inside b stays far.
      if (jb > 1e-12) {
        const auto& frame = pp.frame(b);
        Eigen::VectorXd x = frame.from_positions(r);
        double rho_b = constants.rho_j(pp.decompositions()[b].size());
        for (const auto& alpha : pairs) {
          if (pair_leq(alpha, pp.decompositions()[b])) continue;
          if (!(pair_norm_sq(alpha, x, frame) > rho_b * xsq / 2.0))
            ++rep.support_violations;
        }
      }
    }
    rep.max_identity_deviation =
        std::max(rep.max_identity_deviation, std::abs(sum - 1.0));
  };

  auto check_lemma_point = [&](const Eigen::VectorXd& r) {
    // Covering (3.5).
    bool covered = false;
    for (int b = 0; b < n_b && !covered; ++b) {
      int sz = pp.decompositions()[b].size();
      covered = pp.in_region(r, b, RegionKind::T, constants.rho_j(sz),
                             constants.theta_j(sz));
    }
    if (!covered) ++rep.covering_violations;
    // Disjointness (3.7) with gamma_1 = gamma_2 = gamma, and (3.11) with
    // the primed constants.
    double g = constants.gamma;
    double g1p = constants.gamma1_prime();
    double g2p = constants.gamma2_prime();
    for (int b = 0; b < n_b; ++b) {
      int sb = pp.decompositions()[b].size();
      for (int c = 0; c < n_b; ++c) {
        if (b == c) continue;
        int sc = pp.decompositions()[c].size();
        if (sb < sc) continue;
        if (is_refinement(pp.decompositions()[b], pp.decompositions()[c]))
          continue;
        if (pp.in_region(r, b, RegionKind::T, constants.rho_j(sb) / g,
                         g * constants.theta_j(sb)) &&
            pp.in_region(r, c, RegionKind::T, constants.rho_j(sc) / g,
                         g * constants.theta_j(sc)))
          ++rep.disjointness_violations;
        if (pp.in_region(r, b, RegionKind::T, constants.rho_j(sb) / g1p,
                         g2p * constants.theta_j(sb)) &&
            pp.in_region(r, c, RegionKind::T, constants.rho_j(sc) / g1p,
                         g2p * constants.theta_j(sc)))
          ++rep.disjointness_violations;
      }
    }
  };

  // Shell sampling: uniform draws plus adversarial draws that place one
  // cutoff argument within +-2 sigma of its threshold.
  for (int s = 0; s < samples; ++s) {
    double rad_sq = 1.0 + theta_shell * unif(rng);
    Eigen::VectorXd r = sample_config(rng, pp, rad_sq);
    if (s % 2 == 1 && n >= 3) {
      int b = static_cast<int>(unif(rng) * n_b) % n_b;
      const auto& frame = pp.frame(b);
      const auto& decomp = pp.decompositions()[b];
      Eigen::VectorXd x = frame.from_positions(r);
      double inter = intercluster_norm_sq(x, frame);
      double intra = norm_sq(x, frame) - inter;
      double rho_b = constants.rho_j(decomp.size());
      double target =
          std::max(1e-12, rho_b + (2.0 * unif(rng) - 1.0) * 2.0 * constants.sigma);
      // Scale the intercluster part so a random link lands near its
      // threshold, then restore the shell radius with the internal part.
      auto links = intercluster_links(decomp);
      const auto& link = links[static_cast<size_t>(unif(rng) * links.size()) %
                               links.size()];
      double zsq = link_norm_sq(x, frame, link);
      if (zsq > 0 && intra > 0) {
        double lambda = std::sqrt(target / zsq);
        double new_intra = rad_sq - lambda * lambda * inter;
        if (new_intra > 0) {
          double mu = std::sqrt(new_intra / intra);
          const int nb = frame.n_intercluster() * nu;
          for (int i = 0; i < x.size(); ++i) x(i) *= (i < nb) ? lambda : mu;
          r = frame.to_positions(x);
        }
      }
    }
    check_shell_point(r);
  }

  // Covering / disjointness sampling over |x|^2 >= 1.
  for (int s = 0; s < samples; ++s) {
    double rad_sq = 1.0 + 3.0 * unif(rng);
    check_lemma_point(sample_config(rng, pp, rad_sq));
  }

  // Locality (3.23): redraw the internal part at fixed x_b and fixed |x|.
  {
    std::normal_distribution<double> gauss(0.0, 1.0);
    int probes = std::min(samples, 1000);
    for (int s = 0; s < probes; ++s) {
      double rad_sq = 1.0 + theta_shell * unif(rng);
      for (int b = 0; b < n_b; ++b) {
        const auto& frame = pp.frame(b);
        const int nb = frame.n_intercluster() * nu;
        if (nb == frame.dim()) continue;  // |b| = N: no internal part
        Eigen::VectorXd x = frame.from_positions(sample_config(rng, pp, rad_sq));
        double intra = norm_sq(x, frame) - intercluster_norm_sq(x, frame);
        if (intra <= 0) continue;
        Eigen::VectorXd x2 = x;
        for (int i = nb; i < x.size(); ++i) x2(i) = gauss(rng);
        double intra2 =
            norm_sq(x2, frame) - intercluster_norm_sq(x2, frame);
        for (int i = nb; i < x.size(); ++i)
          x2(i) *= std::sqrt(intra / intra2);
        double d = std::abs(pp.J(b, frame.to_positions(x)) -
                            pp.J(b, frame.to_positions(x2)));
        rep.max_locality_change = std::max(rep.max_locality_change, d);
      }
    }
  }

  // Gradient of J_b in x_b by central differences at two step sizes.
  {
    int probes = std::min(samples, 200);
    for (int s = 0; s < probes; ++s) {
      double rad_sq = 1.0 + theta_shell * unif(rng);
      Eigen::VectorXd r = sample_config(rng, pp, rad_sq);
      for (int b = 0; b < n_b; ++b) {
        const auto& frame = pp.frame(b);
        Eigen::VectorXd x = frame.from_positions(r);
        const int nb = frame.n_intercluster() * nu;
        for (double h : {1e-5, 5e-6}) {
          double grad_sq = 0;
          for (int i = 0; i < nb; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            double g = (pp.J(b, frame.to_positions(xp)) -
                        pp.J(b, frame.to_positions(xm))) /
                       (2 * h);
            grad_sq += g * g;
          }
          double& slot =
              (h == 1e-5) ? rep.max_gradient : rep.max_gradient_half_step;
          slot = std::max(slot, std::sqrt(grad_sq));
        }
      }
    }
  }

  return rep;
}

std::string PartitionReport::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"constants\":" << constants.to_json() << ",\"n\":" << n
      << ",\"nu\":" << nu << ",\"seed\":" << seed
      << ",\"shell_samples\":" << shell_samples
      << ",\"covering_samples\":" << covering_samples
      << ",\"max_identity_deviation\":" << max_identity_deviation
      << ",\"max_restricted_mismatch\":" << max_restricted_mismatch
      << ",\"max_locality_change\":" << max_locality_change
      << ",\"violations\":{\"support\":" << support_violations
      << ",\"covering\":" << covering_violations
      << ",\"disjointness\":" << disjointness_violations
      << "},\"max_gradient\":" << max_gradient
      << ",\"max_gradient_half_step\":" << max_gradient_half_step << "}";
  return out.str();
}

}  // namespace scatgeo
