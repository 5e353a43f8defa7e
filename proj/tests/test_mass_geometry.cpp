#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "scatgeo/clusters.hpp"
#include "scatgeo/mass_geometry.hpp"

using namespace scatgeo;

namespace {
MassSpec random_masses(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  std::vector<double> m(n);
  for (auto& v : m) v = u(rng);
  return MassSpec(m);
}

Eigen::VectorXd random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = g(rng);
  return x;
}

// Direct mass-metric norm on COM-zero particle positions.
double position_norm_sq(const Eigen::VectorXd& r, const MassSpec& mass,
                        int nu) {
  double s = 0;
  for (int i = 0; i < mass.n_particles(); ++i)
    for (int c = 0; c < nu; ++c) s += mass.masses[i] * r[i * nu + c] * r[i * nu + c];
  return s;
}
}  // namespace

TEST_CASE("frame norm agrees with the particle-position mass metric") {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 5; ++n) {
    auto mass = random_masses(n, 100 + n);
    for (int nu : {1, 2}) {
      for (const auto& b : enumerate_decompositions(n)) {
        JacobiFrame f(mass, b, nu);
        for (int trial = 0; trial < 5; ++trial) {
          Eigen::VectorXd x = random_vector(f.dim(), rng);
          Eigen::VectorXd r = f.to_positions(x);
          CHECK(norm_sq(x, f) ==
                doctest::Approx(position_norm_sq(r, mass, nu)).epsilon(1e-12));
          // Round trip through positions.
          CHECK((f.from_positions(r) - x).norm() < 1e-10);
          // Intercluster + internal split is exhaustive.
          CHECK(intercluster_norm_sq(x, f) + internal_norm_sq(x, f) ==
                doctest::Approx(norm_sq(x, f)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("frame changes are mass-metric orthogonal") {
  std::mt19937_64 rng(22);
  auto mass = random_masses(5, 7);
  auto decs = enumerate_decompositions(5);
  std::vector<JacobiFrame> frames;
  for (const auto& b : decs) frames.emplace_back(mass, b, 1);
  for (std::size_t i = 0; i < frames.size(); i += 5) {
    for (std::size_t j = 0; j < frames.size(); j += 7) {
      Eigen::MatrixXd u = change_frame(frames[i], frames[j]);
      for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x = random_vector(frames[i].dim(), rng);
        double a = norm_sq(x, frames[i]);
        double b = norm_sq(u * x, frames[j]);
        CHECK(std::abs(a - b) <= 1e-12 * a);
      }
    }
  }
}

TEST_CASE("pair vectors and pair norms") {
  std::mt19937_64 rng(33);
  auto mass = random_masses(4, 5);
  for (const auto& b : enumerate_decompositions(4)) {
    JacobiFrame f(mass, b, 1);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd x = random_vector(f.dim(), rng);
      Eigen::VectorXd r = f.to_positions(x);
      for (const auto& p : all_pairs(4)) {
        double direct = r[p.i - 1] - r[p.j - 1];
        CHECK(pair_vector(p, x, f)[0] == doctest::Approx(direct).epsilon(1e-10));
        CHECK(pair_coordinate(p, f).dot(x) ==
              doctest::Approx(direct).epsilon(1e-10));
        if (pair_leq(p, b)) {
          double mi = mass.masses[p.i - 1], mj = mass.masses[p.j - 1];
          double mu = mi * mj / (mi + mj);
          CHECK(pair_norm_sq(p, x, f) ==
                doctest::Approx(mu * direct * direct).epsilon(1e-10));
        } else {
          // Crossing pairs: at least the link contribution.
          for (const auto& link : intercluster_links(b)) {
            bool crosses = (b.block_of(p.i) == link.from_block &&
                            b.block_of(p.j) == link.to_block) ||
                           (b.block_of(p.j) == link.from_block &&
                            b.block_of(p.i) == link.to_block);
            if (crosses)
              CHECK(pair_norm_sq(p, x, f) >=
                    link_norm_sq(x, f, link) - 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("norm split for immediate refinements") {
  std::mt19937_64 rng(44);
  auto mass = random_masses(5, 9);
  auto decs = enumerate_decompositions(5);
  for (const auto& b : decs) {
    if (b.size() == 5) continue;
    JacobiFrame fb(mass, b, 1);
    for (const auto& c : decs) {
      if (c.size() != b.size() + 1 || !is_refinement(c, b)) continue;
      JacobiFrame fc(mass, c, 1);
      for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd x = random_vector(fb.dim(), rng);
        auto [inter, link, internal] = norm_split(x, fb, fc);
        double total = norm_sq(x, fb);
        CHECK(inter + link + internal == doctest::Approx(total).epsilon(1e-12));
        CHECK(inter == doctest::Approx(intercluster_norm_sq(x, fb)).epsilon(1e-12));
        CHECK(inter >= -1e-14);
        CHECK(link >= -1e-14);
        CHECK(internal >= -1e-14);
      }
    }
  }
}

TEST_CASE("mass spec validation") {
  CHECK_THROWS(MassSpec({1.0, -1.0}));
  CHECK_THROWS(MassSpec({}));
  MassSpec m({2.0, 3.0});
  CHECK(m.total_mass() == doctest::Approx(5.0));
}
