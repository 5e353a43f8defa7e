#include <doctest.h>

#include <cmath>
#include <complex>

#include "scatgeo/grid.hpp"

using namespace scatgeo;

namespace {
Propagator make_pair_propagator(PotentialKind kind, double c, double extent,
                                int points) {
  MassSpec mass({2.0, 2.0});  // reduced mass 1
  ClusterDecomposition pair({{1, 2}}, 2);
  JacobiFrame frame(mass, pair, 1);
  PairPotential v{PairIndex(1, 2), kind, c, 0.5};
  PotentialSpec pot;
  if (kind != PotentialKind::zero) pot.entries.push_back(v);
  return Propagator(GridSpec(1, extent, points), HamiltonianSpec{frame, pot});
}
}  // namespace

TEST_CASE("grid spec validation and tables") {
  CHECK_THROWS(GridSpec(1, 10.0, 100));  // not a power of two
  CHECK_THROWS(GridSpec(1, 10.0, 8));    // too small
  CHECK_THROWS(GridSpec(3, 10.0, 64));   // unsupported dimension
  CHECK_THROWS(GridSpec(1, -1.0, 64));
  GridSpec s(1, 10.0, 64);
  CHECK(s.total() == 64);
  CHECK(s.axis().front() == doctest::Approx(-10.0));
  CHECK(s.spacing() == doctest::Approx(20.0 / 64));
  auto freq = s.frequencies();
  CHECK(freq[0] == doctest::Approx(0.0));
  CHECK(freq[1] == doctest::Approx(M_PI / 10.0));
}

TEST_CASE("gaussian states are normalized with the requested variance") {
  GridSpec s(1, 20.0, 1024);
  GridState psi = make_gaussian(s, {1.5}, {2.0}, {0.7});
  CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
  double h = s.spacing();
  auto ax = s.axis();
  double mean = 0, var = 0;
  for (int i = 0; i < s.points; ++i) mean += ax[i] * std::norm(psi.values[i]) * h;
  for (int i = 0; i < s.points; ++i)
    var += (ax[i] - mean) * (ax[i] - mean) * std::norm(psi.values[i]) * h;
  CHECK(mean == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(var == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("free evolution spreads a gaussian exactly") {
  auto prop = make_pair_propagator(PotentialKind::zero, 0.0, 20.0, 1024);
  GridState psi = make_gaussian(prop.spec(), {0.0}, {1.0}, {0.0});
  double t = 0.5;
  prop.propagate(psi, 0.01, 50);
  double h = prop.spec().spacing();
  auto ax = prop.spec().axis();
  double var = 0;
  for (int i = 0; i < prop.spec().points; ++i)
    var += ax[i] * ax[i] * std::norm(psi.values[i]) * h;
  CHECK(var == doctest::Approx(1.0 + t * t / 4.0).epsilon(1e-8));
}

TEST_CASE("propagation is reversible and norm preserving") {
  auto prop = make_pair_propagator(PotentialKind::poschl_teller, -1.0, 20.0, 512);
  GridState psi = make_gaussian(prop.spec(), {2.0}, {1.0}, {0.5});
  GridState orig = psi;
  prop.propagate(psi, 0.01, 100);
  CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
  prop.propagate(psi, -0.01, 100);
  double diff = 0;
  for (std::size_t i = 0; i < psi.values.size(); ++i)
    diff += std::norm(psi.values[i] - orig.values[i]);
  CHECK(diff * prop.spec().spacing() < 1e-20);
}

TEST_CASE("hamiltonian application is hermitian and consistent with energy") {
  auto prop = make_pair_propagator(PotentialKind::poschl_teller, -1.0, 20.0, 512);
  GridState psi = make_gaussian(prop.spec(), {1.0}, {1.5}, {0.3});
  GridState hpsi = prop.apply_hamiltonian(psi);
  std::complex<double> ip = overlap(psi, hpsi);
  CHECK(std::abs(ip.imag()) < 1e-10);
  CHECK(ip.real() == doctest::Approx(prop.energy(psi)).epsilon(1e-10));
}

TEST_CASE("potential splits into cluster and intercluster parts") {
  MassSpec mass({2.0, 2.0, 2.0});
  ClusterDecomposition b({{1, 2}, {3}}, 3);
  JacobiFrame frame(mass, b, 1);
  PotentialSpec pot;
  pot.entries.push_back({PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5});
  pot.entries.push_back({PairIndex(1, 3), PotentialKind::long_range_power, 0.5, 0.8});
  Propagator prop(GridSpec(2, 10.0, 32), HamiltonianSpec{frame, pot});
  auto full = prop.potential_grid(PotentialTerm::full);
  auto cluster = prop.potential_grid(PotentialTerm::cluster, &b);
  auto inter = prop.potential_grid(PotentialTerm::intercluster, &b);
  for (std::size_t i = 0; i < full.size(); ++i)
    CHECK(full[i] == doctest::Approx(cluster[i] + inter[i]).epsilon(1e-12));
}

TEST_CASE("poschl-teller ground state from dense and imaginary-time routes") {
  PairSubsystem sub{1.0, {PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5}, 1.0};
  GridSpec s(1, 20.0, 512);
  auto states = solve_bound_states(sub, s, 4);
  REQUIRE(!states.empty());
  CHECK(states[0].energy == doctest::Approx(-0.5).epsilon(1e-7));
  double norm = 0;
  for (double v : states[0].wavefunction) norm += v * v;
  CHECK(norm * s.spacing() == doctest::Approx(1.0).epsilon(1e-10));
  double e_imag = imaginary_time_ground_energy(sub, s, 0.01, 4000);
  CHECK(std::abs(e_imag - states[0].energy) < 1e-6);
}

TEST_CASE("three-body threshold set") {
  MassSpec mass({2.0, 2.0, 2.0});
  PotentialSpec pot;
  pot.entries.push_back({PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5});
  auto t = thresholds(mass, pot, GridSpec(1, 20.0, 512));
  REQUIRE(t.size() >= 2);
  CHECK(std::abs(t.front() + 0.5) < 1e-6);
  CHECK(std::abs(t.back()) < 1e-12);
}

TEST_CASE("pair potential evaluation") {
  PairPotential lr{PairIndex(1, 2), PotentialKind::long_range_power, 2.0, 0.8};
  CHECK(lr.evaluate(0.0) == doctest::Approx(2.0));
  CHECK(lr.evaluate(3.0) == doctest::Approx(2.0 * std::pow(10.0, -0.4)));
  PairPotential pt{PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5};
  CHECK(pt.evaluate(0.0) == doctest::Approx(-1.0));
  double c2 = std::cosh(2.0);
  CHECK(pt.evaluate(2.0) == doctest::Approx(-1.0 / (c2 * c2)));
  PairPotential z{PairIndex(1, 2), PotentialKind::zero, 0.0, 0.5};
  CHECK(z.evaluate(5.0) == 0.0);
}
