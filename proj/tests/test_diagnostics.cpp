#include <doctest.h>

#include <cmath>
#include <complex>

#include "scatgeo/diagnostics.hpp"

using namespace scatgeo;

namespace {
Propagator free_pair_propagator(double extent, int points) {
  MassSpec mass({2.0, 2.0});
  JacobiFrame frame(mass, ClusterDecomposition({{1, 2}}, 2), 1);
  return Propagator(GridSpec(1, extent, points), HamiltonianSpec{frame, {}});
}

Propagator three_body_propagator(double extent, int points) {
  MassSpec mass({2.0, 2.0, 2.0});
  JacobiFrame frame(mass, ClusterDecomposition({{1, 2}, {3}}, 3), 1);
  PotentialSpec pot;
  pot.entries.push_back(
      {PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5});
  return Propagator(GridSpec(2, extent, points), HamiltonianSpec{frame, pot});
}
}  // namespace

TEST_CASE("region masks are bounded and sharpen when unmollified") {
  auto prop = free_pair_propagator(40.0, 256);
  RegionParams p{ClusterDecomposition({{1}, {2}}, 2)};
  p.mollify_spacings = 5.0;
  auto smooth = region_mask(prop, p, 8.0);
  p.mollify_spacings = 0.0;
  auto sharp = region_mask(prop, p, 8.0);
  bool some_inside = false, some_outside = false;
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    CHECK(smooth[i] >= 0.0);
    CHECK(smooth[i] <= 1.0);
    CHECK((sharp[i] == 0.0 || sharp[i] == 1.0));
    if (sharp[i] == 1.0) some_inside = true;
    if (sharp[i] == 0.0) some_outside = true;
  }
  CHECK(some_inside);
  CHECK(some_outside);
}

TEST_CASE("a free outgoing packet fills its free-channel region") {
  auto prop = free_pair_propagator(60.0, 1024);
  GridState psi = make_gaussian(prop.spec(), {1.0}, {1.0}, {2.0});
  RegionParams p{ClusterDecomposition({{1}, {2}}, 2)};
  auto series = deficit_series(psi, prop, p, {4.0, 8.0, 16.0}, 0.01);
  REQUIRE(series.times.size() == 3);
  CHECK(series.occupation.back() > 0.95);
  CHECK(series.deficit.back() < 0.25);
  CHECK(series.occupation.back() >= series.occupation.front() - 1e-3);
  CHECK_THROWS(deficit_series(psi, prop, p, {0.015}, 0.01));  // off-grid time
}

TEST_CASE("energy filter extracts a bound component") {
  auto prop = free_pair_propagator(20.0, 512);
  // Reuse the grid but with the interacting pair Hamiltonian.
  MassSpec mass({2.0, 2.0});
  JacobiFrame frame(mass, ClusterDecomposition({{1, 2}}, 2), 1);
  PotentialSpec pot;
  pot.entries.push_back(
      {PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5});
  Propagator pt(GridSpec(1, 20.0, 512), HamiltonianSpec{frame, pot});

  PairSubsystem sub{1.0, pot.entries[0], 1.0};
  auto bound = solve_bound_states(sub, pt.spec(), 1);
  REQUIRE(!bound.empty());

  GridState ground(pt.spec());
  for (int i = 0; i < pt.spec().points; ++i)
    ground.values[i] = bound[0].wavefunction[i];
  GridState packet = make_gaussian(pt.spec(), {6.0}, {1.0}, {3.0});
  GridState mix(pt.spec());
  for (int i = 0; i < pt.spec().points; ++i)
    mix.values[i] = 0.8 * ground.values[i] + 0.6 * packet.values[i];

  EnergyWindow window{-0.7, -0.3, 0.05};
  GridState filtered = energy_filter(mix, pt, window, {0.0});
  double err = 0;
  for (int i = 0; i < pt.spec().points; ++i)
    err += std::norm(filtered.values[i] - 0.8 * ground.values[i]);
  err = std::sqrt(err * pt.spec().spacing());
  CHECK(err < 1e-2);

  // Windows touching a listed threshold are rejected.
  CHECK_THROWS(energy_filter(mix, pt, EnergyWindow{-0.2, 0.1, 0.05}, {0.0}));
  CHECK_THROWS(energy_filter(mix, pt, EnergyWindow{-0.6, -0.45, 0.05}, {-0.5}));
}

TEST_CASE("two-body channel decomposition finds the free channel") {
  auto prop = free_pair_propagator(60.0, 1024);
  GridState psi = make_gaussian(prop.spec(), {1.0}, {1.0}, {2.0});
  auto report = channel_decomposition(psi, prop, 0.25, 0.5, 1.0, 10.0, 0.01);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].b == ClusterDecomposition({{1}, {2}}, 2));
  CHECK(report.entries[0].occupation > 0.9 * report.norm_sq);
  CHECK(report.residual + report.overlap_mass < 0.1 * report.norm_sq);
}

TEST_CASE("channel states are normalized with the expected energy") {
  auto prop = three_body_propagator(20.0, 128);
  GridState psi = make_channel_state(prop, PairIndex(1, 2), 0, -8.0, 2.0, 1.0);
  CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-8));
  // E = E_bound + (k0^2 + Dk^2) hbar^2 / (2 M1), M1 = 4*2/6, k0 = M1 v.
  double m1 = 4.0 * 2.0 / 6.0;
  double k0 = m1 * 1.0;
  double expected = -0.5 + (k0 * k0 + 1.0 / (4.0 * 2.0 * 2.0)) / (2.0 * m1);
  CHECK(prop.energy(psi) == doctest::Approx(expected).epsilon(1e-2));
  CHECK_THROWS(make_channel_state(prop, PairIndex(1, 3), 0, -8.0, 2.0, 1.0));
}

TEST_CASE("velocity-position discrepancy shrinks for free motion") {
  auto prop = free_pair_propagator(60.0, 1024);
  GridState psi = make_gaussian(prop.spec(), {0.0}, {1.0}, {2.0});
  prop.propagate(psi, 0.01, 400);  // t = 4
  double early = velocity_position_discrepancy(psi, prop, 4.0, 0.5);
  prop.propagate(psi, 0.01, 1200);  // t = 16
  double late = velocity_position_discrepancy(psi, prop, 16.0, 0.5);
  CHECK(late < early);
  CHECK(late < 0.3);
}
