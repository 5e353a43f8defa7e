// Acceptance harness: runs the fifteen release criteria and prints one
// PASS/FAIL line for each.  Exit status is the number of failed criteria.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scatgeo/clusters.hpp"
#include "scatgeo/cutoffs.hpp"
#include "scatgeo/diagnostics.hpp"
#include "scatgeo/eikonal.hpp"
#include "scatgeo/grid.hpp"
#include "scatgeo/mass_geometry.hpp"
#include "scatgeo/partition.hpp"

using namespace scatgeo;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Harness {
  int failures = 0;

  void report(int index, const std::string& name, bool pass,
              const std::string& detail) {
    std::printf("%s  %2d: %s  [%s]\n", pass ? "PASS" : "FAIL", index,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

int main() {
  Harness h;

  // Criteria 1-5 share the sampled partition verification for N = 2, 3, 4.
  std::vector<PartitionReport> reports;
  double partition_elapsed = 0;
  {
    auto t0 = Clock::now();
    for (int n : {2, 3, 4})
      reports.push_back(
          verify_partition(MassSpec(std::vector<double>(n, 1.0)), 1,
                           select_constants(n), 10000, 42));
    partition_elapsed = seconds_since(t0);
  }

  {
    double dev = 0;
    for (const auto& r : reports)
      dev = std::max(dev, r.max_identity_deviation);
    h.report(1, "partition identity on the shell (N=2..4, 1e4 samples)",
             dev <= 1e-10 && partition_elapsed <= 60.0,
             "max deviation " + fmt(dev) + ", " + fmt(partition_elapsed) +
                 " s");
  }
  {
    int v = 0;
    for (const auto& r : reports) v += r.support_violations;
    h.report(2, "support of each partition term inside its region", v == 0,
             std::to_string(v) + " violations");
  }
  {
    int v = 0;
    for (const auto& r : reports) v += r.covering_violations;
    h.report(3, "nominal regions cover the outer shell", v == 0,
             std::to_string(v) + " uncovered samples");
  }
  {
    int v = 0;
    for (const auto& r : reports) v += r.disjointness_violations;
    h.report(4, "same-size regions with the tighter constants are disjoint",
             v == 0, std::to_string(v) + " violations");
  }
  {
    double loc = 0;
    for (const auto& r : reports) loc = std::max(loc, r.max_locality_change);
    h.report(5, "partition terms ignore internal coordinates on regions",
             loc <= 1e-10, "max change " + fmt(loc));
  }

  // 6: mass-metric orthogonality of frame changes and the norm splitting.
  {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> mdist(0.3, 3.0);
    std::normal_distribution<double> g;
    std::vector<double> masses(5);
    for (auto& m : masses) m = mdist(rng);
    MassSpec mass(masses);
    auto decs = enumerate_decompositions(5);
    std::vector<JacobiFrame> frames;
    for (const auto& b : decs) frames.emplace_back(mass, b, 1);
    double worst = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      for (std::size_t j = 0; j < frames.size(); ++j) {
        if (i == j) continue;
        Eigen::MatrixXd u = change_frame(frames[i], frames[j]);
        for (int trial = 0; trial < 100; ++trial) {
          Eigen::VectorXd x(frames[i].dim());
          for (int k = 0; k < x.size(); ++k) x[k] = g(rng);
          double a = norm_sq(x, frames[i]);
          double b = norm_sq(u * x, frames[j]);
          worst = std::max(worst, std::abs(a - b) / a);
        }
      }
    }
    double split_worst = 0;
    for (std::size_t bi = 0; bi < decs.size(); ++bi) {
      for (std::size_t ci = 0; ci < decs.size(); ++ci) {
        if (decs[ci].size() != decs[bi].size() + 1 ||
            !is_refinement(decs[ci], decs[bi]))
          continue;
        for (int trial = 0; trial < 20; ++trial) {
          Eigen::VectorXd x(frames[bi].dim());
          for (int k = 0; k < x.size(); ++k) x[k] = g(rng);
          auto parts = norm_split(x, frames[bi], frames[ci]);
          double total = norm_sq(x, frames[bi]);
          split_worst = std::max(
              split_worst,
              std::abs(parts[0] + parts[1] + parts[2] - total) / total);
        }
      }
    }
    bool pass = worst <= 1e-12 && split_worst <= 1e-12;
    h.report(6, "frame changes are isometries; norms split telescopically",
             pass,
             "orthogonality " + fmt(worst) + ", split " + fmt(split_worst));
  }

  // 7: enumeration counts against the Bell triangle.
  {
    std::vector<std::uint64_t> row{1};
    bool pass = true;
    std::string detail;
    for (int n = 1; n <= 8; ++n) {
      std::vector<std::uint64_t> next{row.back()};
      for (std::uint64_t v : row) next.push_back(next.back() + v);
      row = next;
      if (n < 2) continue;  // enumeration starts at two particles
      std::uint64_t expected = row.front();
      std::uint64_t got = enumerate_decompositions(n).size();
      if (got != expected) {
        pass = false;
        detail = "n=" + std::to_string(n) + ": " + std::to_string(got) +
                 " != " + std::to_string(expected);
      }
    }
    h.report(7, "decomposition counts match the Bell numbers (N<=8)", pass,
             pass ? "B_2..B_8 exact" : detail);
  }

  // 8: free gaussian spreading law on a large 1D grid.
  {
    auto t0 = Clock::now();
    MassSpec mass({2.0, 2.0});
    JacobiFrame frame(mass, ClusterDecomposition({{1, 2}}, 2), 1);
    Propagator prop(GridSpec(1, 40.0, 4096), HamiltonianSpec{frame, {}});
    GridState psi = make_gaussian(prop.spec(), {0.0}, {1.0}, {0.0});
    prop.propagate(psi, 0.01, 100);  // t = 1
    auto ax = prop.spec().axis();
    double var = 0;
    for (int i = 0; i < prop.spec().points; ++i)
      var += ax[i] * ax[i] * std::norm(psi.values[i]) * prop.spec().spacing();
    double err = std::abs(var - 1.25);
    double el = seconds_since(t0);
    h.report(8, "free packet variance follows 1 + t^2/4", err <= 1e-6 && el <= 10.0,
             "error " + fmt(err) + ", " + fmt(el) + " s");
  }

  // 9: long-run unitarity/energy conservation and the model ground state.
  {
    MassSpec mass({2.0, 2.0});
    JacobiFrame frame(mass, ClusterDecomposition({{1, 2}}, 2), 1);
    PairPotential pt{PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5};
    PotentialSpec pot;
    pot.entries.push_back(pt);
    Propagator prop(GridSpec(1, 20.0, 512), HamiltonianSpec{frame, pot});
    GridState psi = make_gaussian(prop.spec(), {1.0}, {1.0}, {0.5});
    double n0 = psi.norm_sq();
    double e0 = prop.energy(psi);
    prop.propagate(psi, 1e-4, 10000);
    double norm_drift = std::abs(psi.norm_sq() - n0);
    double energy_drift = std::abs(prop.energy(psi) - e0) / std::abs(e0);
    PairSubsystem sub{1.0, pt, 1.0};
    auto bound = solve_bound_states(sub, prop.spec(), 1);
    double ground = bound.empty() ? 1.0 : bound[0].energy;
    double ground_err = std::abs(ground + 0.5);
    double imag = imaginary_time_ground_energy(sub, prop.spec(), 0.01, 4000);
    double route_gap = std::abs(imag - ground);
    bool pass = norm_drift <= 1e-8 && energy_drift <= 1e-8 &&
                ground_err <= 1e-6 && route_gap <= 1e-6;
    h.report(9, "norm/energy drift over 1e4 steps; ground state -0.5", pass,
             "drift " + fmt(norm_drift) + "/" + fmt(energy_drift) +
                 ", E0 err " + fmt(ground_err) + ", routes " + fmt(route_gap));
  }

  // 10: three-body threshold set contains the pair energy and zero.
  {
    MassSpec mass({2.0, 2.0, 2.0});
    PotentialSpec pot;
    pot.entries.push_back(
        {PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5});
    auto t = thresholds(mass, pot, GridSpec(1, 20.0, 512));
    bool has_pair = false, has_zero = false;
    for (double v : t) {
      if (std::abs(v + 0.5) <= 1e-6) has_pair = true;
      if (std::abs(v) <= 1e-6) has_zero = true;
    }
    h.report(10, "threshold set contains {-0.5, 0}", has_pair && has_zero,
             std::to_string(t.size()) + " thresholds");
  }

  // 11: asymptotic channel sorting for bound-pair and all-free data.
  {
    auto t0 = Clock::now();
    MassSpec mass({2.0, 2.0, 2.0});
    JacobiFrame frame(mass, ClusterDecomposition({{1, 2}, {3}}, 3), 1);
    PotentialSpec pot;
    pot.entries.push_back(
        {PairIndex(1, 2), PotentialKind::poschl_teller, -1.0, 0.5});
    Propagator prop(GridSpec(2, 30.0, 256), HamiltonianSpec{frame, pot});
    GridState psi =
        make_channel_state(prop, PairIndex(1, 2), 0, -10.0, 2.0, 1.5);
    auto rep = channel_decomposition(psi, prop, 0.25, 0.5, 1.0, 12.0, 0.005);
    double bound_occ = 0;
    for (const auto& e : rep.entries)
      if (e.b == ClusterDecomposition({{1, 2}, {3}}, 3)) bound_occ = e.occupation;
    bool bound_ok = bound_occ >= 0.9 * rep.norm_sq &&
                    rep.residual + rep.overlap_mass <= 0.1 * rep.norm_sq;
    double el_bound = seconds_since(t0);

    auto t1 = Clock::now();
    Propagator free_prop(GridSpec(2, 30.0, 256), HamiltonianSpec{frame, {}});
    GridState free_psi = make_gaussian(free_prop.spec(), {-2.0, -2.0},
                                       {2.0, 2.0}, {2.0, 1.5});
    auto rep_free =
        channel_decomposition(free_psi, free_prop, 0.25, 0.5, 1.0, 12.0, 0.005);
    double free_occ = 0;
    for (const auto& e : rep_free.entries)
      if (e.b.size() == 3) free_occ = e.occupation;
    bool free_ok = free_occ >= 0.9 * rep_free.norm_sq;
    double el_free = seconds_since(t1);

    bool pass = bound_ok && free_ok && el_bound <= 600.0 && el_free <= 600.0;
    h.report(11, "channel occupations sort bound-pair and free data", pass,
             "bound " + fmt(bound_occ) + " resid+ovl " +
                 fmt(rep.residual + rep.overlap_mass) + ", free " +
                 fmt(free_occ));
  }

  // 12: phase deviation decay rates and the exact gluing/identity regions.
  {
    bool pass = true;
    std::string detail;
    for (double eps : {0.6, 0.8}) {
      double r0 = (eps == 0.6) ? 256.0 : 64.0;
      PhaseFunction phase(LongRangeTail{1.0, eps},
                          PhaseParams{0.5, 0.5, r0, 2});
      auto dev = phase_deviation_decay(phase, 2.0 * r0, 100.0 * r0, 6,
                                       {0.5, 1.0, 2.0, 3.0});
      if (std::abs(dev.slope - (1.0 - eps)) > 0.15) pass = false;
      if (phase.phase(r0 / 4.0, 1.7) != (r0 / 4.0) * 1.7) pass = false;
      if (phase.phase(300.0, 0.2) != 300.0 * 0.2) pass = false;
      detail += "eps=" + fmt(eps) + " slope=" + fmt(dev.slope) + " ";
    }
    // Zero-potential pipeline is the identity.
    GridSpec spec(1, 40.0, 512);
    PhaseFunction trivial(LongRangeTail{0.0, 0.8}, PhaseParams{0.5, 0.5, 8.0, 2});
    Modifier mod(trivial, spec);
    GridState psi = make_gaussian(spec, {-3.0}, {2.0}, {1.0});
    GridState out = mod.apply(psi);
    double diff = 0;
    for (int i = 0; i < spec.points; ++i)
      diff = std::max(diff, std::abs(out.values[i] - psi.values[i]));
    if (diff > 1e-10) pass = false;
    h.report(12, "phase deviation decays at rate 1-eps; gluing exact", pass,
             detail + "identity " + fmt(diff));
  }

  // 13: stationary remainder decay for the depth-2 iteration.
  {
    PhaseFunction phase(LongRangeTail{1.0, 0.8}, PhaseParams{0.5, 0.5, 64.0, 2});
    auto res = residual_decay(phase, 128.0, 6400.0, 6, {0.5, 1.0, 2.0, 3.0});
    h.report(13, "stationary remainder decays faster than eps + 1/2",
             res.slope <= -(0.8 + 0.5), "slope " + fmt(res.slope));
  }

  // 14: the modifier accelerates wave-operator convergence.
  {
    MassSpec mass({2.0, 2.0});
    JacobiFrame frame(mass, ClusterDecomposition({{1, 2}}, 2), 1);
    GridSpec spec(1, 640.0, 4096);
    PotentialSpec pot;
    pot.entries.push_back(
        {PairIndex(1, 2), PotentialKind::long_range_power, 1.0, 0.8});
    Propagator full(spec, HamiltonianSpec{frame, pot});
    Propagator free_prop(spec, HamiltonianSpec{frame, {}});
    PhaseFunction phase(LongRangeTail{1.0, 0.8}, PhaseParams{0.5, 0.5, 8.0, 2});
    Modifier mod(phase, spec);
    GridState psi = make_gaussian(spec, {12.0}, {2.0}, {2.5});
    std::vector<double> schedule{16.0, 32.0, 64.0, 128.0};
    auto with = wave_operator_probe(psi, full, free_prop, &mod, schedule,
                                    0.005, 0.25);
    auto without = wave_operator_probe(psi, full, free_prop, nullptr, schedule,
                                       0.005, 0.25);
    bool pass = true;
    std::string detail = "ratios";
    for (std::size_t k = 1; k < with.increments.size(); ++k) {
      double ratio = with.increments[k] / with.increments[k - 1];
      detail += " " + fmt(ratio);
      if (!(ratio <= 0.7)) pass = false;
    }
    for (std::size_t k = 0; k < with.increments.size(); ++k)
      if (!(with.increments[k] < without.increments[k])) pass = false;
    h.report(14, "modified increments contract and beat the unmodified probe",
             pass, detail);
  }

  // 15: identical seeds reproduce reports bitwise.
  {
    auto c = select_constants(3);
    auto a = verify_partition(MassSpec({1.0, 1.0, 1.0}), 1, c, 2000, 7);
    auto b = verify_partition(MassSpec({1.0, 1.0, 1.0}), 1, c, 2000, 7);
    PhaseFunction phase(LongRangeTail{1.0, 0.8}, PhaseParams{0.5, 0.5, 64.0, 2});
    auto d1 = phase_deviation_decay(phase, 128.0, 6400.0, 6, {1.0, 2.0});
    auto d2 = phase_deviation_decay(phase, 128.0, 6400.0, 6, {1.0, 2.0});
    bool pass = a.to_json() == b.to_json() && d1.to_json() == d2.to_json();
    h.report(15, "repeated runs with one seed are bit-identical", pass,
             pass ? "reports match" : "reports differ");
  }

  std::printf("%d/15 criteria passed\n", 15 - h.failures);
  return h.failures;
}
