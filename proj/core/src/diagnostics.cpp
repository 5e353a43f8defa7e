#include "scatgeo/diagnostics.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "scatgeo/cutoffs.hpp"
#include "scatgeo/mass_geometry.hpp"

namespace scatgeo {

namespace {

// One-sided indicator of s >= thr (resp. s <= thr) on the squared variable,
// mollified over a collar of width `collar` below (resp. above) thr.
double f_geq(double s_sq, double thr, double collar) {
  if (thr <= 0) return 1.0;
  if (collar <= 0) return s_sq >= thr * thr ? 1.0 : 0.0;
  double w = std::max(2.0 * thr * collar, collar * collar);
  return phi_greater(s_sq, CutoffSpec(w, thr * thr));
}

double f_leq(double s_sq, double thr, double collar) {
  if (thr < 0) return 0.0;
  if (collar <= 0) return s_sq <= thr * thr ? 1.0 : 0.0;
  double w = std::max(2.0 * thr * collar, collar * collar);
  return phi_less(s_sq, CutoffSpec(w, thr * thr));
}

int schedule_steps(double t, double dt) {
  double raw = t / dt;
  int steps = static_cast<int>(std::llround(raw));
  if (std::abs(steps - raw) > 1e-6)
    throw std::invalid_argument("schedule time is not a multiple of dt");
  return steps;
}

}  // namespace

std::vector<double> region_mask(const Propagator& prop, const RegionParams& p,
                                double t) {
  const auto& frame = prop.hamiltonian().frame;
  const GridSpec& spec = prop.spec();
  const int n = frame.mass().n_particles();
  if (p.b.n_particles() != n)
    throw std::invalid_argument("region_mask: decomposition/mass mismatch");
  if (p.b.size() < 2)
    throw std::invalid_argument("region_mask: |b| >= 2 required");

  // Crossing pairs: reduced-mass-weighted separation row over grid coords.
  struct CrossPair {
    Eigen::RowVectorXd row;
    double sqrt_mu;
  };
  std::vector<CrossPair> crossing;
  for (const auto& alpha : all_pairs(n)) {
    if (pair_leq(alpha, p.b)) continue;
    double mi = frame.mass().masses[alpha.i - 1];
    double mj = frame.mass().masses[alpha.j - 1];
    crossing.push_back(
        {pair_coordinate(alpha, frame), std::sqrt(mi * mj / (mi + mj))});
  }

  // Internal quadratic form |x^b|^2_b over grid coordinates.
  const int internal_dim = frame.dim() - (p.b.size() - 1);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(frame.dim(), frame.dim());
  if (internal_dim > 0) {
    JacobiFrame frame_b(frame.mass(), p.b, frame.nu());
    Eigen::MatrixXd u = change_frame(frame, frame_b);
    for (int i = p.b.size() - 1; i < frame_b.n_coords(); ++i)
      q += frame_b.weights()(i) * u.row(i).transpose() * u.row(i);
  }

  double sep_thr = p.sigma * t;
  double int_thr = (p.r == 0.0) ? p.R : p.delta * std::pow(std::max(t, 0.0), p.r);
  double collar = p.mollify_spacings * spec.spacing();

  auto ax = spec.axis();
  const int m = spec.points;
  std::vector<double> mask(spec.total(), 1.0);
  Eigen::VectorXd x(spec.dim);
  for (std::size_t idx = 0; idx < mask.size(); ++idx) {
    if (spec.dim == 1) {
      x(0) = ax[idx];
    } else {
      x(0) = ax[idx / m];
      x(1) = ax[idx % m];
    }
    double value = 1.0;
    for (const auto& cp : crossing) {
      double s = cp.sqrt_mu * (cp.row * x)(0);
      value *= f_geq(s * s, sep_thr, collar);
      if (value == 0.0) break;
    }
    if (value != 0.0 && internal_dim > 0)
      value *= f_leq(x.dot(q * x), int_thr, collar);
    mask[idx] = value;
  }
  return mask;
}

GridState region_project(const GridState& psi, const Propagator& prop,
                         const RegionParams& p, double t) {
  if (psi.values.size() != prop.spec().total())
    throw std::invalid_argument("region_project: grid mismatch");
  auto mask = region_mask(prop, p, t);
  GridState out = psi;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= mask[i];
  return out;
}

DeficitSeries deficit_series(const GridState& psi0, const Propagator& prop,
                             const RegionParams& p,
                             const std::vector<double>& schedule, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("deficit_series: dt must be > 0");
  DeficitSeries out;
  GridState psi = psi0;
  int done = 0;
  for (double t : schedule) {
    int steps = schedule_steps(t, dt);
    if (steps < done)
      throw std::invalid_argument("deficit_series: schedule must increase");
    prop.propagate(psi, dt, steps - done);
    done = steps;
    GridState proj = region_project(psi, prop, p, t);
    out.times.push_back(t);
    out.occupation.push_back(proj.norm_sq());
    GridState diff = psi;
    for (std::size_t i = 0; i < diff.values.size(); ++i)
      diff.values[i] -= proj.values[i];
    out.deficit.push_back(std::sqrt(diff.norm_sq()));
  }
  return out;
}

std::string DeficitSeries::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "time,deficit,occupation\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    out << times[i] << "," << deficit[i] << "," << occupation[i] << "\n";
  return out.str();
}

GridState energy_filter(const GridState& psi, const Propagator& prop,
                        const EnergyWindow& window,
                        const std::vector<double>& threshold_list) {
  if (!(window.width > 0) || !(window.hi > window.lo))
    throw std::invalid_argument("energy_filter: malformed window");
  for (double tau : threshold_list)
    if (tau >= window.lo - window.width && tau <= window.hi + window.width)
      throw std::invalid_argument(
          "energy_filter: window touches a threshold at " +
          std::to_string(tau));

  // Spectral enclosure of H on this grid.
  auto v = prop.potential_grid(PotentialTerm::full);
  double vmin = v[0], vmax = v[0];
  for (double value : v) {
    vmin = std::min(vmin, value);
    vmax = std::max(vmax, value);
  }
  double kmax = 0;
  for (double value : prop.kinetic_table()) kmax = std::max(kmax, value);
  double lo_b = vmin, hi_b = vmax + kmax;
  double pad = 0.05 * (hi_b - lo_b) + 1e-12;
  lo_b -= pad;
  hi_b += pad;

  auto target = [&](double e) {
    return phi_greater(e, CutoffSpec(window.width, window.lo)) *
           phi_less(e, CutoffSpec(window.width, window.hi));
  };

  // Chebyshev coefficients at the node count where the tail has converged.
  // The start must resolve the mollifier transition, else every node can
  // miss the window and the zero polynomial would look converged.
  double needed =
      4.0 * std::numbers::pi * (hi_b - lo_b) / (2.0 * window.width);
  int k_start = 512;
  while (k_start < needed && k_start < (1 << 18)) k_start *= 2;
  std::vector<double> coeff;
  for (int k_nodes = k_start; k_nodes <= (1 << 19); k_nodes *= 2) {
    coeff.assign(k_nodes, 0.0);
    std::vector<double> f(k_nodes);
    for (int m = 0; m < k_nodes; ++m) {
      double u = std::cos(std::numbers::pi * (m + 0.5) / k_nodes);
      f[m] = target(0.5 * ((hi_b - lo_b) * u + (hi_b + lo_b)));
    }
    // DCT-II gives coeff_k = (2/N) sum_m f_m cos(k pi (m+1/2)/N).
    fftw_plan plan = fftw_plan_r2r_1d(k_nodes, f.data(), coeff.data(),
                                      FFTW_REDFT10, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    for (int k = 0; k < k_nodes; ++k)
      coeff[k] /= (k == 0 ? 2.0 : 1.0) * k_nodes;
    double tail = 0;
    for (int k = k_nodes - k_nodes / 10; k < k_nodes; ++k)
      tail = std::max(tail, std::abs(coeff[k]));
    if (tail < 1e-11) break;
  }

  // Clenshaw-style accumulation with the rescaled Hamiltonian.
  auto apply_scaled = [&](const GridState& s) {
    GridState h = prop.apply_hamiltonian(s);
    double a = 2.0 / (hi_b - lo_b), b = -(hi_b + lo_b) / (hi_b - lo_b);
    for (std::size_t i = 0; i < h.values.size(); ++i)
      h.values[i] = a * h.values[i] + b * s.values[i];
    return h;
  };

  // Drop the converged tail so the recurrence stops once the remaining
  // coefficients are negligible.
  std::size_t degree = coeff.size();
  while (degree > 2 && std::abs(coeff[degree - 1]) < 1e-14) --degree;

  GridState t_prev = psi;
  GridState t_cur = apply_scaled(psi);
  GridState out = psi;
  for (auto& value : out.values) value *= coeff[0];
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += coeff[1] * t_cur.values[i];
  for (std::size_t k = 2; k < degree; ++k) {
    GridState t_next = apply_scaled(t_cur);
    for (std::size_t i = 0; i < t_next.values.size(); ++i)
      t_next.values[i] = 2.0 * t_next.values[i] - t_prev.values[i];
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
    if (std::abs(coeff[k]) > 1e-14)
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] += coeff[k] * t_cur.values[i];
  }
  return out;
}

ChannelReport channel_decomposition(const GridState& psi0,
                                    const Propagator& prop, double sigma,
                                    double delta, double r, double time,
                                    double dt, double mollify_spacings) {
  ChannelReport rep;
  rep.time = time;
  GridState psi = psi0;
  prop.propagate(psi, dt, schedule_steps(time, dt));
  rep.norm_sq = psi.norm_sq();

  const int n = prop.hamiltonian().frame.mass().n_particles();
  std::vector<std::vector<double>> masks;
  for (const auto& b : enumerate_decompositions(n)) {
    if (b.size() < 2) continue;
    RegionParams p{b, r, sigma, delta, /*R=*/delta, mollify_spacings};
    masks.push_back(region_mask(prop, p, time));
    double occ = 0;
    const auto& mask = masks.back();
    for (std::size_t i = 0; i < mask.size(); ++i)
      occ += mask[i] * mask[i] * std::norm(psi.values[i]);
    occ *= std::pow(prop.spec().spacing(), prop.spec().dim);
    rep.entries.push_back({b, occ});
    rep.occupation_sum += occ;
  }
  rep.residual = rep.norm_sq - rep.occupation_sum;

  double cell = std::pow(prop.spec().spacing(), prop.spec().dim);
  for (std::size_t a = 0; a < masks.size(); ++a)
    for (std::size_t b = a + 1; b < masks.size(); ++b) {
      double s = 0;
      for (std::size_t i = 0; i < masks[a].size(); ++i) {
        double m = masks[a][i] * masks[b][i];
        s += m * m * std::norm(psi.values[i]);
      }
      rep.overlap_mass += s * cell;
    }
  return rep;
}

std::string ChannelReport::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"time\":" << time << ",\"norm_sq\":" << norm_sq
      << ",\"channels\":[";
  for (std::size_t i = 0; i < entries.size(); ++i)
    out << (i ? "," : "") << "{\"b\":" << entries[i].b.to_json()
        << ",\"occupation\":" << entries[i].occupation << "}";
  out << "],\"occupation_sum\":" << occupation_sum
      << ",\"residual\":" << residual << ",\"overlap_mass\":" << overlap_mass
      << "}";
  return out.str();
}

GridState make_channel_state(const Propagator& prop, const PairIndex& pair,
                             int bound_index, double packet_center,
                             double packet_width, double packet_velocity) {
  const GridSpec& spec = prop.spec();
  const auto& frame = prop.hamiltonian().frame;
  if (spec.dim != 2 || frame.mass().n_particles() != 3)
    throw std::invalid_argument("make_channel_state: N = 3, 2D grid required");
  const auto& b = frame.decomposition();
  bool pair_is_block = false;
  for (const auto& block : b.blocks())
    pair_is_block |= (block == std::vector<int>{pair.i, pair.j});
  if (!pair_is_block)
    throw std::invalid_argument(
        "make_channel_state: pair must be a block of the frame decomposition");

  const PairPotential* entry = nullptr;
  for (const auto& e : prop.hamiltonian().potential.entries)
    if (e.pair == pair && e.kind != PotentialKind::zero) entry = &e;
  if (!entry)
    throw std::invalid_argument("make_channel_state: pair has no interaction");

  double mi = frame.mass().masses[pair.i - 1];
  double mj = frame.mass().masses[pair.j - 1];
  PairSubsystem sub{mi * mj / (mi + mj), *entry, prop.hamiltonian().hbar};
  GridSpec axis_spec(1, spec.extent, spec.points);
  auto bound = solve_bound_states(sub, axis_spec, bound_index + 1);
  if (static_cast<int>(bound.size()) <= bound_index)
    throw std::invalid_argument("make_channel_state: no such bound state");
  const auto& wf = bound[bound_index].wavefunction;

  double k0 = frame.weights()(0) * packet_velocity / prop.hamiltonian().hbar;
  auto ax = spec.axis();
  GridState psi(spec);
  const int m = spec.points;
  for (int i = 0; i < m; ++i) {
    double d = ax[i] - packet_center;
    std::complex<double> packet = std::polar(
        std::exp(-d * d / (4.0 * packet_width * packet_width)), k0 * ax[i]);
    for (int j = 0; j < m; ++j) psi.values[i * m + j] = packet * wf[j];
  }
  psi.normalize();
  return psi;
}

double velocity_position_discrepancy(const GridState& psi,
                                     const Propagator& prop, double t,
                                     double test_width) {
  if (!(t > 0) || !(test_width > 0))
    throw std::invalid_argument("velocity_position_discrepancy: bad params");
  const GridSpec& spec = prop.spec();
  const auto& frame = prop.hamiltonian().frame;
  auto profile = [&](double u) {
    return std::exp(-u * u / (2.0 * test_width * test_width));
  };

  // Test profile on x_b/t (leading intercluster axis) in position space.
  GridState a = psi;
  auto ax = spec.axis();
  const int m = spec.points;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double x0 = (spec.dim == 1) ? ax[i] : ax[i / m];
    a.values[i] *= profile(x0 / t);
  }

  // Same profile on the conjugate velocity hbar*k/M_1 in momentum space.
  GridState b = psi;
  prop.fft_forward(b.values);
  auto freq = spec.frequencies();
  double scale = prop.hamiltonian().hbar / frame.weights()(0);
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    double k0 = (spec.dim == 1) ? freq[i] : freq[i / m];
    b.values[i] *= profile(scale * k0);
  }
  prop.fft_backward(b.values);

  for (std::size_t i = 0; i < a.values.size(); ++i)
    a.values[i] -= b.values[i];
  return std::sqrt(a.norm_sq());
}

}  // namespace scatgeo
