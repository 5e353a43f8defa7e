#include "scatgeo/eikonal.hpp"

#include <fftw3.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "scatgeo/cutoffs.hpp"

namespace scatgeo {

double LongRangeTail::value_sq(double z_sq) const {
  return c * std::pow(1.0 + z_sq, -epsilon / 2.0);
}

double LongRangeTail::derivative(double z) const {
  return -c * epsilon * z * std::pow(1.0 + z * z, -epsilon / 2.0 - 1.0);
}

namespace {

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr int kGlPoints = 8;
constexpr double kGlNode[kGlPoints] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeight[kGlPoints] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

template <typename F>
double gl_panel(const F& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < kGlPoints; ++i) {
    double d = half * kGlNode[i];
    s += kGlWeight[i] * (f(mid - d) + f(mid + d));
  }
  return half * s;
}

// Integral over [0, upper] with dyadic panels, accurate for smooth
// integrands with algebraic tails.
template <typename F>
double dyadic_integral(const F& f, double upper) {
  if (upper <= 0) return 0.0;
  double s = 0, a = 0, b = 1.0;
  while (a < upper) {
    s += gl_panel(f, a, std::min(b, upper));
    a = b;
    b *= 2;
  }
  return s;
}

}  // namespace

PhaseFunction::PhaseFunction(LongRangeTail tail, PhaseParams params)
    : tail_(tail), params_(params) {
  if (!(tail_.epsilon > 0.5 && tail_.epsilon <= 1.0))
    throw std::invalid_argument("tail exponent must lie in (1/2, 1]");
  if (params_.depth < 1 || !(params_.d > 0) || !(params_.r0 > 0) ||
      !(params_.theta > 0 && params_.theta <= 1))
    throw std::invalid_argument("malformed phase parameters");
}

double PhaseFunction::e_level(double x, double xi_sq, int k) const {
  double e = tail_.value(x);
  double base = e;
  for (int level = 1; level <= k; ++level) e = base + e * e / (2.0 * xi_sq);
  return e;
}

double PhaseFunction::e_level_dx(double x, double xi_sq, int k) const {
  double e = tail_.value(x);
  double de = tail_.derivative(x);
  double base = e, dbase = de;
  for (int level = 1; level <= k; ++level) {
    de = dbase + e * de / xi_sq;
    e = base + e * e / (2.0 * xi_sq);
  }
  return de;
}

double PhaseFunction::correction(double x, double xi) const {
  if (xi == 0) throw std::invalid_argument("correction: xi must be nonzero");
  double xi_sq = xi * xi;
  int k = params_.depth - 1;
  double integral =
      dyadic_integral([&](double t) { return e_level(t, xi_sq, k); },
                      std::abs(x));
  if (x < 0) integral = -integral;
  return -integral / xi;
}

double PhaseFunction::correction_dx(double x, double xi) const {
  return -e_level(x, xi * xi, params_.depth - 1) / xi;
}

double PhaseFunction::correction_dxx(double x, double xi) const {
  return -e_level_dx(x, xi * xi, params_.depth - 1) / xi;
}

double PhaseFunction::correction_dxi(double x, double xi) const {
  if (xi == 0) throw std::invalid_argument("correction_dxi: xi nonzero");
  double xi_sq = xi * xi;
  int k = params_.depth - 1;
  // d/dxi of the e iteration: de_0 = 0, de_k = e_{k-1} de_{k-1}/xi^2
  // - e_{k-1}^2/xi^3.
  auto e_dxi = [&](double t) {
    double e = tail_.value(t), de = 0.0;
    for (int level = 1; level <= k; ++level) {
      double nde = e * de / xi_sq - e * e / (xi_sq * xi);
      e = tail_.value(t) + e * e / (2.0 * xi_sq);
      de = nde;
    }
    return de;
  };
  double a = dyadic_integral([&](double t) { return e_level(t, xi_sq, k); },
                             std::abs(x));
  double da = dyadic_integral(e_dxi, std::abs(x));
  if (x < 0) {
    a = -a;
    da = -da;
  }
  return a / xi_sq - da / xi;
}

double PhaseFunction::phase(double x, double xi) const {
  double cut = chi0(2.0 * std::abs(xi) / params_.d) *
               chi0(2.0 * std::abs(x) / params_.r0);
  if (cut == 0.0) return x * xi;
  return x * xi + cut * correction(x, xi);
}

std::complex<double> PhaseFunction::residual(double x, double xi) const {
  double ux = correction_dx(x, xi);
  double re = xi * ux + 0.5 * ux * ux + tail_.value(x);
  double im = -0.5 * correction_dxx(x, xi);
  return {re, im};
}

double PhaseFunction::correction_quadrature(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& xi,
                                            int sign, int depth) const {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("sign must be +1 or -1");
  if (!(xi.norm() > 0)) throw std::invalid_argument("xi must be nonzero");
  const double upper = std::ldexp(1.0, 40);
  const double fd = 1e-4;

  std::function<double(const Eigen::VectorXd&, int)> e_at;
  std::function<double(const Eigen::VectorXd&, int)> u_at;
  e_at = [&](const Eigen::VectorXd& y, int k) -> double {
    double value = tail_.value_sq(y.squaredNorm());
    if (k == 0) return value;
    double grad_sq = 0;
    for (int i = 0; i < y.size(); ++i) {
      Eigen::VectorXd yp = y, ym = y;
      yp(i) += fd;
      ym(i) -= fd;
      double g = (u_at(yp, k) - u_at(ym, k)) / (2.0 * fd);
      grad_sq += g * g;
    }
    return value + 0.5 * grad_sq;
  };
  u_at = [&](const Eigen::VectorXd& y, int k) -> double {
    return sign * dyadic_integral(
                       [&](double s) {
                         return e_at(y + (sign * s) * xi, k - 1) -
                                e_at((sign * s) * xi, k - 1);
                       },
                       upper);
  };
  return u_at(x, depth);
}

double PhaseFunction::phase_quadrature(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& xi) const {
  double flat = x.dot(xi);
  double nx = x.norm(), nxi = xi.norm();
  if (nx == 0 || nxi == 0) return flat;
  double cut =
      chi0(2.0 * nxi / params_.d) * chi0(2.0 * nx / params_.r0);
  if (cut == 0.0) return flat;
  double cosine = flat / (nx * nxi);
  double wp = psi_plus(cosine, params_.theta);
  double wm = psi_minus(cosine, params_.theta);
  double glued = 0;
  if (wp > 0) glued += wp * correction_quadrature(x, xi, +1, params_.depth);
  if (wm > 0) glued += wm * correction_quadrature(x, xi, -1, params_.depth);
  return flat + cut * glued;
}

namespace {

template <typename F>
ShellDecay shell_sup(const F& f, double z_lo, double z_hi, int shells,
                     const std::vector<double>& xi_samples) {
  if (shells < 2 || !(z_lo > 0) || !(z_hi > z_lo))
    throw std::invalid_argument("shell scan needs z_hi > z_lo > 0, >= 2 shells");
  ShellDecay out;
  const int per_shell = 16;
  const double growth = std::pow(z_hi / z_lo, 1.0 / shells);
  for (int s = 0; s < shells; ++s) {
    double a = z_lo * std::pow(growth, s);
    double sup = 0;
    for (int i = 0; i < per_shell; ++i) {
      double z = a * std::pow(growth, static_cast<double>(i) / per_shell);
      for (double xi : xi_samples) sup = std::max(sup, f(z, xi));
    }
    out.shell_center.push_back(a * std::sqrt(growth));
    out.sup_value.push_back(sup);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < out.sup_value.size(); ++i) {
    if (!(out.sup_value[i] > 0)) continue;
    double lx = std::log(out.shell_center[i]);
    double ly = std::log(out.sup_value[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  out.slope = (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  return out;
}

}  // namespace

ShellDecay phase_deviation_decay(const PhaseFunction& phase, double z_lo,
                                 double z_hi, int shells,
                                 const std::vector<double>& xi_samples) {
  return shell_sup(
      [&](double z, double xi) { return std::abs(phase.phase(z, xi) - z * xi); },
      z_lo, z_hi, shells, xi_samples);
}

ShellDecay residual_decay(const PhaseFunction& phase, double z_lo, double z_hi,
                          int shells, const std::vector<double>& xi_samples) {
  return shell_sup(
      [&](double z, double xi) { return std::abs(phase.residual(z, xi)); },
      z_lo, z_hi, shells, xi_samples);
}

ShellDecay correction_derivative_decay(const PhaseFunction& phase, double z_lo,
                                       double z_hi, int shells,
                                       const std::vector<double>& xi_samples) {
  return shell_sup(
      [&](double z, double xi) { return std::abs(phase.correction_dx(z, xi)); },
      z_lo, z_hi, shells, xi_samples);
}

std::string ShellDecay::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"shell_center\":[";
  for (std::size_t i = 0; i < shell_center.size(); ++i)
    out << (i ? "," : "") << shell_center[i];
  out << "],\"sup_value\":[";
  for (std::size_t i = 0; i < sup_value.size(); ++i)
    out << (i ? "," : "") << sup_value[i];
  out << "],\"slope\":" << slope << "}";
  return out.str();
}

struct Modifier::Plan {
  fftw_plan forward = nullptr;
  ~Plan() {
    if (forward) fftw_destroy_plan(forward);
  }
};

Modifier::Modifier(const PhaseFunction& phase, const GridSpec& spec)
    : spec_(spec), plan_(std::make_unique<Plan>()) {
  if (spec_.dim != 1)
    throw std::invalid_argument("modifier is implemented on 1D grids");
  const int m = spec_.points;
  std::vector<std::complex<double>> scratch(m);
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  plan_->forward = fftw_plan_dft_1d(m, ptr, ptr, FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);

  auto x = spec_.axis();
  auto k = spec_.frequencies();
  const double h = spec_.spacing();
  const auto& pp = phase.params();
  const int level = pp.depth - 1;

  kernel_.resize(m, m);
  std::vector<double> cum(m);
  for (int j = 0; j < m; ++j) {
    double xi = k[j];
    double cut_xi = (xi == 0.0) ? 0.0 : chi0(2.0 * std::abs(xi) / pp.d);
    if (cut_xi == 0.0) {
      for (int l = 0; l < m; ++l)
        kernel_(l, j) = std::polar(1.0, x[l] * xi);
      continue;
    }
    // Cumulative integral of e_{K-1} from 0, composite Simpson with two
    // subcells per grid cell.  x = 0 sits at index m/2.
    double xi_sq = xi * xi;
    auto e = [&](double t) { return phase.e_level(t, xi_sq, level); };
    auto cell = [&](double a) {
      return (h / 12.0) * (e(a) + 4.0 * e(a + 0.25 * h) + 2.0 * e(a + 0.5 * h) +
                           4.0 * e(a + 0.75 * h) + e(a + h));
    };
    cum[m / 2] = 0.0;
    for (int l = m / 2; l + 1 < m; ++l) cum[l + 1] = cum[l] + cell(x[l]);
    for (int l = m / 2; l > 0; --l) cum[l - 1] = cum[l] - cell(x[l - 1]);
    for (int l = 0; l < m; ++l) {
      double u = -cum[l] / xi;
      double phi =
          x[l] * xi + u * cut_xi * chi0(2.0 * std::abs(x[l]) / pp.r0);
      kernel_(l, j) = std::polar(1.0, phi);
    }
  }
}

Modifier::~Modifier() = default;

GridState Modifier::apply(const GridState& psi) const {
  if (psi.spec.points != spec_.points || psi.spec.dim != 1)
    throw std::invalid_argument("modifier/state grid mismatch");
  const int m = spec_.points;
  const double h = spec_.spacing();
  std::vector<std::complex<double>> data = psi.values;
  fftw_execute_dft(plan_->forward,
                   reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
  // Aliasing guard: reject momentum content in the top 5% of the Nyquist
  // band.
  double total = 0, band = 0;
  for (int j = 0; j < m; ++j) total += std::norm(data[j]);
  for (int j = m / 2 - m / 40; j <= m / 2 + m / 40; ++j)
    band += std::norm(data[j]);
  if (total > 0 && band / total > 1e-8)
    throw std::invalid_argument(
        "modifier: momentum support touches the Nyquist band");

  auto k = spec_.frequencies();
  Eigen::VectorXcd hat(m);
  for (int j = 0; j < m; ++j)
    hat(j) = h * std::polar(1.0, k[j] * spec_.extent) * data[j];
  Eigen::VectorXcd out = kernel_ * hat / (2.0 * spec_.extent);
  GridState result(psi.spec);
  for (int l = 0; l < m; ++l) result.values[l] = out(l);
  return result;
}

std::string ProbeReport::to_json() const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"modified\":" << (modified ? "true" : "false") << ",\"times\":[";
  for (std::size_t i = 0; i < times.size(); ++i)
    out << (i ? "," : "") << times[i];
  out << "],\"increments\":[";
  for (std::size_t i = 0; i < increments.size(); ++i)
    out << (i ? "," : "") << increments[i];
  out << "],\"localization\":[";
  for (std::size_t i = 0; i < localization.size(); ++i)
    out << (i ? "," : "") << localization[i];
  out << "]}";
  return out.str();
}

ProbeReport wave_operator_probe(const GridState& psi0, const Propagator& full,
                                const Propagator& free_prop,
                                const Modifier* mod,
                                const std::vector<double>& schedule, double dt,
                                double loc_sigma, double boundary_tol) {
  if (!(dt > 0)) throw std::invalid_argument("probe: dt must be positive");
  const GridSpec& spec = full.spec();
  if (spec.dim != 1 || free_prop.spec().points != spec.points)
    throw std::invalid_argument("probe: 1D grids of equal size required");

  auto steps_of = [&](double t) {
    double raw = t / dt;
    int steps = static_cast<int>(std::llround(raw));
    if (std::abs(steps - raw) > 1e-6)
      throw std::invalid_argument("probe: schedule time not a multiple of dt");
    return steps;
  };
  auto boundary_mass = [&](const GridState& s) {
    const int band = spec.points / 10;
    double mass = 0;
    for (int i = 0; i < band; ++i)
      mass += std::norm(s.values[i]) +
              std::norm(s.values[spec.points - 1 - i]);
    return mass * spec.spacing();
  };

  ProbeReport rep;
  rep.modified = (mod != nullptr);
  GridState free_state = psi0;
  GridState prev(spec);
  bool have_prev = false;
  int done = 0;
  auto ax = spec.axis();
  for (double t : schedule) {
    int steps = steps_of(t);
    if (steps < done)
      throw std::invalid_argument("probe: schedule must be increasing");
    free_prop.propagate(free_state, dt, steps - done);
    done = steps;
    GridState omega = mod ? mod->apply(free_state) : free_state;
    // Outgoing localization at physical time t, before pulling back.
    double far = 0;
    for (int i = 0; i < spec.points; ++i)
      if (std::abs(ax[i]) >= loc_sigma * t)
        far += std::norm(omega.values[i]);
    full.propagate(omega, -dt, steps);
    if (boundary_mass(free_state) > boundary_tol ||
        boundary_mass(omega) > boundary_tol)
      throw std::runtime_error("probe: state reached the grid boundary at t=" +
                               std::to_string(t));
    rep.times.push_back(t);
    rep.localization.push_back(far * spec.spacing());
    if (have_prev) {
      double diff = 0;
      for (int i = 0; i < spec.points; ++i)
        diff += std::norm(omega.values[i] - prev.values[i]);
      rep.increments.push_back(std::sqrt(diff * spec.spacing()));
    }
    prev = std::move(omega);
    have_prev = true;
  }
  return rep;
}

}  // namespace scatgeo
