// scatgeo: command-line driver for the scattering-geometry experiments.
//
// Subcommands: partition-verify | lemma31 | simulate | channels | eikonal |
// probe, each reading a JSON config (schema-checked, unknown fields
// rejected) and writing a report into the output directory.  Exit codes:
// 0 success, 2 config/parameter error, 3 numeric failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scatgeo/diagnostics.hpp"
#include "scatgeo/eikonal.hpp"
#include "scatgeo/grid.hpp"
#include "scatgeo/partition.hpp"

using nlohmann::json;
using namespace scatgeo;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

void check_keys(const json& j, const std::set<std::string>& required,
                const std::set<std::string>& optional,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": object expected");
  for (const auto& [key, _] : j.items())
    if (!required.count(key) && !optional.count(key))
      throw ConfigError(where + ": unknown field '" + key + "'");
  for (const auto& key : required)
    if (!j.contains(key))
      throw ConfigError(where + ": missing field '" + key + "'");
}

MassSpec parse_masses(const json& j) {
  std::vector<double> m = j.get<std::vector<double>>();
  for (double v : m)
    if (!(v > 0)) throw ConfigError("masses must be positive");
  return MassSpec(std::move(m));
}

ClusterDecomposition parse_decomposition(const json& j, int n) {
  return ClusterDecomposition(j.get<std::vector<std::vector<int>>>(), n);
}

PotentialSpec parse_potentials(const json& j) {
  PotentialSpec spec;
  for (const auto& e : j) {
    check_keys(e, {"pair", "kind"}, {"c", "epsilon"}, "potentials[]");
    auto pair = e.at("pair").get<std::vector<int>>();
    if (pair.size() != 2) throw ConfigError("pair must be [i, j]");
    PairPotential p{PairIndex(pair[0], pair[1]), PotentialKind::zero, 0.0, 0.5};
    std::string kind = e.at("kind").get<std::string>();
    if (kind == "zero")
      p.kind = PotentialKind::zero;
    else if (kind == "long_range_power")
      p.kind = PotentialKind::long_range_power;
    else if (kind == "poschl_teller")
      p.kind = PotentialKind::poschl_teller;
    else
      throw ConfigError("unknown potential kind '" + kind + "'");
    p.c = e.value("c", 0.0);
    p.epsilon = e.value("epsilon", 0.5);
    if (p.kind == PotentialKind::long_range_power &&
        !(p.epsilon > 0.5 && p.epsilon <= 1.0))
      throw ConfigError("long_range_power epsilon must lie in (1/2, 1]");
    spec.entries.push_back(p);
  }
  return spec;
}

GridSpec parse_grid(const json& j) {
  check_keys(j, {"dim", "extent", "points"}, {}, "grid");
  return GridSpec(j.at("dim").get<int>(), j.at("extent").get<double>(),
                  j.at("points").get<int>());
}

// Flatten a JSON report into key,value CSV rows.
void flatten_csv(const json& j, const std::string& prefix,
                 std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      flatten_csv(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten_csv(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << "," << j.dump() << "\n";
  }
}

void write_report(const json& report, const std::string& out_dir,
                  const std::string& stem, const std::string& format) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path path =
      std::filesystem::path(out_dir) / (stem + "." + format);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write to " + path.string());
  if (format == "json") {
    out << report.dump(2) << "\n";
  } else {
    flatten_csv(report, "", out);
  }
  std::cout << "wrote " << path.string() << "\n";
}

struct Common {
  std::string config_path;
  std::string out_dir;
  std::string format = "json";
  std::int64_t seed_override = -1;
};

json load_config(const Common& c, const std::string& kind) {
  std::ifstream in(c.config_path);
  if (!in) throw ConfigError("cannot read config " + c.config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!cfg.is_object() || !cfg.contains("kind"))
    throw ConfigError("config must be an object with a 'kind' field");
  if (cfg.at("kind").get<std::string>() != kind)
    throw ConfigError("config kind '" + cfg.at("kind").get<std::string>() +
                      "' does not match subcommand '" + kind + "'");
  if (c.seed_override >= 0)
    cfg["seed"] = static_cast<std::uint64_t>(c.seed_override);
  return cfg;
}

// ---------------------------------------------------------------------------

int run_partition(const Common& c, const std::string& kind) {
  json cfg = load_config(c, kind);
  check_keys(cfg, {"kind", "n"}, {"seed", "masses", "nu", "samples"}, "config");
  int n = cfg.at("n").get<int>();
  std::vector<double> masses =
      cfg.value("masses", std::vector<double>(n, 1.0));
  if (static_cast<int>(masses.size()) != n)
    throw ConfigError("masses length must equal n");
  MassSpec mass = parse_masses(json(masses));
  int nu = cfg.value("nu", 1);
  int samples = cfg.value("samples", 10000);
  std::uint64_t seed = cfg.value("seed", std::uint64_t{42});
  std::string hash = fnv1a_hex(cfg.dump());

  PartitionConstants constants = select_constants(n);
  PartitionReport rep = verify_partition(mass, nu, constants, samples, seed);

  json full = json::parse(rep.to_json());
  json out;
  out["config_hash"] = hash;
  if (kind == "partition-verify") {
    out["report"] = full;
  } else {
    out["constants"] = full["constants"];
    out["samples"] = samples;
    out["seed"] = seed;
    out["covering_violations"] = full["violations"]["covering"];
    out["disjointness_violations"] = full["violations"]["disjointness"];
  }
  write_report(out, c.out_dir, kind, c.format);
  return 0;
}

int run_simulate(const Common& c) {
  json cfg = load_config(c, "simulate");
  check_keys(cfg,
             {"kind", "masses", "decomposition", "potentials", "grid",
              "initial", "dt", "steps"},
             {"seed", "record_every"}, "config");
  MassSpec mass = parse_masses(cfg.at("masses"));
  ClusterDecomposition b =
      parse_decomposition(cfg.at("decomposition"), mass.n_particles());
  JacobiFrame frame(mass, b, 1);
  PotentialSpec pot = parse_potentials(cfg.at("potentials"));
  GridSpec grid = parse_grid(cfg.at("grid"));
  const json& init = cfg.at("initial");
  check_keys(init, {"center", "width", "momentum"}, {}, "initial");
  double dt = cfg.at("dt").get<double>();
  int steps = cfg.at("steps").get<int>();
  int every = cfg.value("record_every", std::max(1, steps / 100));
  if (!(dt > 0) || steps < 1 || every < 1)
    throw ConfigError("dt > 0, steps >= 1, record_every >= 1 required");
  std::string hash = fnv1a_hex(cfg.dump());

  Propagator prop(grid, HamiltonianSpec{frame, pot});
  GridState psi = make_gaussian(grid, init.at("center").get<std::vector<double>>(),
                                init.at("width").get<std::vector<double>>(),
                                init.at("momentum").get<std::vector<double>>());

  auto ax = grid.axis();
  const int m = grid.points;
  auto moments = [&](const GridState& s) {
    std::vector<double> row;  // mean/var per axis
    double cell = std::pow(grid.spacing(), grid.dim);
    for (int axis = 0; axis < grid.dim; ++axis) {
      double w = 0, mean = 0, sq = 0;
      for (std::size_t i = 0; i < s.values.size(); ++i) {
        double x = (grid.dim == 1) ? ax[i]
                   : (axis == 0)   ? ax[i / m]
                                   : ax[i % m];
        double p = std::norm(s.values[i]) * cell;
        w += p;
        mean += p * x;
        sq += p * x * x;
      }
      mean /= w;
      row.push_back(mean);
      row.push_back(sq / w - mean * mean);
    }
    return row;
  };

  json series;
  series["time"] = json::array();
  series["norm_sq"] = json::array();
  series["energy"] = json::array();
  for (int axis = 0; axis < grid.dim; ++axis) {
    series["mean" + std::to_string(axis)] = json::array();
    series["var" + std::to_string(axis)] = json::array();
  }
  auto record = [&](double t) {
    series["time"].push_back(t);
    series["norm_sq"].push_back(psi.norm_sq());
    series["energy"].push_back(prop.energy(psi));
    auto row = moments(psi);
    for (int axis = 0; axis < grid.dim; ++axis) {
      series["mean" + std::to_string(axis)].push_back(row[2 * axis]);
      series["var" + std::to_string(axis)].push_back(row[2 * axis + 1]);
    }
  };
  record(0.0);
  for (int done = 0; done < steps;) {
    int chunk = std::min(every, steps - done);
    prop.propagate(psi, dt, chunk);
    done += chunk;
    record(done * dt);
  }

  if (c.format == "csv") {
    std::filesystem::create_directories(c.out_dir);
    auto path = std::filesystem::path(c.out_dir) / "simulate.csv";
    std::ofstream out(path);
    out << "# config_hash=" << hash << "\n";
    out << "time,norm_sq,energy";
    for (int axis = 0; axis < grid.dim; ++axis)
      out << ",mean" << axis << ",var" << axis;
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < series["time"].size(); ++i) {
      out << series["time"][i].get<double>() << ","
          << series["norm_sq"][i].get<double>() << ","
          << series["energy"][i].get<double>();
      for (int axis = 0; axis < grid.dim; ++axis)
        out << "," << series["mean" + std::to_string(axis)][i].get<double>()
            << "," << series["var" + std::to_string(axis)][i].get<double>();
      out << "\n";
    }
    std::cout << "wrote " << path.string() << "\n";
  } else {
    json out;
    out["config_hash"] = hash;
    out["series"] = series;
    write_report(out, c.out_dir, "simulate", "json");
  }
  return 0;
}

int run_channels(const Common& c) {
  json cfg = load_config(c, "channels");
  check_keys(cfg,
             {"kind", "masses", "decomposition", "potentials", "grid",
              "initial", "sigma", "delta", "r", "time", "dt"},
             {"seed", "mollify_spacings"}, "config");
  MassSpec mass = parse_masses(cfg.at("masses"));
  ClusterDecomposition b =
      parse_decomposition(cfg.at("decomposition"), mass.n_particles());
  JacobiFrame frame(mass, b, 1);
  PotentialSpec pot = parse_potentials(cfg.at("potentials"));
  GridSpec grid = parse_grid(cfg.at("grid"));
  std::string hash = fnv1a_hex(cfg.dump());

  Propagator prop(grid, HamiltonianSpec{frame, pot});
  const json& init = cfg.at("initial");
  GridState psi(grid);
  std::string type = init.value("type", "gaussian");
  if (type == "gaussian") {
    check_keys(init, {"center", "width", "momentum"}, {"type"}, "initial");
    psi = make_gaussian(grid, init.at("center").get<std::vector<double>>(),
                        init.at("width").get<std::vector<double>>(),
                        init.at("momentum").get<std::vector<double>>());
  } else if (type == "channel") {
    check_keys(init,
               {"type", "pair", "packet_center", "packet_width",
                "packet_velocity"},
               {"bound_index"}, "initial");
    auto pair = init.at("pair").get<std::vector<int>>();
    if (pair.size() != 2) throw ConfigError("initial.pair must be [i, j]");
    psi = make_channel_state(prop, PairIndex(pair[0], pair[1]),
                             init.value("bound_index", 0),
                             init.at("packet_center").get<double>(),
                             init.at("packet_width").get<double>(),
                             init.at("packet_velocity").get<double>());
  } else {
    throw ConfigError("initial.type must be 'gaussian' or 'channel'");
  }

  ChannelReport rep = channel_decomposition(
      psi, prop, cfg.at("sigma").get<double>(), cfg.at("delta").get<double>(),
      cfg.at("r").get<double>(), cfg.at("time").get<double>(),
      cfg.at("dt").get<double>(), cfg.value("mollify_spacings", 5.0));
  json out;
  out["config_hash"] = hash;
  out["report"] = json::parse(rep.to_json());
  write_report(out, c.out_dir, "channels", c.format);
  return 0;
}

double auto_r0(double cc, double eps, double d) {
  double r0 = 2.0;
  while (cc * std::pow(1.0 + r0 * r0, -eps / 2.0) / d >= 0.1 && r0 < 1 << 20)
    r0 *= 2.0;
  return r0;
}

int run_eikonal(const Common& c) {
  json cfg = load_config(c, "eikonal");
  check_keys(cfg, {"kind", "c", "epsilon"},
             {"seed", "theta", "d", "r0", "depth", "shells", "z_lo", "z_hi",
              "xi"},
             "config");
  LongRangeTail tail{cfg.at("c").get<double>(),
                     cfg.at("epsilon").get<double>()};
  PhaseParams params;
  params.theta = cfg.value("theta", 0.5);
  params.d = cfg.value("d", 0.5);
  params.r0 = cfg.contains("r0") ? cfg.at("r0").get<double>()
                                 : auto_r0(tail.c, tail.epsilon, params.d);
  params.depth = cfg.value("depth", 2);
  double z_lo = cfg.value("z_lo", 2.0 * params.r0);
  double z_hi = cfg.value("z_hi", 100.0 * params.r0);
  int shells = cfg.value("shells", 6);
  std::vector<double> xi = cfg.value(
      "xi", std::vector<double>{params.d, 1.0, 2.0, 3.0});
  std::string hash = fnv1a_hex(cfg.dump());

  PhaseFunction phase(tail, params);
  json out;
  out["config_hash"] = hash;
  out["params"] = {{"c", tail.c},       {"epsilon", tail.epsilon},
                   {"theta", params.theta}, {"d", params.d},
                   {"r0", params.r0},   {"depth", params.depth}};
  out["phase_deviation"] =
      json::parse(phase_deviation_decay(phase, z_lo, z_hi, shells, xi).to_json());
  out["correction_derivative"] = json::parse(
      correction_derivative_decay(phase, z_lo, z_hi, shells, xi).to_json());
  out["residual"] =
      json::parse(residual_decay(phase, z_lo, z_hi, shells, xi).to_json());
  write_report(out, c.out_dir, "eikonal", c.format);
  return 0;
}

int run_probe(const Common& c) {
  json cfg = load_config(c, "probe");
  check_keys(cfg,
             {"kind", "c", "epsilon", "grid", "packet", "schedule", "dt"},
             {"seed", "theta", "d", "r0", "depth", "masses", "loc_sigma",
              "modified"},
             "config");
  LongRangeTail tail{cfg.at("c").get<double>(),
                     cfg.at("epsilon").get<double>()};
  PhaseParams params;
  params.theta = cfg.value("theta", 0.5);
  params.d = cfg.value("d", 0.5);
  params.r0 = cfg.value("r0", 8.0);
  params.depth = cfg.value("depth", 2);
  GridSpec grid = parse_grid(cfg.at("grid"));
  if (grid.dim != 1) throw ConfigError("probe: grid.dim must be 1");
  std::vector<double> masses =
      cfg.value("masses", std::vector<double>{2.0, 2.0});
  MassSpec mass = parse_masses(json(masses));
  if (mass.n_particles() != 2)
    throw ConfigError("probe: two clusters expected");
  ClusterDecomposition b({{1}, {2}}, 2);
  JacobiFrame frame(mass, b, 1);
  if (std::abs(frame.weights()(0) - 1.0) > 1e-12)
    throw ConfigError(
        "probe: reduced mass must be 1 (phase assumes unit mass)");
  const json& packet = cfg.at("packet");
  check_keys(packet, {"center", "width", "momentum"}, {}, "packet");
  std::string hash = fnv1a_hex(cfg.dump());

  PotentialSpec pot{{{PairIndex(1, 2), PotentialKind::long_range_power, tail.c,
                      tail.epsilon}}};
  Propagator full(grid, HamiltonianSpec{frame, pot});
  Propagator free_prop(grid, HamiltonianSpec{frame, PotentialSpec{}});
  GridState psi = make_gaussian(grid, {packet.at("center").get<double>()},
                                {packet.at("width").get<double>()},
                                {packet.at("momentum").get<double>()});

  PhaseFunction phase(tail, params);
  std::unique_ptr<Modifier> mod;
  if (cfg.value("modified", true))
    mod = std::make_unique<Modifier>(phase, grid);
  ProbeReport rep = wave_operator_probe(
      psi, full, free_prop, mod.get(),
      cfg.at("schedule").get<std::vector<double>>(),
      cfg.at("dt").get<double>(), cfg.value("loc_sigma", 0.25));
  json out;
  out["config_hash"] = hash;
  out["params"] = {{"c", tail.c},       {"epsilon", tail.epsilon},
                   {"theta", params.theta}, {"d", params.d},
                   {"r0", params.r0},   {"depth", params.depth}};
  out["report"] = json::parse(rep.to_json());
  write_report(out, c.out_dir, "probe", c.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scattering-geometry experiment driver"};
  app.require_subcommand(1);

  Common common;
  std::string chosen;
  for (const char* name : {"partition-verify", "lemma31", "simulate",
                           "channels", "eikonal", "probe"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", common.config_path, "config file (JSON)")
        ->required();
    sub->add_option("--out", common.out_dir, "output directory")->required();
    sub->add_option("--seed", common.seed_override, "seed override");
    sub->add_option("--format", common.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (chosen == "partition-verify" || chosen == "lemma31")
      return run_partition(common, chosen);
    if (chosen == "simulate") return run_simulate(common);
    if (chosen == "channels") return run_channels(common);
    if (chosen == "eikonal") return run_eikonal(common);
    if (chosen == "probe") return run_probe(common);
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"detail", e.what()}}.dump()
              << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "parameter"}, {"detail", e.what()}}.dump()
              << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << json{{"error", "config"}, {"detail", e.what()}}.dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "numeric"}, {"detail", e.what()}}.dump()
              << "\n";
    return 3;
  }
  return 2;
}
