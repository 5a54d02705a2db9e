// Command-line laboratory around the emden headers: derived constants,
// closed-form families, trajectory integration, conserved-quantity reports,
// singularity classification, parameter sweeps, and residual spot checks.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "emden/emden.hpp"

namespace {

using emden::json;
using emden::Vec;

struct OutputTarget {
  std::string path;  // empty: stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) emden::fail(emden::ErrorCode::ConfigError, "cannot open output file", path);
    os << text;
  }
};

std::string dump_result(const emden::ProblemParams& p, const std::string& canonical,
                        const json& result) {
  const json doc{{"header", emden::header_object(p, canonical)}, {"result", result}};
  return doc.dump(2) + "\n";
}

Vec default_direction(int m) {
  Vec e(m, 0.0);
  e[0] = 1.0;
  return e;
}

std::vector<double> geometric_radii(double lo, double hi, int samples) {
  if (!(lo > 0.0) || !(hi > lo) || samples < 2)
    emden::fail(emden::ErrorCode::ConfigError, "radial sampling needs 0 < lo < hi and >= 2 samples");
  std::vector<double> out(samples);
  const double ratio = std::pow(hi / lo, 1.0 / (samples - 1));
  for (int i = 0; i < samples; ++i) out[i] = lo * std::pow(ratio, i);
  return out;
}

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int count = 0;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char colon1 = 0, colon2 = 0;
  std::istringstream is(text);
  if (!(is >> g.lo >> colon1 >> g.hi >> colon2 >> g.count) || colon1 != ':' ||
      colon2 != ':' || g.count < 1)
    emden::fail(emden::ErrorCode::UsageError, "grid must be lo:hi:count with count >= 1",
                text);
  return g;
}

double grid_value(const GridSpec& g, int i) {
  if (g.count == 1) return g.lo;
  return g.lo + (g.hi - g.lo) * double(i) / double(g.count - 1);
}

// ---------------------------------------------------------------------------
// shared option bags

struct ParamsOpts {
  int n = 3, m = 1;
  double alpha = 2.0;
};

void add_params(CLI::App* cmd, ParamsOpts& o, bool need_alpha = true) {
  cmd->add_option("--n", o.n, "space dimension (>= 3)");
  cmd->add_option("--m", o.m, "number of components");
  auto* a = cmd->add_option("--alpha", o.alpha, "nonlinearity exponent");
  if (!need_alpha) a->capture_default_str();
}

json params_json(const emden::ProblemParams& p) {
  return json{{"n", p.n}, {"m", p.m}, {"alpha", p.alpha}};
}

// ---------------------------------------------------------------------------
// subcommand runners

int run_constants(const ParamsOpts& po, const OutputTarget& out) {
  emden::ProblemParams p{po.n, po.m, po.alpha};
  emden::validate(p);
  const auto c = emden::derive_constants(p);
  const std::string canonical =
      json{{"command", "constants"}, {"options", params_json(p)}}.dump();
  out.write(dump_result(p, canonical, emden::to_json(p, c)));
  return 0;
}

struct FamilyOpts {
  std::string family;
  ParamsOpts po;
  Vec e;                      // direction, defaults to the first axis
  Vec center;                 // bubble only
  double scale = 1.0;         // bubble only
  double kappa = 0.0, kappa_star = -0.01;
  double t0 = 0.0, span = 50.0, h = 1e-3;
  double r_lo = 1e-2, r_hi = 1.0;
  int samples = 50;
};

void add_family_options(CLI::App* cmd, FamilyOpts& o) {
  cmd->add_option("--family", o.family,
                  "bubble | homogeneous | critical-homogeneous | fowler | spiral")
      ->required();
  add_params(cmd, o.po);
  cmd->add_option("--e", o.e, "unit direction in component space")->delimiter(',');
  cmd->add_option("--center", o.center, "bubble center")->delimiter(',');
  cmd->add_option("--scale", o.scale, "bubble scale parameter");
  cmd->add_option("--kappa", o.kappa, "first invariant (fowler/spiral)");
  cmd->add_option("--kappa-star", o.kappa_star, "second invariant (fowler/spiral)");
  cmd->add_option("--t0", o.t0, "initial time (fowler/spiral)");
  cmd->add_option("--span", o.span, "integration span (fowler/spiral)");
  cmd->add_option("--step", o.h, "step size (fowler/spiral)");
  cmd->add_option("--r-lo", o.r_lo, "smallest sampling radius");
  cmd->add_option("--r-hi", o.r_hi, "largest sampling radius");
  cmd->add_option("--samples", o.samples, "number of radial samples");
}

emden::FieldEvaluator build_closed_form_family(const FamilyOpts& o,
                                               emden::ProblemParams& p_out) {
  const Vec e = o.e.empty() ? default_direction(o.po.m) : o.e;
  if (o.family == "bubble") {
    Vec z = o.center.empty() ? Vec(o.po.n, 0.0) : o.center;
    auto u = emden::bubble(o.po.n, o.po.m, z, o.scale, e);
    p_out = u.params;
    return u;
  }
  if (o.family == "homogeneous") {
    emden::ProblemParams p{o.po.n, o.po.m, o.po.alpha};
    auto u = emden::homogeneous_singular(p, e);
    p_out = u.params;
    return u;
  }
  if (o.family == "critical-homogeneous") {
    auto u = emden::critical_homogeneous(o.po.n, o.po.m, e);
    p_out = u.params;
    return u;
  }
  emden::fail(emden::ErrorCode::UsageError, "unknown closed-form family", o.family);
}

json family_options_json(const FamilyOpts& o) {
  json j{{"family", o.family}, {"n", o.po.n}, {"m", o.po.m}};
  if (o.family == "homogeneous") j["alpha"] = o.po.alpha;
  if (o.family == "bubble") {
    j["center"] = o.center.empty() ? Vec(o.po.n, 0.0) : o.center;
    j["scale"] = o.scale;
  }
  if (o.family == "fowler" || o.family == "spiral") {
    j["kappa"] = o.kappa;
    j["kappa_star"] = o.kappa_star;
    j["t0"] = o.t0;
    j["span"] = o.span;
    j["step"] = o.h;
  } else {
    j["e"] = o.e.empty() ? default_direction(o.po.m) : o.e;
    j["r_lo"] = o.r_lo;
    j["r_hi"] = o.r_hi;
    j["samples"] = o.samples;
  }
  return j;
}

int run_family(const FamilyOpts& o, const OutputTarget& out) {
  const std::string canonical =
      json{{"command", "family"}, {"options", family_options_json(o)}}.dump();
  std::ostringstream os;
  if (o.family == "fowler") {
    auto data = emden::fowler_roots(o.po.n, o.kappa, o.kappa_star);
    if (!data)
      emden::fail(emden::ErrorCode::RangeError,
                  "no oscillatory orbit exists for this invariant pair");
    auto traj = emden::fowler_orbit(*data, o.t0, o.span, o.h);
    os << emden::csv_header_line(traj.params, canonical) << "\n";
    os << "# rho_min=" << emden::g17(data->rho_min)
       << " rho_max=" << emden::g17(data->rho_max)
       << " period=" << emden::g17(data->period) << "\n";
    std::ostringstream body;
    emden::write_trajectory_csv(body, traj, canonical);
    const std::string b = body.str();
    os << b.substr(b.find('\n') + 1);  // body minus its duplicate header line
    out.write(os.str());
    return 0;
  }
  if (o.family == "spiral") {
    auto sp = emden::spiral(o.po.n, o.kappa, o.kappa_star, o.t0, o.span, o.h);
    os << emden::csv_header_line(sp.trajectory.params, canonical) << "\n";
    os << "# rho_min=" << emden::g17(sp.data.rho_min)
       << " rho_max=" << emden::g17(sp.data.rho_max)
       << " period=" << emden::g17(sp.data.period)
       << " k_1_2=" << emden::g17(sp.k12) << "\n";
    std::ostringstream body;
    emden::write_trajectory_csv(body, sp.trajectory, canonical);
    const std::string b = body.str();
    os << b.substr(b.find('\n') + 1);
    out.write(os.str());
    return 0;
  }
  emden::ProblemParams p;
  auto u = build_closed_form_family(o, p);
  emden::write_field_csv(os, u, geometric_radii(o.r_lo, o.r_hi, o.samples), canonical);
  out.write(os.str());
  return 0;
}

struct SimulateOpts {
  ParamsOpts po;
  Vec v0, dv0;
  double t0 = 0.0, span = 50.0, h = 1e-3;
  std::string system = "cylindrical";
};

void add_simulate_options(CLI::App* cmd, SimulateOpts& o) {
  add_params(cmd, o.po);
  cmd->add_option("--v0", o.v0, "initial value, comma-separated")->delimiter(',');
  cmd->add_option("--dv0", o.dv0, "initial derivative, comma-separated")->delimiter(',');
  cmd->add_option("--t0", o.t0, "initial time");
  cmd->add_option("--span", o.span, "integration span");
  cmd->add_option("--step", o.h, "step size");
  cmd->add_option("--system", o.system, "cylindrical | lower-critical")
      ->check(CLI::IsMember({"cylindrical", "lower-critical"}));
}

emden::RadialTrajectory run_simulation(const SimulateOpts& o) {
  Vec v0 = o.v0.empty() ? Vec(o.po.m, 1.0) : o.v0;
  Vec dv0 = o.dv0.empty() ? Vec(o.po.m, 0.0) : o.dv0;
  if (o.system == "lower-critical") {
    const double t0 = (o.t0 == 0.0) ? 10.0 : o.t0;  // flow starts past its threshold
    return emden::integrate_lower_critical(o.po.n, o.po.m, v0, dv0, t0, t0 + o.span,
                                           o.h);
  }
  emden::ProblemParams p{o.po.n, o.po.m, o.po.alpha};
  emden::validate(p);
  return emden::integrate_radial(p, v0, dv0, o.t0, o.t0 + o.span, o.h);
}

json simulate_options_json(const SimulateOpts& o) {
  return json{{"n", o.po.n},
              {"m", o.po.m},
              {"alpha", o.po.alpha},
              {"v0", o.v0.empty() ? Vec(o.po.m, 1.0) : o.v0},
              {"dv0", o.dv0.empty() ? Vec(o.po.m, 0.0) : o.dv0},
              {"t0", o.t0},
              {"span", o.span},
              {"step", o.h},
              {"system", o.system}};
}

int run_simulate(const SimulateOpts& o, const OutputTarget& out) {
  const std::string canonical =
      json{{"command", "simulate"}, {"options", simulate_options_json(o)}}.dump();
  auto traj = run_simulation(o);
  std::ostringstream os;
  emden::write_trajectory_csv(os, traj, canonical);
  out.write(os.str());
  if (traj.negative_warning)
    std::cerr << "warning: a component dipped below zero during integration\n";
  return 0;
}

struct InvariantsOpts {
  SimulateOpts sim;
  std::string family;  // optional: spiral | fowler
  double kappa = 0.0, kappa_star = -0.01;
  std::string drift_csv;
};

int run_invariants(const InvariantsOpts& o, const OutputTarget& out) {
  emden::RadialTrajectory traj;
  json options;
  if (o.family == "spiral" || o.family == "fowler") {
    options = json{{"family", o.family},   {"n", o.sim.po.n},
                   {"kappa", o.kappa},     {"kappa_star", o.kappa_star},
                   {"t0", o.sim.t0},       {"span", o.sim.span},
                   {"step", o.sim.h}};
    if (o.family == "spiral") {
      traj = emden::spiral(o.sim.po.n, o.kappa, o.kappa_star, o.sim.t0, o.sim.span,
                           o.sim.h)
                 .trajectory;
    } else {
      auto data = emden::fowler_roots(o.sim.po.n, o.kappa, o.kappa_star);
      if (!data)
        emden::fail(emden::ErrorCode::RangeError,
                    "no oscillatory orbit exists for this invariant pair");
      traj = emden::fowler_orbit(*data, o.sim.t0, o.sim.span, o.sim.h);
    }
  } else if (o.family.empty()) {
    options = simulate_options_json(o.sim);
    traj = run_simulation(o.sim);
  } else {
    emden::fail(emden::ErrorCode::UsageError,
                "invariants accepts --family spiral or fowler, or raw initial data",
                o.family);
  }
  const std::string canonical =
      json{{"command", "invariants"}, {"options", options}}.dump();
  const auto rep = emden::kappa_of(traj);
  out.write(dump_result(traj.params, canonical, emden::to_json(rep)));
  if (!o.drift_csv.empty()) {
    std::ofstream fs(o.drift_csv, std::ios::binary);
    if (!fs)
      emden::fail(emden::ErrorCode::ConfigError, "cannot open drift output", o.drift_csv);
    emden::write_drift_csv(fs, traj, rep.kappa, canonical);
  }
  return 0;
}

struct ClassifyOpts {
  ParamsOpts po;
  bool alpha_given = false;
  std::optional<double> kappa, kappa_star, phi_limit, amplitude, terminal_energy;
  bool zero = false;
  double tol = emden::kDefaultClassifyTol;
};

int run_classify(const ClassifyOpts& o, const OutputTarget& out) {
  emden::Evidence ev;
  ev.zero_field = o.zero;
  ev.tol = o.tol;
  double alpha = o.po.alpha;
  if (o.kappa || o.kappa_star) {
    if (!(o.kappa && o.kappa_star))
      emden::fail(emden::ErrorCode::UsageError,
                  "--kappa and --kappa-star must be given together");
    ev.invariant_pair = std::make_pair(*o.kappa, *o.kappa_star);
    if (!o.alpha_given) alpha = emden::sobolev_exponent(o.po.n);
  } else if (o.phi_limit) {
    ev.phi_limit = o.phi_limit;
    if (!o.alpha_given)
      emden::fail(emden::ErrorCode::UsageError, "--phi-limit needs an explicit --alpha");
  } else if (o.amplitude) {
    ev.fitted_amplitude = o.amplitude;
    if (!o.alpha_given)
      emden::fail(emden::ErrorCode::UsageError, "--amplitude needs an explicit --alpha");
  } else if (o.terminal_energy) {
    ev.terminal_energy = o.terminal_energy;
    if (!o.alpha_given) alpha = emden::serrin_exponent(o.po.n);
  } else if (!o.zero) {
    emden::fail(emden::ErrorCode::UsageError,
                "classify needs evidence: --kappa/--kappa-star, --phi-limit, "
                "--amplitude, --terminal-e, or --zero");
  }

  emden::ProblemParams p{o.po.n, o.po.m, alpha};
  emden::validate(p);
  json options = params_json(p);
  options["tol"] = o.tol;
  if (ev.invariant_pair) {
    options["kappa"] = ev.invariant_pair->first;
    options["kappa_star"] = ev.invariant_pair->second;
  }
  if (ev.phi_limit) options["phi_limit"] = *ev.phi_limit;
  if (ev.fitted_amplitude) options["amplitude"] = *ev.fitted_amplitude;
  if (ev.terminal_energy) options["terminal_e"] = *ev.terminal_energy;
  if (ev.zero_field) options["zero"] = true;
  const std::string canonical =
      json{{"command", "classify"}, {"options", options}}.dump();

  const auto cls = emden::classify_by_regime(p, ev);
  out.write(dump_result(p, canonical, emden::to_json(cls)));
  return 0;
}

struct SweepOpts {
  ParamsOpts po;
  std::string grid = "kappa-star";  // kappa-star | kappa | alpha
  std::string range;                // lo:hi:count
  double kappa = 0.0, kappa_star = -0.01;
  double tol = emden::kDefaultClassifyTol;
  int jobs = 1;
};

int run_sweep(const SweepOpts& o, const OutputTarget& out) {
  const GridSpec grid = parse_grid(o.range);
  if (o.jobs < 1)
    emden::fail(emden::ErrorCode::UsageError, "--jobs must be at least 1");

  // jobs is an execution knob, not part of the scientific configuration:
  // the emitted bytes must not depend on the worker count
  json options{{"grid", o.grid}, {"range", o.range}, {"n", o.po.n}, {"tol", o.tol}};
  emden::ProblemParams header_params{o.po.n, o.po.m,
                                     emden::sobolev_exponent(o.po.n)};
  if (o.grid == "kappa-star") {
    options["kappa"] = o.kappa;
  } else if (o.grid == "kappa") {
    options["kappa_star"] = o.kappa_star;
  } else if (o.grid == "alpha") {
    header_params.alpha = grid_value(grid, 0);
  } else {
    emden::fail(emden::ErrorCode::UsageError, "grid must be kappa-star, kappa, or alpha",
                o.grid);
  }
  const std::string canonical = json{{"command", "sweep"}, {"options", options}}.dump();

  auto cell = [&](int i) -> json {
    const double x = grid_value(grid, i);
    json line{{"index", i}};
    try {
      if (o.grid == "alpha") {
        emden::ProblemParams p{o.po.n, o.po.m, x};
        emden::validate(p);
        line["alpha"] = x;
        line["constants"] = emden::to_json(p, emden::derive_constants(p));
        return line;
      }
      const double kappa = (o.grid == "kappa") ? x : o.kappa;
      const double kappa_star = (o.grid == "kappa-star") ? x : o.kappa_star;
      line["kappa"] = kappa;
      line["kappa_star"] = kappa_star;
      const auto cls = emden::classify_critical(kappa, kappa_star, o.po.n, o.tol);
      line["class"] = emden::to_json(cls);
      if (auto data = emden::fowler_roots(o.po.n, kappa, std::min(kappa_star, 0.0))) {
        line["oscillatory"] = true;
        line["rho_min"] = data->rho_min;
        line["rho_max"] = data->rho_max;
        line["period"] = data->period;
      } else {
        line["oscillatory"] = false;
      }
    } catch (const emden::Error& e) {
      line["error"] = emden::error_json(e);
    }
    return line;
  };

  std::vector<std::string> lines(std::size_t(grid.count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < grid.count; i = next.fetch_add(1))
      lines[std::size_t(i)] = cell(i).dump();
  };
  if (o.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < o.jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::ostringstream os;
  os << emden::header_object(header_params, canonical).dump() << "\n";
  for (const auto& line : lines) os << line << "\n";
  out.write(os.str());
  return 0;
}

struct ResidualOpts {
  FamilyOpts fam;
  int samples = 100;
  std::uint64_t seed = 12345;
  double r_lo = 0.5, r_hi = 1.5;
  double fd_h = 1e-2;
};

int run_residual_check(const ResidualOpts& o, const OutputTarget& out) {
  emden::ProblemParams p;
  auto u = build_closed_form_family(o.fam, p);

  json options = family_options_json(o.fam);
  options["samples"] = o.samples;
  options["seed"] = o.seed;
  options["r_lo"] = o.r_lo;
  options["r_hi"] = o.r_hi;
  options["fd_h"] = o.fd_h;
  const std::string canonical =
      json{{"command", "residual-check"}, {"options", options}}.dump();

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(o.r_lo, o.r_hi);

  double max_rel = 0.0, sum_rel = 0.0;
  for (int s = 0; s < o.samples; ++s) {
    Vec x(p.n);
    double nr = 0.0;
    do {
      for (double& c : x) c = gauss(rng);
      nr = emden::norm(x);
    } while (nr < 1e-12);
    const double r = radius(rng);
    for (double& c : x) c *= r / nr;

    const Vec defect = emden::residual(u, x, o.fd_h);
    const Vec rhs = emden::power_nonlinearity(u.at(x), p.alpha);
    const double scale = std::max(emden::norm(rhs), 1e-300);
    const double rel = emden::norm(defect) / scale;
    max_rel = std::max(max_rel, rel);
    sum_rel += rel;
  }

  const json result{{"family", o.fam.family},
                    {"samples", o.samples},
                    {"seed", o.seed},
                    {"max_rel", max_rel},
                    {"mean_rel", sum_rel / o.samples}};
  out.write(dump_result(p, canonical, result));
  return 0;
}

// ---------------------------------------------------------------------------
// --config translation: a JSON document {"command": ..., "options": {...}}
// becomes the equivalent flag vector and goes through the same parser.

std::vector<std::string> args_from_config(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    emden::fail(emden::ErrorCode::UsageError, "cannot read config file", path);
  json doc;
  try {
    is >> doc;
  } catch (const std::exception& e) {
    emden::fail(emden::ErrorCode::UsageError, "config file is not valid JSON", e.what());
  }
  if (!doc.is_object() || !doc.contains("command") || !doc["command"].is_string())
    emden::fail(emden::ErrorCode::UsageError, "config needs a string \"command\" field");

  std::vector<std::string> args{doc["command"].get<std::string>()};
  const json options = doc.value("options", json::object());
  if (!options.is_object())
    emden::fail(emden::ErrorCode::UsageError, "config \"options\" must be an object");
  for (auto it = options.begin(); it != options.end(); ++it) {
    std::string flag = "--" + it.key();
    for (char& c : flag)
      if (c == '_') c = '-';
    const json& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    if (v.is_array()) {
      std::string joined;
      for (const auto& el : v) {
        if (!joined.empty()) joined += ",";
        joined += el.is_number() ? emden::g17(el.get<double>()) : el.get<std::string>();
      }
      args.push_back(joined);
    } else if (v.is_number_integer()) {
      args.push_back(std::to_string(v.get<long long>()));
    } else if (v.is_number()) {
      args.push_back(emden::g17(v.get<double>()));
    } else {
      args.push_back(v.get<std::string>());
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for a semilinear elliptic system in "
               "cylindrical coordinates"};
  app.set_version_flag("--version", emden::kVersion);
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON file with {command, options}");

  OutputTarget out;
  app.add_option("--out,-o", out.path, "output file (default: stdout)")
      ->configurable(false);

  ParamsOpts constants_opts;
  auto* c_cmd = app.add_subcommand("constants", "derived constants for (n, alpha)");
  add_params(c_cmd, constants_opts);

  FamilyOpts family_opts;
  auto* f_cmd = app.add_subcommand("family", "sample a closed-form solution family");
  add_family_options(f_cmd, family_opts);

  SimulateOpts sim_opts;
  auto* s_cmd = app.add_subcommand("simulate", "integrate a radial trajectory");
  add_simulate_options(s_cmd, sim_opts);

  InvariantsOpts inv_opts;
  auto* i_cmd = app.add_subcommand("invariants", "measure conserved quantities");
  add_simulate_options(i_cmd, inv_opts.sim);
  i_cmd->add_option("--family", inv_opts.family, "spiral | fowler (instead of raw data)");
  i_cmd->add_option("--kappa", inv_opts.kappa, "first invariant for --family");
  i_cmd->add_option("--kappa-star", inv_opts.kappa_star, "second invariant for --family");
  i_cmd->add_option("--drift-csv", inv_opts.drift_csv, "also write the drift series");

  ClassifyOpts cls_opts;
  auto* k_cmd = app.add_subcommand("classify", "tag a singularity from evidence");
  add_params(k_cmd, cls_opts.po);
  double kappa_in = 0.0, kstar_in = 0.0, phi_in = 0.0, amp_in = 0.0, te_in = 0.0;
  auto* kap = k_cmd->add_option("--kappa", kappa_in, "measured first invariant");
  auto* kst = k_cmd->add_option("--kappa-star", kstar_in, "measured second invariant");
  auto* phl = k_cmd->add_option("--phi-limit", phi_in, "surface-energy limit at 0");
  auto* amp = k_cmd->add_option("--amplitude", amp_in, "fitted amplitude at 2-n");
  auto* ten = k_cmd->add_option("--terminal-e", te_in, "terminal monotone energy");
  k_cmd->add_flag("--zero", cls_opts.zero, "the field is identically zero");
  k_cmd->add_option("--tol", cls_opts.tol, "decision tolerance");

  SweepOpts sweep_opts;
  auto* w_cmd = app.add_subcommand("sweep", "grid scan over invariants or alpha");
  w_cmd->add_option("--n", sweep_opts.po.n, "space dimension");
  w_cmd->add_option("--m", sweep_opts.po.m, "number of components");
  w_cmd->add_option("--grid", sweep_opts.grid, "kappa-star | kappa | alpha");
  w_cmd->add_option("--range", sweep_opts.range, "lo:hi:count")->required();
  w_cmd->add_option("--kappa", sweep_opts.kappa, "fixed first invariant");
  w_cmd->add_option("--kappa-star", sweep_opts.kappa_star, "fixed second invariant");
  w_cmd->add_option("--tol", sweep_opts.tol, "classification tolerance");
  w_cmd->add_option("--jobs", sweep_opts.jobs, "worker threads");

  ResidualOpts res_opts;
  auto* r_cmd = app.add_subcommand("residual-check",
                                   "finite-difference residual at random points");
  add_family_options(r_cmd, res_opts.fam);
  r_cmd->add_option("--check-samples", res_opts.samples, "number of random points");
  r_cmd->add_option("--seed", res_opts.seed, "random seed");
  r_cmd->add_option("--annulus-lo", res_opts.r_lo, "inner sampling radius");
  r_cmd->add_option("--annulus-hi", res_opts.r_hi, "outer sampling radius");
  r_cmd->add_option("--fd-h", res_opts.fd_h, "finite-difference step");

  // let --out and --config written after a subcommand reach the main app
  for (CLI::App* sub : {c_cmd, f_cmd, s_cmd, i_cmd, k_cmd, w_cmd, r_cmd})
    sub->fallthrough();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      emden::fail(emden::ErrorCode::UsageError, e.what());
    }

    if (!config_path.empty()) {
      // re-enter this same parser with the flag vector from the file
      std::string joined;
      for (const auto& a : args_from_config(config_path)) {
        if (!joined.empty()) joined += ' ';
        joined += a;
      }
      try {
        app.clear();
        app.parse(joined);
      } catch (const CLI::ParseError& e) {
        emden::fail(emden::ErrorCode::UsageError, e.what());
      }
    }

    cls_opts.alpha_given = k_cmd->count("--alpha") > 0;
    if (kap->count()) cls_opts.kappa = kappa_in;
    if (kst->count()) cls_opts.kappa_star = kstar_in;
    if (phl->count()) cls_opts.phi_limit = phi_in;
    if (amp->count()) cls_opts.amplitude = amp_in;
    if (ten->count()) cls_opts.terminal_energy = te_in;

    if (c_cmd->parsed()) return run_constants(constants_opts, out);
    if (f_cmd->parsed()) return run_family(family_opts, out);
    if (s_cmd->parsed()) return run_simulate(sim_opts, out);
    if (i_cmd->parsed()) return run_invariants(inv_opts, out);
    if (k_cmd->parsed()) return run_classify(cls_opts, out);
    if (w_cmd->parsed()) return run_sweep(sweep_opts, out);
    if (r_cmd->parsed()) return run_residual_check(res_opts, out);
    emden::fail(emden::ErrorCode::UsageError, "a subcommand is required; see --help");
  } catch (const emden::Error& e) {
    std::cerr << emden::error_json(e).dump() << "\n";
    return e.exit_status();
  } catch (const std::exception& e) {
    std::cerr << emden::error_json(emden::Error(emden::ErrorCode::NumericError, e.what()))
                     .dump()
              << "\n";
    return 1;
  }
  return 0;
}
