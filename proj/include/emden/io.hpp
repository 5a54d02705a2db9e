#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "emden/classify.hpp"
#include "emden/dynamics.hpp"
#include "emden/field.hpp"
#include "emden/invariants.hpp"
#include "emden/params.hpp"

namespace emden {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

// Shortest round-trip-exact decimal form; fixed format keeps repeated runs
// byte-identical.
inline std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(std::string_view canonical_config) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_config)));
  return buf;
}

// Every artifact opens with this header so a result can be traced back to
// the exact configuration that produced it.
inline json header_object(const ProblemParams& p, std::string_view canonical_config) {
  return json{{"config_hash", config_hash(canonical_config)},
              {"version", kVersion},
              {"regime", to_string(regime_of(p))}};
}

inline std::string csv_header_line(const ProblemParams& p,
                                   std::string_view canonical_config) {
  return std::string("# config=") + config_hash(canonical_config) +
         " version=" + kVersion + " regime=" + to_string(regime_of(p));
}

inline void write_trajectory_csv(std::ostream& os, const RadialTrajectory& traj,
                                 std::string_view canonical_config) {
  os << csv_header_line(traj.params, canonical_config) << "\n";
  os << "t";
  for (int i = 1; i <= traj.params.m; ++i) os << ",v_" << i;
  for (int i = 1; i <= traj.params.m; ++i) os << ",dv_" << i;
  os << "\n";
  for (const auto& s : traj.states) {
    os << g17(s.t);
    for (double v : s.v) os << "," << g17(v);
    for (double v : s.dv) os << "," << g17(v);
    os << "\n";
  }
}

// Conserved-quantity series along a critical trajectory: psi, psi* (using
// the supplied kappa), and each angular momentum.
inline void write_drift_csv(std::ostream& os, const RadialTrajectory& traj,
                            double kappa, std::string_view canonical_config) {
  const DerivedConstants c = derive_constants(traj.params);
  const int m = traj.params.m, n = traj.params.n;
  os << csv_header_line(traj.params, canonical_config) << "\n";
  os << "t,psi,psi_star";
  for (int i = 1; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) os << ",k_" << i << "_" << j;
  os << "\n";
  for (const auto& s : traj.states) {
    os << g17(s.t) << "," << g17(psi_value(traj.params, c, s.v, s.dv)) << ","
       << g17(psi_star_value(n, kappa, s.v, s.dv));
    for (double k : angular_momenta_at(s)) os << "," << g17(k);
    os << "\n";
  }
}

// Radial samples of a field along the first coordinate axis.
inline void write_field_csv(std::ostream& os, const FieldEvaluator& u,
                            const std::vector<double>& radii,
                            std::string_view canonical_config) {
  os << csv_header_line(u.params, canonical_config) << "\n";
  os << "r";
  for (int i = 1; i <= u.params.m; ++i) os << ",u_" << i;
  os << ",abs_u\n";
  Vec x(u.params.n, 0.0);
  for (double r : radii) {
    x[0] = r;
    const Vec val = u.at(x);
    os << g17(r);
    for (double v : val) os << "," << g17(v);
    os << "," << g17(norm(val)) << "\n";
  }
}

inline json to_json(const InvariantReport& r) {
  json K = json::array();
  std::size_t idx = 0;
  std::vector<std::vector<double>> full(r.m, std::vector<double>(r.m, 0.0));
  for (int i = 0; i < r.m; ++i)
    for (int j = i + 1; j < r.m; ++j, ++idx) {
      full[i][j] = r.k[idx];
      full[j][i] = -r.k[idx];
    }
  for (const auto& row : full) K.push_back(row);
  return json{{"kappa", r.kappa},
              {"kappa_star", r.kappa_star},
              {"k", K},
              {"kappa_drift", r.kappa_drift},
              {"kstar_drift", r.kstar_drift},
              {"k_drift", r.k_drift},
              {"kstar_consistency", r.kstar_consistency()}};
}

inline json to_json(const SingularityClass& c) {
  json j{{"tag", to_string(c.tag)},
         {"exponent", nullptr},
         {"constant", nullptr},
         {"log_exponent", nullptr},
         {"solution_dependent", false}};
  if (c.law) {
    j["exponent"] = c.law->exponent;
    j["constant"] = c.law->solution_dependent && c.law->constant == 0.0
                        ? json(nullptr)
                        : json(c.law->constant);
    j["log_exponent"] = c.law->log_exponent;
    j["solution_dependent"] = c.law->solution_dependent;
    j["two_sided"] = c.law->two_sided;
  }
  if (c.kappa) j["kappa"] = *c.kappa;
  if (c.kappa_star) j["kappa_star"] = *c.kappa_star;
  if (c.oscillation_band)
    j["oscillation_band"] = {c.oscillation_band->first, c.oscillation_band->second};
  return j;
}

inline json to_json(const ProblemParams& p, const DerivedConstants& c) {
  json j{{"n", p.n},
         {"m", p.m},
         {"alpha", p.alpha},
         {"lambda", c.lambda},
         {"mu", c.mu},
         {"lambda_bar", nullptr},
         {"serrin_exponent", c.serrin_exponent},
         {"sobolev_exponent", c.sobolev_exponent},
         {"ball_volume", c.ball_volume},
         {"sphere_area", c.sphere_area},
         {"regime", to_string(regime_of(p))}};
  if (c.lambda_bar) j["lambda_bar"] = *c.lambda_bar;
  return j;
}

inline json error_json(const Error& e) {
  return json{{"code", to_string(e.code())},
              {"message", e.what()},
              {"context", e.context()}};
}

}  // namespace emden
