#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emden/families.hpp"
#include "emden/params.hpp"

namespace emden {

enum class SingularityTag {
  Trivial,
  Removable,
  SubcriticalSingular,
  CriticalOscillatory,
  CriticalHomogeneous,
  WeakSingular,
  LowerCriticalSingular,
};

inline const char* to_string(SingularityTag t) {
  switch (t) {
    case SingularityTag::Trivial: return "Trivial";
    case SingularityTag::Removable: return "Removable";
    case SingularityTag::SubcriticalSingular: return "SubcriticalSingular";
    case SingularityTag::CriticalOscillatory: return "CriticalOscillatory";
    case SingularityTag::CriticalHomogeneous: return "CriticalHomogeneous";
    case SingularityTag::WeakSingular: return "WeakSingular";
    case SingularityTag::LowerCriticalSingular: return "LowerCriticalSingular";
  }
  return "?";
}

// |u(x)| ~ constant * |x|^exponent * (-log|x|)^log_exponent near the origin.
// two_sided means the law holds as matching upper and lower bounds with
// constants that depend on the solution rather than as an asymptote.
struct AsymptoticLaw {
  double exponent = 0.0;
  double constant = 0.0;
  double log_exponent = 0.0;
  bool solution_dependent = false;
  bool two_sided = false;
};

struct SingularityClass {
  SingularityTag tag = SingularityTag::Removable;
  std::optional<AsymptoticLaw> law;
  // echoed measurements, populated when the decision used them
  std::optional<double> kappa, kappa_star;
  std::optional<std::pair<double, double>> oscillation_band;
};

constexpr double kDefaultClassifyTol = 1e-6;

// Least-squares amplitude for a forced power law: fits c in
// log|u| = p log r + log c over the innermost decade of the samples.
inline double fit_amplitude(const std::vector<double>& radii,
                            const std::vector<double>& magnitudes, double p) {
  if (radii.size() != magnitudes.size() || radii.empty())
    fail(ErrorCode::InvalidParams, "amplitude fit needs matching nonempty samples");
  const double rmin = *std::min_element(radii.begin(), radii.end());
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] > 10.0 * rmin) continue;
    if (!(magnitudes[i] > 0.0)) return 0.0;  // vanishing samples: no power law
    acc += std::log(magnitudes[i]) - p * std::log(radii[i]);
    ++used;
  }
  return std::exp(acc / double(used));
}

// Decide between the two attainable targets of a proven two-point limit set.
// Nearest-target tie-breaking keeps the decision stable as tol grows: an
// exactly attained value never flips to the other branch.
namespace detail {
inline int nearest_two_point(double x, double target0, double target1, double tol) {
  const double d0 = std::abs(x - target0), d1 = std::abs(x - target1);
  if (d0 <= tol && d0 <= d1) return 0;
  if (d1 <= tol) return 1;
  if (d0 <= tol) return 0;
  return -1;
}
}  // namespace detail

// Critical-exponent taxonomy from the measured invariant pair.
inline SingularityClass classify_critical(double kappa, double kappa_star, int n,
                                          double tol = kDefaultClassifyTol) {
  require_admissible_invariants(n, kappa, kappa_star, std::max(tol, 1e-8));

  SingularityClass out;
  out.kappa = kappa;
  out.kappa_star = kappa_star;
  const double klb = kappa_lower_bound(n);

  if (std::abs(kappa_star) <= tol) {
    const int pick = detail::nearest_two_point(kappa, 0.0, klb, tol);
    if (pick == 0) {
      out.tag = SingularityTag::Removable;
      return out;
    }
    if (pick == 1) {
      out.tag = SingularityTag::CriticalHomogeneous;
      AsymptoticLaw law;
      law.exponent = -0.5 * (n - 2);
      law.constant = critical_homogeneous_amplitude(n);
      out.law = law;
      return out;
    }
  }
  out.tag = SingularityTag::CriticalOscillatory;
  AsymptoticLaw law;
  law.exponent = -0.5 * (n - 2);
  law.solution_dependent = true;
  law.two_sided = true;
  out.law = law;
  if (auto data = fowler_roots(n, kappa, std::min(kappa_star, 0.0)))
    out.oscillation_band = std::make_pair(data->rho_min, data->rho_max);
  return out;
}

// Intermediate-regime taxonomy from the limit of the first surface energy at
// the origin, which the theory confines to {0, -lambda_bar}.
inline SingularityClass classify_subcritical(double phi_limit_at_zero,
                                             const ProblemParams& params,
                                             double tol = kDefaultClassifyTol) {
  validate(params);
  if (regime_of(params) != Regime::Intermediate)
    fail(ErrorCode::RegimeError,
         "this rule applies strictly between the Serrin and critical exponents",
         "alpha=" + std::to_string(params.alpha));
  const DerivedConstants c = derive_constants(params);
  const double level = -*c.lambda_bar;

  SingularityClass out;
  const int pick = detail::nearest_two_point(phi_limit_at_zero, 0.0, level, tol);
  if (pick == 0) {
    out.tag = SingularityTag::Removable;
    return out;
  }
  if (pick == 1) {
    out.tag = SingularityTag::SubcriticalSingular;
    AsymptoticLaw law;
    law.exponent = -2.0 / (params.alpha - 1.0);
    law.constant = std::pow(c.lambda, 1.0 / (params.alpha - 1.0));
    out.law = law;
    return out;
  }
  std::ostringstream os;
  os << "limit " << phi_limit_at_zero << " is near neither 0 nor " << level;
  fail(ErrorCode::InconsistencyError,
       "surface-energy limit outside the proven two-point set", os.str());
}

// Regime-appropriate measurements feeding classify_by_regime. Exactly the
// member matching the regime must be set (zero_field short-circuits).
struct Evidence {
  bool zero_field = false;
  std::optional<std::pair<double, double>> invariant_pair;  // critical
  std::optional<double> phi_limit;                          // intermediate
  std::optional<double> fitted_amplitude;                   // below Serrin
  std::optional<double> terminal_energy;                    // at Serrin
  double tol = kDefaultClassifyTol;
};

inline SingularityClass classify_by_regime(const ProblemParams& params,
                                           const Evidence& ev) {
  validate(params);
  if (ev.zero_field) {
    SingularityClass out;
    out.tag = SingularityTag::Trivial;
    return out;
  }
  const Regime regime = regime_of(params);
  auto wrong = [&](const char* need) {
    fail(ErrorCode::ConfigError, "evidence does not match the parameter regime",
         std::string("regime ") + to_string(regime) + " needs " + need);
  };

  switch (regime) {
    case Regime::Critical: {
      if (!ev.invariant_pair) wrong("the measured invariant pair");
      return classify_critical(ev.invariant_pair->first, ev.invariant_pair->second,
                               params.n, ev.tol);
    }
    case Regime::Intermediate: {
      if (!ev.phi_limit) wrong("the surface-energy limit at the origin");
      return classify_subcritical(*ev.phi_limit, params, ev.tol);
    }
    case Regime::BelowSerrin: {
      if (!ev.fitted_amplitude) wrong("a fitted amplitude at exponent 2-n");
      SingularityClass out;
      if (std::abs(*ev.fitted_amplitude) <= ev.tol) {
        out.tag = SingularityTag::Removable;
        return out;
      }
      out.tag = SingularityTag::WeakSingular;
      AsymptoticLaw law;
      law.exponent = 2.0 - params.n;
      law.constant = *ev.fitted_amplitude;
      law.solution_dependent = true;
      law.two_sided = true;
      out.law = law;
      return out;
    }
    case Regime::Serrin: {
      if (!ev.terminal_energy) wrong("the terminal value of the monotone energy");
      const double level = lower_critical_energy_level(params.n);
      SingularityClass out;
      const int pick = detail::nearest_two_point(*ev.terminal_energy, 0.0, level, ev.tol);
      if (pick == 0) {
        out.tag = SingularityTag::Removable;
        return out;
      }
      if (pick == 1) {
        out.tag = SingularityTag::LowerCriticalSingular;
        AsymptoticLaw law;
        law.exponent = 2.0 - params.n;
        law.constant = lower_critical_fixed_point(params.n);
        law.log_exponent = 0.5 * (2.0 - params.n);
        out.law = law;
        return out;
      }
      std::ostringstream os;
      os << "terminal energy " << *ev.terminal_energy << " is near neither 0 nor "
         << level;
      fail(ErrorCode::InconsistencyError,
           "terminal energy outside the proven two-point set", os.str());
    }
  }
  fail(ErrorCode::ConfigError, "unhandled regime");
}

}  // namespace emden
