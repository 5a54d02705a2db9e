#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "emden/errors.hpp"

namespace emden {

// Absolute tolerance used for all exponent-boundary comparisons. Callers who
// need exact boundary semantics should pass alpha as the evaluated rational.
inline constexpr double kRegimeTol = 1e-12;

struct ProblemParams {
  int n = 3;        // spatial dimension, n >= 3
  int m = 1;        // number of components, m >= 1
  double alpha = 2; // nonlinearity exponent, 1 < alpha <= (n+2)/(n-2)
};

inline double serrin_exponent(int n) { return double(n) / (n - 2); }
inline double sobolev_exponent(int n) { return double(n + 2) / (n - 2); }

inline void validate(const ProblemParams& p) {
  if (p.n < 3) fail(ErrorCode::InvalidParams, "dimension n must be >= 3",
                    "n=" + std::to_string(p.n));
  if (p.m < 1) fail(ErrorCode::InvalidParams, "component count m must be >= 1",
                    "m=" + std::to_string(p.m));
  if (!(p.alpha > 1.0) || p.alpha > sobolev_exponent(p.n) + kRegimeTol) {
    std::ostringstream os;
    os << "alpha=" << p.alpha << " outside (1, " << sobolev_exponent(p.n) << "]";
    fail(ErrorCode::InvalidParams, "exponent alpha outside the admissible range", os.str());
  }
}

enum class Regime { BelowSerrin, Serrin, Intermediate, Critical };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::BelowSerrin: return "BelowSerrin";
    case Regime::Serrin: return "Serrin";
    case Regime::Intermediate: return "Intermediate";
    case Regime::Critical: return "Critical";
  }
  return "unknown";
}

inline Regime regime_of(const ProblemParams& p) {
  validate(p);
  const double serrin = serrin_exponent(p.n);
  const double sobolev = sobolev_exponent(p.n);
  if (std::abs(p.alpha - sobolev) <= kRegimeTol) return Regime::Critical;
  if (std::abs(p.alpha - serrin) <= kRegimeTol) return Regime::Serrin;
  if (p.alpha < serrin) return Regime::BelowSerrin;
  if (p.alpha < sobolev) return Regime::Intermediate;
  return Regime::Critical;
}

struct DerivedConstants {
  double lambda = 0;                 // (2/(a-1)) (n-2-2/(a-1))
  double mu = 0;                     // 4/(a-1) - n + 2
  std::optional<double> lambda_bar;  // ((a-1)/(a+1)) lambda^{(a+1)/(a-1)}, needs lambda >= 0
  double serrin_exponent = 0;
  double sobolev_exponent = 0;
  double ball_volume = 0;   // omega_n
  double sphere_area = 0;   // n omega_n
};

inline double ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

inline DerivedConstants derive_constants(const ProblemParams& p) {
  validate(p);
  DerivedConstants c;
  const double q = 2.0 / (p.alpha - 1.0);
  c.lambda = q * (p.n - 2 - q);
  c.mu = 2.0 * q - p.n + 2;
  if (c.lambda >= 0.0) {
    c.lambda_bar = (p.alpha - 1.0) / (p.alpha + 1.0) *
                   std::pow(c.lambda, (p.alpha + 1.0) / (p.alpha - 1.0));
  }
  c.serrin_exponent = serrin_exponent(p.n);
  c.sobolev_exponent = sobolev_exponent(p.n);
  c.ball_volume = ball_volume(p.n);
  c.sphere_area = p.n * c.ball_volume;
  return c;
}

// Componentwise supremum amplitude for singular solutions:
// u_i <= ((alpha-1)/(2n))^{-1/(alpha-1)} |x|^{-2/(alpha-1)}.
inline double a_priori_amplitude(const ProblemParams& p) {
  return std::pow((p.alpha - 1.0) / (2.0 * p.n), -1.0 / (p.alpha - 1.0));
}

// Admissible box of the two conserved quantities in the critical case.
inline double kappa_lower_bound(int n) {
  return -2.0 / n * std::pow(0.5 * (n - 2), n);
}
inline double kappa_star_lower_bound(int n, double kappa) {
  return -(2.0 / n * std::pow(0.5 * (n - 2), n) + kappa) * std::pow(0.5 * (n - 2), n - 2);
}

// Amplitude of the critical homogeneous solution ((n-2)/2)^{(n-2)/2}.
inline double critical_homogeneous_amplitude(int n) {
  return std::pow(0.5 * (n - 2), 0.5 * (n - 2));
}

// Fixed point of the limit equation at the lower critical exponent, and the
// corresponding terminal energy level of the singular branch.
inline double lower_critical_fixed_point(int n) {
  return std::pow(0.5 * (n - 2) * (n - 2), 0.5 * (n - 2));
}
inline double lower_critical_energy_level(int n) {
  return -1.0 / (n - 1) * std::pow(0.5 * (n - 2) * (n - 2), n - 1);
}

}  // namespace emden
