#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "emden/dynamics.hpp"
#include "emden/field.hpp"
#include "emden/params.hpp"

namespace emden {

namespace detail {

inline void validate_direction(const Vec& e, int m) {
  if (int(e.size()) != m)
    fail(ErrorCode::InvalidParams, "direction vector size must equal m");
  if (std::abs(norm(e) - 1.0) > 1e-12)
    fail(ErrorCode::InvalidParams, "direction vector must have unit norm");
  for (double c : e)
    if (c < -1e-12)
      fail(ErrorCode::InvalidParams, "direction vector must be componentwise nonnegative");
}

// u = amp |x|^{-p} e with the matching closed-form gradient and laplacian
// (laplacian = -|u|^{alpha-1} u, valid because these are exact solutions).
inline FieldEvaluator power_field(const ProblemParams& params, double amp, double p,
                                  const Vec& e) {
  FieldEvaluator u;
  u.params = params;
  u.domain = DomainKind::PuncturedSpace;
  u.radial = true;
  u.regular_at_origin = false;
  const int n = params.n, m = params.m;
  const double alpha = params.alpha;
  u.value = [amp, p, e, m, n](const Vec& x) {
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) r2 += x[j] * x[j];
    const double s = amp * std::pow(r2, -0.5 * p);
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = s * e[i];
    return out;
  };
  u.gradient = [amp, p, e, m, n](const Vec& x) {
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) r2 += x[j] * x[j];
    const double s = -p * amp * std::pow(r2, -0.5 * p - 1.0);
    std::vector<Vec> g(m, Vec(n));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) g[i][j] = s * e[i] * x[j];
    return g;
  };
  u.laplacian = [amp, p, alpha, e, m, n](const Vec& x) {
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) r2 += x[j] * x[j];
    const double s = -std::pow(amp, alpha) * std::pow(r2, -0.5 * (p * alpha));
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = s * e[i];
    return out;
  };
  return u;
}

}  // namespace detail

// Entire regular solution at the critical exponent:
// u(x) = (n(n-2))^{(n-2)/4} (r / (r^2 + |x-z|^2))^{(n-2)/2} e.  r = 0 gives 0.
inline FieldEvaluator bubble(int n, int m, const Vec& z, double r, const Vec& e) {
  ProblemParams params{n, m, sobolev_exponent(n)};
  validate(params);
  detail::validate_direction(e, m);
  if (int(z.size()) != n) fail(ErrorCode::InvalidParams, "center dimension mismatch");
  if (r < 0.0) fail(ErrorCode::InvalidParams, "bubble scale must be nonnegative");

  FieldEvaluator u;
  u.params = params;
  u.domain = DomainKind::WholeSpace;
  u.regular_at_origin = true;
  bool centered = true;
  for (double c : z) centered = centered && c == 0.0;
  u.radial = centered;

  if (r == 0.0) {
    u.value = [m](const Vec&) { return Vec(m, 0.0); };
    u.gradient = [m, n](const Vec&) { return std::vector<Vec>(m, Vec(n, 0.0)); };
    u.laplacian = [m](const Vec&) { return Vec(m, 0.0); };
    return u;
  }

  const double cn = std::pow(double(n) * (n - 2), 0.25 * (n - 2));
  const double p = 0.5 * (n - 2);
  const double alpha = params.alpha;
  auto profile = [cn, p, r, z, n](const Vec& x) {
    double d2 = r * r;
    for (int j = 0; j < n; ++j) d2 += (x[j] - z[j]) * (x[j] - z[j]);
    return cn * std::pow(r / d2, p);
  };
  u.value = [profile, e, m](const Vec& x) {
    const double U = profile(x);
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = U * e[i];
    return out;
  };
  u.gradient = [cn, p, r, z, e, m, n](const Vec& x) {
    double d2 = r * r;
    for (int j = 0; j < n; ++j) d2 += (x[j] - z[j]) * (x[j] - z[j]);
    const double s = -(n - 2) * cn * std::pow(r, p) * std::pow(d2, -p - 1.0);
    std::vector<Vec> g(m, Vec(n));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) g[i][j] = s * e[i] * (x[j] - z[j]);
    return g;
  };
  u.laplacian = [profile, alpha, e, m](const Vec& x) {
    const double U = profile(x);
    const double s = -std::pow(U, alpha);
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = s * e[i];
    return out;
  };
  return u;
}

// Homogeneous singular solution u = lambda^{1/(alpha-1)} |x|^{-2/(alpha-1)} e,
// available where lambda > 0 (above the Serrin exponent).
inline FieldEvaluator homogeneous_singular(const ProblemParams& params, const Vec& e) {
  validate(params);
  detail::validate_direction(e, params.m);
  const DerivedConstants c = derive_constants(params);
  const Regime reg = regime_of(params);
  if (reg == Regime::BelowSerrin || reg == Regime::Serrin || !(c.lambda > 0.0))
    fail(ErrorCode::RegimeError,
         "homogeneous singular solution requires lambda > 0 (alpha above n/(n-2))",
         "lambda=" + std::to_string(c.lambda));
  const double p = 2.0 / (params.alpha - 1.0);
  const double amp = std::pow(c.lambda, 1.0 / (params.alpha - 1.0));
  return detail::power_field(params, amp, p, e);
}

// Critical homogeneous singular solution u = ((n-2)/2)^{(n-2)/2} |x|^{-(n-2)/2} e.
inline FieldEvaluator critical_homogeneous(int n, int m, const Vec& e) {
  ProblemParams params{n, m, sobolev_exponent(n)};
  validate(params);
  detail::validate_direction(e, m);
  return detail::power_field(params, critical_homogeneous_amplitude(n), 0.5 * (n - 2), e);
}

// ---------------------------------------------------------------------------
// Fowler machinery for the critical radial modulus equation
//   (rho')^2 = Q(rho) = (n-2)^2/4 rho^2 - (n-2)/n rho^{2n/(n-2)} + kappa + kappa*/rho^2.

struct FowlerData {
  int n = 0;
  double kappa = 0.0, kappa_star = 0.0;
  double rho_min = 0.0, rho_max = 0.0;
  double period = 0.0;
};

inline double fowler_Q(int n, double kappa, double kappa_star, double rho) {
  const double p = 2.0 * n / (n - 2);
  double q = 0.25 * (n - 2) * (n - 2) * rho * rho -
             double(n - 2) / n * std::pow(rho, p) + kappa;
  if (kappa_star != 0.0) q += kappa_star / (rho * rho);
  return q;
}

inline void require_admissible_invariants(int n, double kappa, double kappa_star,
                                          double tol = 1e-8) {
  std::ostringstream os;
  if (kappa < kappa_lower_bound(n) - tol) {
    os << "kappa=" << kappa << " below the admissible minimum " << kappa_lower_bound(n);
    fail(ErrorCode::RangeError, "first invariant below its lower bound", os.str());
  }
  if (kappa_star > tol) {
    os << "kappa_star=" << kappa_star << " must be nonpositive";
    fail(ErrorCode::RangeError, "second invariant must be nonpositive", os.str());
  }
  if (kappa_star < kappa_star_lower_bound(n, kappa) - tol) {
    os << "kappa_star=" << kappa_star << " below the admissible minimum "
       << kappa_star_lower_bound(n, kappa) << " at kappa=" << kappa;
    fail(ErrorCode::RangeError, "second invariant below its lower bound", os.str());
  }
}

// Strict positive roots of Q and the oscillation period. Returns nullopt when
// the orbit degenerates (no two distinct roots): no oscillation.
inline std::optional<FowlerData> fowler_roots(int n, double kappa, double kappa_star) {
  require_admissible_invariants(n, kappa, kappa_star);
  if (kappa_star > 0.0) kappa_star = 0.0;  // clamp tolerated tiny positives

  // rho^2 Q(rho) is smooth at 0 and -> -infinity; all roots lie below rho_cap.
  auto S = [n, kappa, kappa_star](double rho) {
    const double r2 = rho * rho;
    return 0.25 * (n - 2) * (n - 2) * r2 * r2 -
           double(n - 2) / n * std::pow(rho, 2.0 * n / (n - 2) + 2.0) + kappa * r2 +
           kappa_star;
  };
  const double rho_cap = 2.0 * std::pow(0.25 * n * (n - 2), 0.25 * (n - 2));

  const int N = 10000;
  const double lo = 1e-6;
  const double ratio = std::pow(rho_cap / lo, 1.0 / (N - 1));
  std::vector<double> roots;
  double prev = lo, fprev = S(lo);
  for (int i = 1; i < N; ++i) {
    const double x = lo * std::pow(ratio, i);
    const double fx = S(x);
    if ((fprev < 0.0) != (fx < 0.0)) {
      double a = prev, b = x, fa = fprev;
      int it = 0;
      while (b - a > 1e-13 * std::max(1.0, b)) {
        if (++it > 200)
          fail(ErrorCode::NumericError, "root refinement failed to converge");
        const double mid = 0.5 * (a + b);
        const double fm = S(mid);
        if ((fa <= 0.0) == (fm <= 0.0)) { a = mid; fa = fm; } else b = mid;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = x;
    fprev = fx;
  }

  if (roots.size() != 2) return std::nullopt;
  if (roots[1] - roots[0] < 1e-8) return std::nullopt;
  const double mid = 0.5 * (roots[0] + roots[1]);
  if (!(fowler_Q(n, kappa, kappa_star, mid) > 0.0)) return std::nullopt;

  FowlerData data;
  data.n = n;
  data.kappa = kappa;
  data.kappa_star = kappa_star;
  data.rho_min = roots[0];
  data.rho_max = roots[1];

  // Period T = 2 int drho / sqrt(Q). The substitution
  // rho = rho_min + (rho_max-rho_min)(1-x)/2 against the Chebyshev weight
  // absorbs the inverse-square-root endpoint singularities.
  const int NQ = 64;
  const double half = 0.5 * (data.rho_max - data.rho_min);
  double T = 0.0;
  for (int k = 1; k <= NQ; ++k) {
    const double x = std::cos((2.0 * k - 1.0) * std::numbers::pi / (2.0 * NQ));
    const double rho = data.rho_min + half * (1.0 - x);
    const double W = fowler_Q(n, kappa, kappa_star, rho) / (half * half * (1.0 - x * x));
    T += 1.0 / std::sqrt(W);
  }
  data.period = 2.0 * std::numbers::pi / NQ * T;
  return data;
}

// Second-order form of the modulus equation (the derivative of the energy
// relation): rho'' = (n-2)^2/4 rho - rho^{(n+2)/(n-2)} - kappa*/rho^3.
inline RadialTrajectory fowler_orbit_from(int n, double kappa_star, double rho0,
                                          double drho0, double t0, double span,
                                          double h) {
  ProblemParams params{n, 1, sobolev_exponent(n)};
  auto accel = [n, kappa_star](double, const Vec& v, const Vec&) {
    const double rho = v[0];
    Vec a(1);
    a[0] = 0.25 * (n - 2) * (n - 2) * rho - std::pow(rho, double(n + 2) / (n - 2));
    if (kappa_star != 0.0) a[0] -= kappa_star / (rho * rho * rho);
    return a;
  };
  return detail::integrate(accel, params, OdeSystem::FowlerModulus, Vec{rho0}, Vec{drho0},
                           t0, t0 + span, h, a_priori_amplitude(params));
}

inline RadialTrajectory fowler_orbit(const FowlerData& data, double t0, double span,
                                     double h = 1e-3) {
  if (!(h > 0.0) || h > data.period / 100.0)
    fail(ErrorCode::ConfigError, "step size must be positive and at most period/100",
         "period=" + std::to_string(data.period));
  return fowler_orbit_from(data.n, data.kappa_star, data.rho_min, 0.0, t0, span, h);
}

// Two-component singular solution of the critical radial system:
// v(t) = rho(t) (cos Theta, sin Theta), Theta' = sqrt(-kappa*)/rho^2.
struct Spiral {
  FowlerData data;
  double k12 = 0.0;  // conserved angular momentum sqrt(-kappa*)
  RadialTrajectory trajectory;
};

inline Spiral spiral(int n, double kappa, double kappa_star, double t0, double span,
                     double h = 1e-3) {
  if (!(kappa_star < 0.0))
    fail(ErrorCode::RangeError, "spiral requires a strictly negative second invariant");
  auto data = fowler_roots(n, kappa, kappa_star);
  if (!data)
    fail(ErrorCode::RangeError, "no oscillatory orbit exists for this invariant pair");
  if (!(h > 0.0) || h > data->period / 100.0)
    fail(ErrorCode::ConfigError, "step size must be positive and at most period/100",
         "period=" + std::to_string(data->period));

  const double w = std::sqrt(-kappa_star);
  const double lambda = 0.25 * (n - 2) * (n - 2);
  const double alpha = sobolev_exponent(n);

  // Step the first-order (rho, rho', Theta) system with its own RK4; the
  // stored states carry the reconstructed two-component field.
  struct State { double rho, drho, theta; };
  auto rhs = [n, kappa_star, w](const State& s) {
    State d;
    d.rho = s.drho;
    d.drho = 0.25 * (n - 2) * (n - 2) * s.rho -
             std::pow(s.rho, double(n + 2) / (n - 2)) - kappa_star / (s.rho * s.rho * s.rho);
    d.theta = w / (s.rho * s.rho);
    return d;
  };

  const std::int64_t steps = std::max<std::int64_t>(1, std::llround(span / h));
  const double step = span / double(steps);

  Spiral out;
  out.data = *data;
  out.k12 = w;
  RadialTrajectory& traj = out.trajectory;
  traj.params = ProblemParams{n, 2, alpha};
  traj.system = OdeSystem::Cylindrical;
  traj.h = step;
  traj.states.reserve(std::size_t(steps) + 1);

  State s{data->rho_min, 0.0, 0.0};
  for (std::int64_t k = 0;; ++k) {
    const double t = t0 + double(k) * step;
    const double ct = std::cos(s.theta), st = std::sin(s.theta);
    const double dtheta = w / (s.rho * s.rho);
    RadialState rs;
    rs.t = t;
    rs.v = {s.rho * ct, s.rho * st};
    rs.dv = {s.drho * ct - s.rho * dtheta * st, s.drho * st + s.rho * dtheta * ct};
    // v'' = lambda v - |v|^{alpha-1} v along the critical radial system.
    const double nl = std::pow(s.rho, alpha - 1.0);
    rs.ddv = {(lambda - nl) * rs.v[0], (lambda - nl) * rs.v[1]};
    traj.states.push_back(std::move(rs));
    if (k == steps) break;
    const State k1 = rhs(s);
    State s2{s.rho + 0.5 * step * k1.rho, s.drho + 0.5 * step * k1.drho,
             s.theta + 0.5 * step * k1.theta};
    const State k2 = rhs(s2);
    State s3{s.rho + 0.5 * step * k2.rho, s.drho + 0.5 * step * k2.drho,
             s.theta + 0.5 * step * k2.theta};
    const State k3 = rhs(s3);
    State s4{s.rho + step * k3.rho, s.drho + step * k3.drho, s.theta + step * k3.theta};
    const State k4 = rhs(s4);
    s.rho += step / 6.0 * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho);
    s.drho += step / 6.0 * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho);
    s.theta += step / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
  }
  return out;
}

// Hermite-refined extrema of a scalar trajectory component: locates sign
// changes of the stored derivative and solves the interpolant's critical
// points, recovering turning values to the integrator's order.
inline std::pair<double, double> component_range(const RadialTrajectory& traj,
                                                 std::size_t comp = 0) {
  if (traj.states.empty())
    fail(ErrorCode::RangeError, "component range of an empty trajectory");
  if (comp >= traj.states.front().v.size())
    fail(ErrorCode::RangeError, "component index out of range",
         "comp=" + std::to_string(comp));
  double lo = traj.states.front().v[comp], hi = lo;
  const auto& st = traj.states;
  for (std::size_t k = 0; k + 1 < st.size(); ++k) {
    const double step = st[k + 1].t - st[k].t;
    const double va = st[k].v[comp], vb = st[k + 1].v[comp];
    const double da = st[k].dv[comp], db = st[k + 1].dv[comp];
    lo = std::min({lo, va, vb});
    hi = std::max({hi, va, vb});
    if (da == 0.0 || da * db > 0.0) continue;
    // Critical points of the cubic Hermite interpolant on [0,1].
    const double c1 = step * da;
    const double c2 = 3.0 * (vb - va) - step * (2.0 * da + db);
    const double c3 = 2.0 * (va - vb) + step * (da + db);
    // p(s) = va + c1 s + c2 s^2 + c3 s^3; p'(s) = c1 + 2 c2 s + 3 c3 s^2.
    const double A = 3.0 * c3, B = 2.0 * c2, C = c1;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) continue;
    for (double sgn : {-1.0, 1.0}) {
      double s = (A == 0.0) ? (B == 0.0 ? -1.0 : -C / B)
                            : (-B + sgn * std::sqrt(disc)) / (2.0 * A);
      if (s <= 0.0 || s >= 1.0) continue;
      const double val = va + s * (c1 + s * (c2 + s * c3));
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
  }
  return {lo, hi};
}

}  // namespace emden
