#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "emden/field.hpp"
#include "emden/params.hpp"

namespace emden {

struct RadialState {
  double t = 0.0;
  Vec v, dv, ddv;  // ddv is the ODE right side at (t, v, dv), for interpolation
};

enum class OdeSystem {
  Cylindrical,    // v'' = -mu v' + lambda v - |v|^{alpha-1} v
  LowerCritical,  // log-corrected system at alpha = n/(n-2)
  FowlerModulus   // scalar rho'' with the centrifugal term kappa*/rho^3
};

struct RadialTrajectory {
  ProblemParams params;
  OdeSystem system = OdeSystem::Cylindrical;
  double h = 0.0;
  std::vector<RadialState> states;
  bool negative_warning = false;  // some component dipped below -1e-10

  double t_begin() const { return states.front().t; }
  double t_end() const { return states.back().t; }

  bool contains(double t) const {
    const double lo = std::min(t_begin(), t_end()), hi = std::max(t_begin(), t_end());
    return t >= lo - 1e-12 && t <= hi + 1e-12;
  }

  // Cubic Hermite interpolation: v from (v, v') and v' from (v', v'').
  RadialState at(double t) const {
    if (!contains(t))
      fail(ErrorCode::RangeError, "time outside the trajectory span",
           "t=" + std::to_string(t));
    const double step = states.size() > 1 ? states[1].t - states[0].t : 1.0;
    std::size_t k = 0;
    if (states.size() > 1) {
      double fk = std::floor((t - states[0].t) / step);
      if (fk < 0) fk = 0;
      if (fk > double(states.size() - 2)) fk = double(states.size() - 2);
      k = std::size_t(fk);
    }
    const RadialState& a = states[k];
    const RadialState& b = states[std::min(k + 1, states.size() - 1)];
    if (&a == &b || t == a.t) return a;
    const double s = (t - a.t) / step;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s),
                 h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    RadialState out;
    out.t = t;
    const std::size_t m = a.v.size();
    out.v.resize(m);
    out.dv.resize(m);
    out.ddv.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      out.v[i] = h00 * a.v[i] + h10 * step * a.dv[i] + h01 * b.v[i] + h11 * step * b.dv[i];
      out.dv[i] = h00 * a.dv[i] + h10 * step * a.ddv[i] + h01 * b.dv[i] + h11 * step * b.ddv[i];
      out.ddv[i] = (1 - s) * a.ddv[i] + s * b.ddv[i];
    }
    return out;
  }
};

namespace detail {

// One classical RK4 step for v'' = accel(t, v, dv). Fixed order of operations
// for bit-reproducibility.
template <class Accel>
inline void rk4_step(Accel&& accel, double t, double h, Vec& v, Vec& dv) {
  const std::size_t m = v.size();
  Vec k1v = dv, k1a = accel(t, v, dv);
  Vec v2(m), d2(m);
  for (std::size_t i = 0; i < m; ++i) {
    v2[i] = v[i] + 0.5 * h * k1v[i];
    d2[i] = dv[i] + 0.5 * h * k1a[i];
  }
  Vec k2v = d2, k2a = accel(t + 0.5 * h, v2, d2);
  Vec v3(m), d3(m);
  for (std::size_t i = 0; i < m; ++i) {
    v3[i] = v[i] + 0.5 * h * k2v[i];
    d3[i] = dv[i] + 0.5 * h * k2a[i];
  }
  Vec k3v = d3, k3a = accel(t + 0.5 * h, v3, d3);
  Vec v4(m), d4(m);
  for (std::size_t i = 0; i < m; ++i) {
    v4[i] = v[i] + h * k3v[i];
    d4[i] = dv[i] + h * k3a[i];
  }
  Vec k4v = d4, k4a = accel(t + h, v4, d4);
  for (std::size_t i = 0; i < m; ++i) {
    v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    dv[i] += h / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
  }
}

template <class Accel>
inline RadialTrajectory integrate(Accel&& accel, const ProblemParams& params,
                                  OdeSystem system, Vec v0, Vec dv0, double t0,
                                  double t1, double h, double blowup_amplitude) {
  if (!(h > 0.0)) fail(ErrorCode::ConfigError, "step size must be positive");
  if (t1 == t0) fail(ErrorCode::ConfigError, "empty integration span");
  const double span = std::abs(t1 - t0);
  std::int64_t steps = std::llround(span / h);
  if (steps < 1) steps = 1;
  const double step = (t1 > t0 ? 1.0 : -1.0) * span / double(steps);

  RadialTrajectory traj;
  traj.params = params;
  traj.system = system;
  traj.h = std::abs(step);
  traj.states.reserve(std::size_t(steps) + 1);

  Vec v = std::move(v0), dv = std::move(dv0);
  const double guard = 10.0 * blowup_amplitude;
  for (std::int64_t k = 0;; ++k) {
    const double t = t0 + double(k) * step;
    RadialState st;
    st.t = t;
    st.v = v;
    st.dv = dv;
    st.ddv = accel(t, v, dv);
    traj.states.push_back(std::move(st));
    for (double c : v)
      if (c < -1e-10) traj.negative_warning = true;
    if (norm(v) > guard) {
      std::ostringstream os;
      os << "at t=" << t << ", |v|=" << norm(v) << " exceeds guard " << guard
         << "; last valid state recorded";
      fail(ErrorCode::DivergenceError, "trajectory exceeded the blowup guard", os.str());
    }
    if (k == steps) break;
    rk4_step(accel, t, step, v, dv);
  }
  return traj;
}

}  // namespace detail

// Radial cylindrical system v'' = -mu v' + lambda v - |v|^{alpha-1} v.
inline RadialTrajectory integrate_radial(const ProblemParams& params, const Vec& v0,
                                         const Vec& dv0, double t0, double t1,
                                         double h = 1e-3) {
  validate(params);
  if (int(v0.size()) != params.m || int(dv0.size()) != params.m)
    fail(ErrorCode::InvalidParams, "initial state size must match component count m");
  const DerivedConstants c = derive_constants(params);
  const double lambda = c.lambda, mu = c.mu, alpha = params.alpha;
  auto accel = [lambda, mu, alpha](double, const Vec& v, const Vec& dv) {
    Vec a = power_nonlinearity(v, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = -mu * dv[i] + lambda * v[i] - a[i];
    return a;
  };
  return detail::integrate(accel, params, OdeSystem::Cylindrical, v0, dv0, t0, t1, h,
                           a_priori_amplitude(params));
}

// Log-corrected radial system at the lower critical exponent:
// phi'' = -(n-2)(1 - 1/t) phi' + (n-2)/(2t) (n-2 - n/(2t)) phi - (1/t)|phi|^{2/(n-2)} phi.
inline RadialTrajectory integrate_lower_critical(int n, int m, const Vec& phi0,
                                                 const Vec& dphi0, double t0, double t1,
                                                 double h = 1e-3) {
  ProblemParams params{n, m, serrin_exponent(n)};
  validate(params);
  if (int(phi0.size()) != m || int(dphi0.size()) != m)
    fail(ErrorCode::InvalidParams, "initial state size must match component count m");
  const double threshold = (2.0 * n - 3.0) / (2.0 * n - 4.0);
  if (!(t0 > threshold))
    fail(ErrorCode::ConfigError, "start time must exceed the monotonicity threshold",
         "threshold=" + std::to_string(threshold));
  if (std::min(t0, t1) <= threshold)
    fail(ErrorCode::ConfigError, "span crosses the monotonicity threshold");
  auto accel = [n](double t, const Vec& v, const Vec& dv) {
    Vec a = power_nonlinearity(v, 1.0 + 2.0 / (n - 2));
    const double c1 = -(n - 2) * (1.0 - 1.0 / t);
    const double c2 = (n - 2) / (2.0 * t) * (n - 2 - n / (2.0 * t));
    for (std::size_t i = 0; i < v.size(); ++i)
      a[i] = c1 * dv[i] + c2 * v[i] - a[i] / t;
    return a;
  };
  // Guard amplitude for the log-corrected variable: (n(n-2))^{(n-2)/2}.
  const double amp = std::pow(double(n) * (n - 2), 0.5 * (n - 2));
  return detail::integrate(accel, params, OdeSystem::LowerCritical, phi0, dphi0, t0, t1, h,
                           amp);
}

}  // namespace emden
