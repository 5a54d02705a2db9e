#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "emden/errors.hpp"
#include "emden/params.hpp"

namespace emden {

using Vec = std::vector<double>;

inline double norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// |v|^{alpha-1} v, with the |v| = 0 limit mapped to 0 so the nonlinearity is
// well-defined at the origin of state space.
inline Vec power_nonlinearity(const Vec& v, double alpha) {
  const double nv = norm(v);
  Vec out(v.size(), 0.0);
  if (nv == 0.0) return out;
  const double s = std::exp((alpha - 1.0) * std::log(nv));
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

enum class DomainKind { WholeSpace, PuncturedSpace, PuncturedBall };

// A closed-form (or derived) solution candidate on a subset of R^n. The value
// map is mandatory; gradient and laplacian are attached analytically by the
// family constructors and fall back to finite differences when a transform
// cannot produce them in closed form.
struct FieldEvaluator {
  ProblemParams params;
  DomainKind domain = DomainKind::WholeSpace;
  double domain_radius = std::numeric_limits<double>::infinity();  // PuncturedBall only
  Vec singular_point;            // empty means the origin
  bool radial = false;           // |u| depends only on |x| (about the origin)
  bool regular_at_origin = true;

  std::function<Vec(const Vec&)> value;
  std::function<std::vector<Vec>(const Vec&)> gradient;  // row i = grad of component i
  std::function<Vec(const Vec&)> laplacian;              // may be empty

  bool has_gradient() const { return bool(gradient); }
  bool has_laplacian() const { return bool(laplacian); }

  double distance_to_singular(const Vec& x) const {
    if (domain == DomainKind::WholeSpace) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - (singular_point.empty() ? 0.0 : singular_point[i]);
      s += d * d;
    }
    return std::sqrt(s);
  }

  bool in_domain(const Vec& x) const {
    if (int(x.size()) != params.n) return false;
    if (domain == DomainKind::WholeSpace) return true;
    if (distance_to_singular(x) == 0.0) return false;
    if (domain == DomainKind::PuncturedBall) {
      double r = 0.0;
      for (double xi : x) r += xi * xi;
      if (std::sqrt(r) >= domain_radius) return false;
    }
    return true;
  }

  void require_in_domain(const Vec& x) const {
    if (int(x.size()) != params.n)
      fail(ErrorCode::DomainError, "point dimension mismatch",
           "expected n=" + std::to_string(params.n));
    if (domain != DomainKind::WholeSpace && distance_to_singular(x) == 0.0)
      fail(ErrorCode::SingularPoint, "evaluation at the singular point");
    if (!in_domain(x)) fail(ErrorCode::DomainError, "point outside the field's domain");
  }

  Vec at(const Vec& x) const {
    require_in_domain(x);
    return value(x);
  }

  std::vector<Vec> gradient_at(const Vec& x) const;
};

// 4th-order central differences ------------------------------------------

inline std::vector<Vec> fd_gradient(const FieldEvaluator& u, const Vec& x, double h = 1e-2) {
  std::vector<Vec> g(u.params.m, Vec(u.params.n, 0.0));
  Vec p = x;
  for (int j = 0; j < u.params.n; ++j) {
    const double xj = x[j];
    p[j] = xj + 2 * h; Vec f2p = u.at(p);
    p[j] = xj + h;     Vec f1p = u.at(p);
    p[j] = xj - h;     Vec f1m = u.at(p);
    p[j] = xj - 2 * h; Vec f2m = u.at(p);
    p[j] = xj;
    for (int i = 0; i < u.params.m; ++i)
      g[i][j] = (-f2p[i] + 8.0 * f1p[i] - 8.0 * f1m[i] + f2m[i]) / (12.0 * h);
  }
  return g;
}

inline std::vector<Vec> FieldEvaluator::gradient_at(const Vec& x) const {
  require_in_domain(x);
  if (gradient) return gradient(x);
  return fd_gradient(*this, x);
}

inline void require_stencil_in_domain(const FieldEvaluator& u, const Vec& x, double h) {
  Vec p = x;
  u.require_in_domain(x);
  for (int j = 0; j < u.params.n; ++j) {
    const double xj = x[j];
    for (double d : {-2 * h, -h, h, 2 * h}) {
      p[j] = xj + d;
      if (!u.in_domain(p))
        fail(ErrorCode::DomainError, "finite-difference stencil leaves the domain");
    }
    p[j] = xj;
  }
}

inline Vec fd_laplacian(const FieldEvaluator& u, const Vec& x, double h = 1e-2) {
  require_stencil_in_domain(u, x, h);
  Vec lap(u.params.m, 0.0);
  Vec p = x;
  const Vec f0 = u.value(x);
  for (int j = 0; j < u.params.n; ++j) {
    const double xj = x[j];
    p[j] = xj + 2 * h; Vec f2p = u.value(p);
    p[j] = xj + h;     Vec f1p = u.value(p);
    p[j] = xj - h;     Vec f1m = u.value(p);
    p[j] = xj - 2 * h; Vec f2m = u.value(p);
    p[j] = xj;
    for (int i = 0; i < u.params.m; ++i)
      lap[i] += (-f2p[i] + 16.0 * f1p[i] - 30.0 * f0[i] + 16.0 * f1m[i] - f2m[i]) /
                (12.0 * h * h);
  }
  return lap;
}

// One Richardson halving on top of the 4th-order stencil: (16 L_{h/2} - L_h)/15.
inline Vec fd_laplacian_refined(const FieldEvaluator& u, const Vec& x, double h = 1e-2) {
  const Vec c = fd_laplacian(u, x, h);
  const Vec f = fd_laplacian(u, x, 0.5 * h);
  Vec out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = (16.0 * f[i] - c[i]) / 15.0;
  return out;
}

// Numerical check of the equation: -Lap_h u - |u|^{alpha-1} u at x.
inline Vec residual(const FieldEvaluator& u, const Vec& x, double h = 1e-2) {
  const Vec lap = fd_laplacian_refined(u, x, h);
  const Vec nl = power_nonlinearity(u.at(x), u.params.alpha);
  Vec r(lap.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -lap[i] - nl[i];
  return r;
}

}  // namespace emden
