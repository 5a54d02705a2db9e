#pragma once

#include <cmath>
#include <functional>

#include "emden/field.hpp"
#include "emden/params.hpp"

namespace emden {

struct CylinderPoint {
  double t = 0.0;  // -log |x|
  Vec theta;       // unit direction
};

inline void validate(const CylinderPoint& p) {
  if (std::abs(norm(p.theta) - 1.0) > 1e-14)
    fail(ErrorCode::InvalidParams, "cylinder direction must be a unit vector");
}

inline Vec cylinder_to_point(const CylinderPoint& p) {
  const double r = std::exp(-p.t);
  Vec x(p.theta.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = r * p.theta[i];
  return x;
}

// v(t, theta) = |x|^{2/(alpha-1)} u(x) at x = e^{-t} theta.
inline Vec to_cylindrical(const FieldEvaluator& u, const CylinderPoint& p,
                          const DerivedConstants&) {
  validate(p);
  const Vec x = cylinder_to_point(p);
  Vec v = u.at(x);
  const double scale = std::exp(-2.0 * p.t / (u.params.alpha - 1.0));
  for (double& vi : v) vi *= scale;
  return v;
}

// u(x) = |x|^{-2/(alpha-1)} v(-log|x|, x/|x|).
template <class VMap>
inline Vec from_cylindrical(VMap&& v, const Vec& x, const ProblemParams& params,
                            const DerivedConstants&) {
  const double r = norm(x);
  if (r == 0.0) fail(ErrorCode::SingularPoint, "cylindrical inverse undefined at the origin");
  CylinderPoint p;
  p.t = -std::log(r);
  p.theta.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p.theta[i] = x[i] / r;
  Vec u = v(p);
  const double scale = std::pow(r, -2.0 / (params.alpha - 1.0));
  for (double& ui : u) ui *= scale;
  return u;
}

// phi(t, theta) = |x|^{n-2} (-log|x|)^{(n-2)/2} u(x), defined for t > 0 at the
// lower critical exponent alpha = n/(n-2).
inline Vec lower_critical_to_phi(const FieldEvaluator& u, const CylinderPoint& p) {
  validate(p);
  if (std::abs(u.params.alpha - serrin_exponent(u.params.n)) > kRegimeTol)
    fail(ErrorCode::RegimeError, "log-corrected transform requires the lower critical exponent");
  if (!(p.t > 0.0))
    fail(ErrorCode::DomainError, "log-corrected transform requires -log|x| > 0",
         "t=" + std::to_string(p.t));
  const Vec x = cylinder_to_point(p);
  Vec phi = u.at(x);
  const double scale =
      std::exp(-(u.params.n - 2) * p.t) * std::pow(p.t, 0.5 * (u.params.n - 2));
  for (double& c : phi) c *= scale;
  return phi;
}

// Kelvin transform u*(y) = (r/|y-z|)^{n-2} u(z + r^2 (y-z)/|y-z|^2). The result
// solves the equation up to the conformal weight (r/|y-z|)^{(alpha-1) mu}.
inline FieldEvaluator kelvin(const FieldEvaluator& u, const Vec& z, double r) {
  if (!(r > 0.0)) fail(ErrorCode::RangeError, "Kelvin radius must be positive");
  if (int(z.size()) != u.params.n)
    fail(ErrorCode::InvalidParams, "Kelvin center dimension mismatch");

  const int n = u.params.n;
  auto invert = [z, r, n](const Vec& y) {
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) d2 += (y[i] - z[i]) * (y[i] - z[i]);
    if (d2 == 0.0) fail(ErrorCode::SingularPoint, "Kelvin transform singular at its center");
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = z[i] + r * r * (y[i] - z[i]) / d2;
    return std::pair<Vec, double>(std::move(x), std::sqrt(d2));
  };

  FieldEvaluator out;
  out.params = u.params;
  out.domain = DomainKind::PuncturedSpace;
  out.singular_point = z;
  out.radial = false;
  out.regular_at_origin = false;
  FieldEvaluator src = u;  // capture by value: evaluators are immutable
  out.value = [src, invert, r, n](const Vec& y) {
    auto [x, d] = invert(y);
    Vec val = src.at(x);
    const double scale = std::pow(r / d, n - 2);
    for (double& c : val) c *= scale;
    return val;
  };
  // No tractable closed-form gradient in general; differentiate the value map.
  FieldEvaluator forgrad = out;
  out.gradient = [forgrad](const Vec& y) { return fd_gradient(forgrad, y); };
  return out;
}

// Scaling map u_r(x) = r^{2/(alpha-1)} u(r x).
inline FieldEvaluator rescale(const FieldEvaluator& u, double r) {
  if (!(r > 0.0)) fail(ErrorCode::RangeError, "rescale factor must be positive");
  const double q = 2.0 / (u.params.alpha - 1.0);
  const double sv = std::pow(r, q);

  FieldEvaluator out;
  out.params = u.params;
  out.domain = u.domain;
  out.singular_point = u.singular_point;
  for (double& c : out.singular_point) c /= r;
  out.radial = u.radial;
  out.regular_at_origin = u.regular_at_origin;
  if (u.domain == DomainKind::PuncturedBall) out.domain_radius = u.domain_radius / r;

  FieldEvaluator src = u;
  auto scale_point = [r](const Vec& x) {
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = r * x[i];
    return y;
  };
  out.value = [src, scale_point, sv](const Vec& x) {
    Vec v = src.at(scale_point(x));
    for (double& c : v) c *= sv;
    return v;
  };
  if (u.has_gradient()) {
    const double sg = sv * r;
    out.gradient = [src, scale_point, sg](const Vec& x) {
      auto g = src.gradient_at(scale_point(x));
      for (auto& row : g)
        for (double& c : row) c *= sg;
      return g;
    };
  } else {
    FieldEvaluator forgrad = out;
    out.gradient = [forgrad](const Vec& x) { return fd_gradient(forgrad, x); };
  }
  if (u.has_laplacian()) {
    const double sl = sv * r * r;
    out.laplacian = [src, scale_point, sl](const Vec& x) {
      src.require_in_domain(scale_point(x));
      Vec l = src.laplacian(scale_point(x));
      for (double& c : l) c *= sl;
      return l;
    };
  }
  return out;
}

}  // namespace emden
