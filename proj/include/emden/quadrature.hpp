#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "emden/errors.hpp"
#include "emden/params.hpp"

namespace emden {

// Product quadrature on S^{n-1} built from one Gauss rule per polar angle and
// a midpoint rule in the azimuthal angle. Writing x = cos(phi_k), the k-th
// polar integral carries the Jacobian sin^{n-1-k}(phi_k) d phi_k, i.e. the
// weight (1-x^2)^{(n-2-k)/2} dx on [-1,1]; the nodes below are the Gauss
// points of exactly that weight, so polynomial integrands restricted to the
// sphere are integrated to machine precision far beyond the declared degree.
struct SphereQuadrature {
  int n = 0;
  int order = 0;
  int exact_degree = 0;      // declared: monomials up to this degree are exact
  std::size_t count = 0;
  std::vector<double> nodes;    // count * n, unit vectors, row-major
  std::vector<double> weights;  // count entries, sum equals the sphere area

  const double* node(std::size_t i) const { return nodes.data() + i * std::size_t(n); }
};

namespace detail {

struct GaussRule {
  std::vector<double> x, w;
};

// Gauss nodes/weights for the weight (1-x^2)^gamma on [-1,1], via the
// three-term recurrence of the orthonormal polynomials:
//   beta_0 = sqrt(pi) Gamma(gamma+1) / Gamma(gamma+3/2)   (total weight mass)
//   beta_k = k (k+2 gamma) / ((2k+2 gamma+1)(2k+2 gamma-1))
// Roots are isolated by a sign scan on a cosine-spaced grid and polished with
// safeguarded Newton; weights are the inverse Christoffel sums.
inline GaussRule gauss_gegenbauer(int p, double gamma) {
  std::vector<double> sb(p + 1);  // sqrt(beta_k)
  sb[0] = std::sqrt(std::sqrt(std::numbers::pi) * std::tgamma(gamma + 1.0) /
                    std::tgamma(gamma + 1.5));
  for (int k = 1; k <= p; ++k) {
    const double bk =
        k * (k + 2.0 * gamma) / ((2.0 * k + 2.0 * gamma + 1.0) * (2.0 * k + 2.0 * gamma - 1.0));
    sb[k] = std::sqrt(bk);
  }

  // Evaluate the orthonormal p_p and its derivative; optionally collect the
  // Christoffel sum over p_0..p_{p-1}.
  auto eval = [&](double x, double* christoffel) {
    double pm1 = 0.0, p0 = 1.0 / sb[0];
    double dm1 = 0.0, d0 = 0.0;
    double sum = p0 * p0;
    for (int k = 1; k <= p; ++k) {
      const double pk = (x * p0 - sb[k - 1] * pm1) / sb[k];
      const double dk = (p0 + x * d0 - sb[k - 1] * dm1) / sb[k];
      pm1 = p0; p0 = pk;
      dm1 = d0; d0 = dk;
      if (k < p) sum += p0 * p0;
    }
    if (christoffel) *christoffel = sum;
    struct { double f, df; } r{p0, d0};
    return r;
  };

  const int grid = 20 * p + 1;
  std::vector<double> xs(grid), fs(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = -std::cos(std::numbers::pi * i / (grid - 1));
    fs[i] = eval(xs[i], nullptr).f;
  }

  GaussRule rule;
  for (int i = 0; i + 1 < grid; ++i) {
    if (!(fs[i] == 0.0) && fs[i] * fs[i + 1] > 0.0) continue;
    double a = xs[i], b = xs[i + 1];
    double fa = fs[i];
    double x = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
      const auto e = eval(x, nullptr);
      if (fa * e.f <= 0.0) b = x; else { a = x; fa = e.f; }
      double xn = x - e.f / e.df;
      if (!(xn > a) || !(xn < b)) xn = 0.5 * (a + b);
      if (std::abs(xn - x) < 1e-16) { x = xn; break; }
      x = xn;
    }
    double chr = 0.0;
    eval(x, &chr);
    rule.x.push_back(x);
    rule.w.push_back(1.0 / chr);
  }
  if (int(rule.x.size()) != p)
    fail(ErrorCode::NumericError, "polar quadrature root count mismatch",
         "expected " + std::to_string(p) + ", got " + std::to_string(rule.x.size()));
  return rule;
}

}  // namespace detail

inline SphereQuadrature build_sphere_quadrature(int n, int order) {
  if (n < 3) fail(ErrorCode::InvalidParams, "sphere quadrature needs n >= 3",
                  "n=" + std::to_string(n));
  if (n > 6) fail(ErrorCode::CapabilityError, "sphere quadrature capped at n <= 6",
                  "n=" + std::to_string(n));
  if (order < 2) fail(ErrorCode::InvalidParams, "quadrature order must be >= 2",
                      "order=" + std::to_string(order));

  std::vector<detail::GaussRule> polar;
  for (int k = 1; k <= n - 2; ++k)
    polar.push_back(detail::gauss_gegenbauer(order, 0.5 * (n - 2 - k)));

  const int M = 2 * order;
  const double wpsi = 2.0 * std::numbers::pi / M;

  SphereQuadrature q;
  q.n = n;
  q.order = order;
  q.exact_degree = order - 1;

  std::size_t combos = 1;
  for (const auto& r : polar) combos *= r.x.size();
  q.count = combos * std::size_t(M);
  q.nodes.resize(q.count * n);
  q.weights.resize(q.count);

  std::vector<int> idx(polar.size(), 0);
  std::size_t out = 0;
  for (std::size_t c = 0; c < combos; ++c) {
    double wpol = 1.0;
    for (std::size_t k = 0; k < polar.size(); ++k) wpol *= polar[k].w[idx[k]];
    for (int j = 0; j < M; ++j) {
      const double psi = wpsi * (j + 0.5);
      double* pt = q.nodes.data() + out * n;
      double s = 1.0;
      for (std::size_t k = 0; k < polar.size(); ++k) {
        const double cx = polar[k].x[idx[k]];
        pt[k] = s * cx;
        s *= std::sqrt(std::max(0.0, 1.0 - cx * cx));
      }
      pt[n - 2] = s * std::cos(psi);
      pt[n - 1] = s * std::sin(psi);
      q.weights[out] = wpol * wpsi;
      ++out;
    }
    for (int k = int(polar.size()) - 1; k >= 0; --k) {
      if (++idx[k] < int(polar[k].x.size())) break;
      idx[k] = 0;
    }
  }
  return q;
}

// Sum of w_i f(node_i); f receives a pointer to the n coordinates.
template <class F>
inline double integrate_sphere(const SphereQuadrature& q, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < q.count; ++i) {
    const double v = f(q.node(i));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "node index " << i;
      fail(ErrorCode::NumericError, "non-finite integrand value on the sphere", os.str());
    }
    acc += q.weights[i] * v;
  }
  return acc;
}

// Closed-form moment of a sphere monomial prod x_i^{a_i}: zero if any a_i is
// odd, else 2 prod Gamma(b_i) / Gamma(sum b_i) with b_i = (a_i+1)/2.
inline double sphere_monomial_moment(const std::vector<int>& exps) {
  for (int a : exps)
    if (a % 2) return 0.0;
  double logprod = 0.0, bsum = 0.0;
  for (int a : exps) {
    const double b = 0.5 * (a + 1);
    logprod += std::lgamma(b);
    bsum += b;
  }
  return 2.0 * std::exp(logprod - std::lgamma(bsum));
}

}  // namespace emden
