#include <random>

#include "emden/emden.hpp"
#include "test_util.hpp"

using namespace emden;

namespace {

Vec unit_dir(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec d(n);
  double s = 0.0;
  do {
    for (double& c : d) c = g(rng);
    s = norm(d);
  } while (s < 1e-3);
  for (double& c : d) c /= s;
  return d;
}

}  // namespace

TEST_CASE("cylindrical scale maps homogeneous solutions to equilibria", "[transforms]") {
  ProblemParams p{5, 2, 2.0};
  const DerivedConstants c = derive_constants(p);
  const FieldEvaluator u = homogeneous_singular(p, {0.6, 0.8});

  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    CylinderPoint cp{-3.0 + 0.7 * k, unit_dir(rng, p.n)};
    const Vec v = to_cylindrical(u, cp, c);
    // lambda^{1/(alpha-1)} = 2 for (n, alpha) = (5, 2)
    CHECK_THAT(v[0], WithinAbs(2.0 * 0.6, 1e-12));
    CHECK_THAT(v[1], WithinAbs(2.0 * 0.8, 1e-12));
  }
}

TEST_CASE("cylindrical scale on the unit bubble", "[transforms]") {
  const FieldEvaluator u = bubble(4, 1, {0, 0, 0, 0}, 1.0, {1.0});
  const DerivedConstants c = derive_constants(u.params);

  std::mt19937_64 rng(11);
  for (double t : {-2.0, -0.5, 0.0, 0.4, 3.0}) {
    CylinderPoint cp{t, unit_dir(rng, 4)};
    const Vec v = to_cylindrical(u, cp, c);
    const double expect = std::sqrt(8.0) / (std::exp(t) + std::exp(-t));
    CHECK_THAT(v[0], WithinRel(expect, 1e-13));
  }
  // at t = 0 the profile value is sqrt(2)
  const Vec v0 = to_cylindrical(u, CylinderPoint{0.0, {1, 0, 0, 0}}, c);
  CHECK_THAT(v0[0], WithinAbs(std::sqrt(2.0), 1e-13));
}

TEST_CASE("cylindrical round trip is the identity", "[transforms]") {
  const FieldEvaluator u = bubble(4, 2, {0.3, 0, -0.1, 0}, 0.8, {0.6, 0.8});
  const DerivedConstants c = derive_constants(u.params);
  auto v = [&](const CylinderPoint& cp) { return to_cylindrical(u, cp, c); };

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> rad(0.05, 5.0);
  for (int k = 0; k < 25; ++k) {
    Vec x = unit_dir(rng, 4);
    const double r = rad(rng);
    for (double& xi : x) xi *= r;
    const Vec back = from_cylindrical(v, x, u.params, c);
    const Vec direct = u.at(x);
    for (int i = 0; i < 2; ++i) CHECK_THAT(back[i], WithinAbs(direct[i], 1e-12 * (1.0 + std::abs(direct[i]))));
  }
}

TEST_CASE("cylindrical maps reject bad inputs", "[transforms]") {
  ProblemParams p{4, 1, 3.0};
  const DerivedConstants c = derive_constants(p);
  const FieldEvaluator u = bubble(4, 1, {0, 0, 0, 0}, 1.0, {1.0});

  require_error(ErrorCode::InvalidParams,
                [&] { to_cylindrical(u, CylinderPoint{0.0, {0.9, 0, 0, 0}}, c); });
  auto v = [&](const CylinderPoint& cp) { return to_cylindrical(u, cp, c); };
  require_error(ErrorCode::SingularPoint,
                [&] { from_cylindrical(v, Vec{0, 0, 0, 0}, p, c); });

  // evaluation outside a punctured-ball domain propagates as a domain error
  FieldEvaluator ball = u;
  ball.domain = DomainKind::PuncturedBall;
  ball.domain_radius = 1.0;
  ball.singular_point = Vec(4, 0.0);
  ball.regular_at_origin = false;
  require_error(ErrorCode::DomainError,
                [&] { to_cylindrical(ball, CylinderPoint{-1.0, {1, 0, 0, 0}}, c); });
}

TEST_CASE("lower-critical scale inverts its model profile", "[transforms]") {
  const int n = 4;
  ProblemParams p{n, 1, serrin_exponent(n)};
  const double c0 = 1.7;

  FieldEvaluator u;
  u.params = p;
  u.domain = DomainKind::PuncturedBall;
  u.domain_radius = 1.0;
  u.singular_point = Vec(n, 0.0);
  u.radial = true;
  u.regular_at_origin = false;
  u.value = [n, c0](const Vec& x) {
    const double r = norm(x);
    const double v = c0 * std::pow(r, 2 - n) * std::pow(-std::log(r), -(n - 2) / 2.0);
    return Vec{v};
  };

  std::mt19937_64 rng(31);
  for (double t : {0.3, 1.0, 2.5, 8.0, 20.0}) {
    const Vec phi = lower_critical_to_phi(u, CylinderPoint{t, unit_dir(rng, n)});
    CHECK_THAT(phi[0], WithinRel(c0, 1e-12));
  }

  require_error(ErrorCode::DomainError,
                [&] { lower_critical_to_phi(u, CylinderPoint{0.0, {1, 0, 0, 0}}); });
  require_error(ErrorCode::DomainError,
                [&] { lower_critical_to_phi(u, CylinderPoint{-0.5, {1, 0, 0, 0}}); });

  const FieldEvaluator wrong = bubble(4, 1, {0, 0, 0, 0}, 1.0, {1.0});
  require_error(ErrorCode::RegimeError,
                [&] { lower_critical_to_phi(wrong, CylinderPoint{1.0, {1, 0, 0, 0}}); });
}

TEST_CASE("Kelvin transform fixes the critical homogeneous solution", "[transforms]") {
  const FieldEvaluator u = critical_homogeneous(4, 1, {1.0});
  const FieldEvaluator k = kelvin(u, {0, 0, 0, 0}, 1.0);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> rad(0.2, 4.0);
  for (int i = 0; i < 20; ++i) {
    Vec y = unit_dir(rng, 4);
    const double r = rad(rng);
    for (double& c : y) c *= r;
    CHECK_THAT(k.at(y)[0], WithinRel(u.at(y)[0], 1e-12));
  }
}

TEST_CASE("Kelvin transform about its own scale fixes the centered bubble", "[transforms]") {
  const double r = 1.3;
  const FieldEvaluator u = bubble(4, 1, {0, 0, 0, 0}, r, {1.0});
  const FieldEvaluator k = kelvin(u, {0, 0, 0, 0}, r);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> rad(0.2, 4.0);
  for (int i = 0; i < 20; ++i) {
    Vec y = unit_dir(rng, 4);
    const double s = rad(rng);
    for (double& c : y) c *= s;
    CHECK_THAT(k.at(y)[0], WithinRel(u.at(y)[0], 1e-12));
  }
}

TEST_CASE("Kelvin transform is an involution", "[transforms]") {
  const Vec z{0.5, -0.2, 0, 0.1};
  const FieldEvaluator u = bubble(4, 2, {0.1, 0, 0, 0}, 0.9, {0.8, 0.6});
  const FieldEvaluator kk = kelvin(kelvin(u, z, 0.7), z, 0.7);

  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> rad(0.3, 3.0);
  for (int i = 0; i < 20; ++i) {
    Vec y = unit_dir(rng, 4);
    const double s = rad(rng);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = z[j] + s * y[j];
    const Vec a = kk.at(y);
    const Vec b = u.at(y);
    for (int j = 0; j < 2; ++j) CHECK_THAT(a[j], WithinAbs(b[j], 1e-10 * (1.0 + std::abs(b[j]))));
  }
}

TEST_CASE("Kelvin transform guards its inputs", "[transforms]") {
  const FieldEvaluator u = bubble(4, 1, {0, 0, 0, 0}, 1.0, {1.0});
  require_error(ErrorCode::RangeError, [&] { kelvin(u, {0, 0, 0, 0}, 0.0); });
  require_error(ErrorCode::RangeError, [&] { kelvin(u, {0, 0, 0, 0}, -1.0); });
  require_error(ErrorCode::InvalidParams, [&] { kelvin(u, {0, 0, 0}, 1.0); });

  const Vec z{0.4, 0, 0, 0};
  const FieldEvaluator k = kelvin(u, z, 1.0);
  require_error(ErrorCode::SingularPoint, [&] { k.at(z); });
}

TEST_CASE("Kelvin image satisfies the weighted equation", "[transforms]") {
  // After inversion, -Delta u* = (r/|y-z|)^{(alpha-1) mu} |u*|^{alpha-1} u*.
  // At the critical exponent mu = 0 and the weight collapses to 1.
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> rad(0.6, 1.6);

  struct Case {
    FieldEvaluator u;
    Vec z;
    double r;
  };
  const std::vector<Case> cases = {
      {bubble(4, 1, {0.5, 0, 0, 0}, 1.0, {1.0}), Vec{0, 0, 0, 0}, 1.0},
      {homogeneous_singular(ProblemParams{5, 1, 2.0}, {1.0}), Vec{0, 0, 0, 0, 0}, 1.2},
      {critical_homogeneous(4, 2, {0.6, 0.8}), Vec{0, 0, 0, 0}, 0.8},
  };

  for (const auto& cs : cases) {
    const FieldEvaluator k = kelvin(cs.u, cs.z, cs.r);
    const ProblemParams& p = cs.u.params;
    const DerivedConstants dc = derive_constants(p);
    for (int i = 0; i < 6; ++i) {
      Vec y = unit_dir(rng, p.n);
      const double s = rad(rng);
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = cs.z[j] + s * y[j];

      const Vec lap = fd_laplacian_refined(k, y, 5e-3);
      const double w = std::pow(cs.r / s, (p.alpha - 1.0) * dc.mu);
      Vec rhs = power_nonlinearity(k.at(y), p.alpha);
      double scale = 0.0;
      for (std::size_t j = 0; j < rhs.size(); ++j) {
        rhs[j] *= w;
        scale = std::max(scale, std::abs(rhs[j]));
      }
      for (std::size_t j = 0; j < rhs.size(); ++j)
        CHECK_THAT(-lap[j], WithinAbs(rhs[j], 1e-5 * std::max(scale, 1e-12)));
    }
  }
}

TEST_CASE("rescale acts as a multiplicative semigroup", "[transforms]") {
  const FieldEvaluator u = bubble(4, 2, {0.2, -0.1, 0, 0}, 1.1, {0.6, 0.8});
  const FieldEvaluator a = rescale(rescale(u, 1.7), 0.4);
  const FieldEvaluator b = rescale(u, 1.7 * 0.4);

  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> rad(0.2, 3.0);
  for (int i = 0; i < 15; ++i) {
    Vec x = unit_dir(rng, 4);
    const double s = rad(rng);
    for (double& c : x) c *= s;
    const Vec va = a.at(x);
    const Vec vb = b.at(x);
    for (int j = 0; j < 2; ++j) CHECK_THAT(va[j], WithinAbs(vb[j], 1e-12 * (1.0 + std::abs(vb[j]))));
    // gradients pick up one extra factor of the scale
    const auto ga = a.gradient_at(x);
    const auto gb = b.gradient_at(x);
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 4; ++l)
        CHECK_THAT(ga[j][l], WithinAbs(gb[j][l], 1e-10 * (1.0 + std::abs(gb[j][l]))));
  }
}

TEST_CASE("rescale fixed points and normalization", "[transforms]") {
  // homogeneous solutions of degree -2/(alpha-1) are scaling-invariant
  const FieldEvaluator h = homogeneous_singular(ProblemParams{5, 1, 2.0}, {1.0});
  const FieldEvaluator hr = rescale(h, 3.7);
  std::mt19937_64 rng(61);
  for (int i = 0; i < 10; ++i) {
    Vec x = unit_dir(rng, 5);
    for (double& c : x) c *= 0.3 + 0.2 * i;
    CHECK_THAT(hr.at(x)[0], WithinRel(h.at(x)[0], 1e-13));
  }

  const FieldEvaluator u = bubble(4, 1, {0, 0, 0, 0}, 1.0, {1.0});
  const FieldEvaluator id = rescale(u, 1.0);
  CHECK_THAT(id.at({0.3, 0, 0, 0})[0], WithinRel(u.at({0.3, 0, 0, 0})[0], 1e-15));

  // n=4, alpha=3: rescale by 2 doubles the centre value of the unit bubble
  const FieldEvaluator u2 = rescale(u, 2.0);
  CHECK_THAT(u2.at({0, 0, 0, 0})[0], WithinRel(2.0 * std::sqrt(8.0), 1e-13));

  require_error(ErrorCode::RangeError, [&] { rescale(u, 0.0); });
  require_error(ErrorCode::RangeError, [&] { rescale(u, -2.0); });
}

TEST_CASE("rescale moves the singular set and domain radius", "[transforms]") {
  const Vec z{0.8, 0, 0, 0};
  FieldEvaluator k = kelvin(bubble(4, 1, {0, 0, 0, 0}, 1.0, {1.0}), z, 1.0);
  k.domain = DomainKind::PuncturedBall;
  k.domain_radius = 2.0;

  const FieldEvaluator kr = rescale(k, 4.0);
  REQUIRE(kr.singular_point.size() == 4);
  CHECK_THAT(kr.singular_point[0], WithinAbs(0.2, 1e-15));
  CHECK_THAT(kr.domain_radius, WithinAbs(0.5, 1e-15));
  require_error(ErrorCode::SingularPoint, [&] { kr.at({0.2, 0, 0, 0}); });
  require_error(ErrorCode::DomainError, [&] { kr.at({0.45, 0.3, 0, 0}); });
}

TEST_CASE("finite-difference residual vanishes on exact solutions", "[transforms]") {
  const FieldEvaluator u = bubble(4, 1, {0, 0, 0, 0}, 1.0, {1.0});
  const Vec x{0.3, 0, 0, 0};
  const double mag = std::pow(std::abs(u.at(x)[0]), 3.0);
  CHECK(norm(residual(u, x)) < 1e-5 * mag);

  const FieldEvaluator h = homogeneous_singular(ProblemParams{5, 1, 2.0}, {1.0});
  const Vec y{1, 0, 0, 0, 0};
  const double magh = std::pow(std::abs(h.at(y)[0]), 2.0);
  CHECK(norm(residual(h, y)) < 1e-5 * magh);

  FieldEvaluator zero;
  zero.params = ProblemParams{4, 2, 3.0};
  zero.value = [](const Vec&) { return Vec(2, 0.0); };
  CHECK(norm(residual(zero, {0.1, 0.2, 0, 0})) == 0.0);
}

TEST_CASE("analytic gradients agree with finite differences", "[transforms]") {
  const FieldEvaluator u = bubble(5, 2, {0.3, 0, 0, 0, -0.2}, 0.9, {0.6, 0.8});
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> rad(0.4, 2.0);
  for (int i = 0; i < 8; ++i) {
    Vec x = unit_dir(rng, 5);
    const double s = rad(rng);
    for (double& c : x) c *= s;
    const auto ga = u.gradient_at(x);
    const auto gf = fd_gradient(u, x, 1e-3);
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 5; ++l) CHECK_THAT(ga[j][l], WithinAbs(gf[j][l], 1e-8));
  }
}
