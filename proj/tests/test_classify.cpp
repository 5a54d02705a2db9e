#include "emden/emden.hpp"
#include "test_util.hpp"

using namespace emden;

TEST_CASE("critical pairs map onto the taxonomy", "[classify]") {
  const SingularityClass removable = classify_critical(0.0, 0.0, 4);
  CHECK(removable.tag == SingularityTag::Removable);
  CHECK_FALSE(removable.law.has_value());

  const SingularityClass hom = classify_critical(-0.5, 0.0, 4);
  CHECK(hom.tag == SingularityTag::CriticalHomogeneous);
  REQUIRE(hom.law.has_value());
  CHECK_THAT(hom.law->exponent, WithinAbs(-1.0, 1e-14));
  CHECK_THAT(hom.law->constant, WithinAbs(1.0, 1e-14));
  CHECK(hom.law->log_exponent == 0.0);
  CHECK_FALSE(hom.law->solution_dependent);

  const SingularityClass osc = classify_critical(0.0, -0.01, 4);
  CHECK(osc.tag == SingularityTag::CriticalOscillatory);
  REQUIRE(osc.law.has_value());
  CHECK(osc.law->solution_dependent);
  CHECK(osc.law->two_sided);
  CHECK_THAT(osc.law->exponent, WithinAbs(-1.0, 1e-14));
  REQUIRE(osc.oscillation_band.has_value());
  CHECK_THAT(osc.oscillation_band->first, WithinAbs(0.32042159688006311, 1e-9));
  CHECK_THAT(osc.oscillation_band->second, WithinAbs(1.4124357609739140, 1e-9));
  REQUIRE(osc.kappa.has_value());
  REQUIRE(osc.kappa_star.has_value());
}

TEST_CASE("critical classification near-boundary behaviour", "[classify]") {
  // measured values carry integrator noise below the default tolerance
  CHECK(classify_critical(3e-7, -4e-7, 4).tag == SingularityTag::Removable);
  CHECK(classify_critical(-0.4999997, 2e-8, 4).tag == SingularityTag::CriticalHomogeneous);
  // a genuinely interior pair stays oscillatory even with a loose tolerance
  CHECK(classify_critical(-0.2, -0.05, 4, 1e-3).tag ==
        SingularityTag::CriticalOscillatory);

  require_error(ErrorCode::RangeError, [] { classify_critical(-0.6, 0.0, 4); });
  require_error(ErrorCode::RangeError, [] { classify_critical(0.0, 0.5, 4); });
  require_error(ErrorCode::RangeError, [] { classify_critical(0.0, -0.51, 4); });
}

TEST_CASE("tolerance growth never flips exact classifications", "[classify]") {
  for (double tol : {1e-8, 1e-6, 1e-4, 1e-2}) {
    CHECK(classify_critical(0.0, 0.0, 4, tol).tag == SingularityTag::Removable);
    CHECK(classify_critical(-0.5, 0.0, 4, tol).tag ==
          SingularityTag::CriticalHomogeneous);
  }
  // near the homogeneous corner the nearest attained value wins
  CHECK(classify_critical(-0.499, -1e-9, 4, 1e-2).tag ==
        SingularityTag::CriticalHomogeneous);
  CHECK(classify_critical(-0.001, -1e-9, 4, 1e-2).tag == SingularityTag::Removable);
}

TEST_CASE("subcritical limits form a two-point set", "[classify]") {
  const ProblemParams p{5, 1, 2.0};

  const SingularityClass rem = classify_subcritical(0.0, p);
  CHECK(rem.tag == SingularityTag::Removable);

  const SingularityClass sing = classify_subcritical(-8.0 / 3.0, p);
  CHECK(sing.tag == SingularityTag::SubcriticalSingular);
  REQUIRE(sing.law.has_value());
  CHECK_THAT(sing.law->exponent, WithinAbs(-2.0, 1e-14));
  CHECK_THAT(sing.law->constant, WithinAbs(2.0, 1e-14));
  CHECK(sing.law->log_exponent == 0.0);
  CHECK_FALSE(sing.law->solution_dependent);

  require_error(ErrorCode::InconsistencyError, [&] { classify_subcritical(-1.0, p); });
  require_error(ErrorCode::RegimeError,
                [] { classify_subcritical(0.0, ProblemParams{4, 1, 3.0}); });
  require_error(ErrorCode::RegimeError,
                [] { classify_subcritical(0.0, ProblemParams{4, 1, 2.0}); });
}

TEST_CASE("regime dispatch covers every branch", "[classify]") {
  Evidence ev;

  // trivial short-circuits everything
  ev.zero_field = true;
  CHECK(classify_by_regime(ProblemParams{4, 1, 3.0}, ev).tag == SingularityTag::Trivial);
  ev.zero_field = false;

  // critical: invariant pair
  ev.invariant_pair = std::pair<double, double>{0.0, -0.01};
  CHECK(classify_by_regime(ProblemParams{4, 2, 3.0}, ev).tag ==
        SingularityTag::CriticalOscillatory);
  ev.invariant_pair.reset();

  // intermediate: surface-functional limit
  ev.phi_limit = -8.0 / 3.0;
  CHECK(classify_by_regime(ProblemParams{5, 1, 2.0}, ev).tag ==
        SingularityTag::SubcriticalSingular);
  ev.phi_limit.reset();

  // below Serrin: fitted amplitude
  ev.fitted_amplitude = 0.7;
  const SingularityClass weak = classify_by_regime(ProblemParams{5, 1, 1.5}, ev);
  CHECK(weak.tag == SingularityTag::WeakSingular);
  REQUIRE(weak.law.has_value());
  CHECK_THAT(weak.law->exponent, WithinAbs(-3.0, 1e-14));
  CHECK_THAT(weak.law->constant, WithinAbs(0.7, 1e-14));
  CHECK(weak.law->solution_dependent);
  CHECK(weak.law->two_sided);

  ev.fitted_amplitude = 1e-9;
  CHECK(classify_by_regime(ProblemParams{5, 1, 1.5}, ev).tag == SingularityTag::Removable);
  ev.fitted_amplitude.reset();

  // Serrin: terminal energy level
  ev.terminal_energy = -8.0 / 3.0;
  const SingularityClass low = classify_by_regime(ProblemParams{4, 1, 2.0}, ev);
  CHECK(low.tag == SingularityTag::LowerCriticalSingular);
  REQUIRE(low.law.has_value());
  CHECK_THAT(low.law->exponent, WithinAbs(-2.0, 1e-14));
  CHECK_THAT(low.law->constant, WithinAbs(2.0, 1e-14));
  CHECK_THAT(low.law->log_exponent, WithinAbs(-1.0, 1e-14));

  ev.terminal_energy = 0.0;
  CHECK(classify_by_regime(ProblemParams{4, 1, 2.0}, ev).tag == SingularityTag::Removable);
  ev.terminal_energy.reset();
}

TEST_CASE("mismatched evidence is a configuration error", "[classify]") {
  Evidence ev;
  // no evidence at all
  require_error(ErrorCode::ConfigError,
                [&] { classify_by_regime(ProblemParams{4, 1, 3.0}, ev); });
  // critical regime fed a subcritical limit
  ev.phi_limit = -8.0 / 3.0;
  require_error(ErrorCode::ConfigError,
                [&] { classify_by_regime(ProblemParams{4, 1, 3.0}, ev); });
  ev.phi_limit.reset();
  // intermediate regime fed an invariant pair
  ev.invariant_pair = std::pair<double, double>{0.0, 0.0};
  require_error(ErrorCode::ConfigError,
                [&] { classify_by_regime(ProblemParams{5, 1, 2.0}, ev); });
  ev.invariant_pair.reset();
  // Serrin regime fed an amplitude
  ev.fitted_amplitude = 0.5;
  require_error(ErrorCode::ConfigError,
                [&] { classify_by_regime(ProblemParams{4, 1, 2.0}, ev); });
  // Serrin terminal energy away from both limit levels
  ev.fitted_amplitude.reset();
  ev.terminal_energy = -1.0;
  require_error(ErrorCode::InconsistencyError,
                [&] { classify_by_regime(ProblemParams{4, 1, 2.0}, ev); });
}

TEST_CASE("closed-form families classify exactly", "[classify]") {
  // bubble: regular everywhere, invariants vanish
  {
    const FieldEvaluator u = bubble(4, 1, {0.5, 0, 0, 0}, 1.0, {1.0});
    const DerivedConstants c = derive_constants(u.params);
    const SphereQuadrature q = build_sphere_quadrature(4, 16);
    const double kap = phi_surface(u, 0.25, c, q);
    const double ks = phi_star_surface(u, 0.25, kap, c, q);
    CHECK(classify_critical(kap, ks, 4).tag == SingularityTag::Removable);
  }
  // homogeneous singular: subcritical limit -lambda_bar
  {
    const ProblemParams p{5, 1, 2.0};
    const FieldEvaluator u = homogeneous_singular(p, {1.0});
    const DerivedConstants c = derive_constants(p);
    const SphereQuadrature q = build_sphere_quadrature(5, 8);
    const double lim = phi_surface(u, 1e-3, c, q);
    const SingularityClass sc = classify_subcritical(lim, p);
    CHECK(sc.tag == SingularityTag::SubcriticalSingular);
  }
  // critical homogeneous: measured trajectory invariants hit the corner
  {
    const RadialTrajectory traj =
        integrate_radial(ProblemParams{4, 1, 3.0}, {1.0}, {0.0}, 0.0, 5.0, 1e-3);
    const InvariantReport rep = kappa_of(traj);
    CHECK(classify_critical(rep.kappa, rep.kappa_star, 4).tag ==
          SingularityTag::CriticalHomogeneous);
  }
  // spiral: measured invariants stay in the oscillatory interior
  {
    const Spiral sp = spiral(4, 0.0, -0.01, 0.0, 12.0, 1e-3);
    const InvariantReport rep = kappa_of(sp.trajectory);
    CHECK(classify_critical(rep.kappa, rep.kappa_star, 4).tag ==
          SingularityTag::CriticalOscillatory);
  }
}

TEST_CASE("classification is scale invariant", "[classify]") {
  const FieldEvaluator u = bubble(4, 1, {0.5, 0, 0, 0}, 1.0, {1.0});
  const DerivedConstants c = derive_constants(u.params);
  const SphereQuadrature q = build_sphere_quadrature(4, 16);
  for (double r : {0.5, 2.0}) {
    const FieldEvaluator ur = rescale(u, r);
    const double kap = phi_surface(ur, 0.25, c, q);
    const double ks = phi_star_surface(ur, 0.25, kap, c, q);
    CHECK(classify_critical(kap, ks, 4).tag == SingularityTag::Removable);
  }

  const ProblemParams p{5, 1, 2.0};
  const DerivedConstants c5 = derive_constants(p);
  const SphereQuadrature q5 = build_sphere_quadrature(5, 8);
  for (double r : {0.3, 3.0}) {
    const FieldEvaluator ur = rescale(homogeneous_singular(p, {1.0}), r);
    const double lim = phi_surface(ur, 1e-3, c5, q5);
    CHECK(classify_subcritical(lim, p).tag == SingularityTag::SubcriticalSingular);
  }
}

TEST_CASE("amplitude fitting recovers power laws", "[classify]") {
  // exact power law |u| = 0.7 |x|^{2-n} in dimension 5
  std::vector<double> radii, mags;
  for (int k = 0; k < 40; ++k) {
    const double r = 1e-3 * std::pow(10.0, k / 39.0 * 2.0);
    radii.push_back(r);
    mags.push_back(0.7 * std::pow(r, -3.0));
  }
  CHECK_THAT(fit_amplitude(radii, mags, -3.0), WithinRel(0.7, 1e-12));

  // a perturbed law still fits to leading order over the innermost decade
  for (std::size_t k = 0; k < radii.size(); ++k)
    mags[k] = 0.7 * std::pow(radii[k], -3.0) * (1.0 + 0.05 * radii[k]);
  CHECK_THAT(fit_amplitude(radii, mags, -3.0), WithinRel(0.7, 1e-3));

  // zero samples collapse to amplitude 0
  std::vector<double> zeros(radii.size(), 0.0);
  CHECK(fit_amplitude(radii, zeros, -3.0) == 0.0);
}

TEST_CASE("tag names are stable", "[classify]") {
  CHECK(std::string(to_string(SingularityTag::Trivial)) == "Trivial");
  CHECK(std::string(to_string(SingularityTag::Removable)) == "Removable");
  CHECK(std::string(to_string(SingularityTag::SubcriticalSingular)) ==
        "SubcriticalSingular");
  CHECK(std::string(to_string(SingularityTag::CriticalOscillatory)) ==
        "CriticalOscillatory");
  CHECK(std::string(to_string(SingularityTag::CriticalHomogeneous)) ==
        "CriticalHomogeneous");
  CHECK(std::string(to_string(SingularityTag::WeakSingular)) == "WeakSingular");
  CHECK(std::string(to_string(SingularityTag::LowerCriticalSingular)) ==
        "LowerCriticalSingular");
}

TEST_CASE("classification serializes with the schema keys", "[classify]") {
  const json rem = to_json(classify_critical(0.0, 0.0, 4));
  CHECK(rem["tag"] == "Removable");
  CHECK(rem["exponent"].is_null());
  CHECK(rem["constant"].is_null());
  CHECK(rem["log_exponent"].is_null());
  CHECK(rem["solution_dependent"] == false);

  const json hom = to_json(classify_critical(-0.5, 0.0, 4));
  CHECK(hom["tag"] == "CriticalHomogeneous");
  CHECK_THAT(hom["exponent"].get<double>(), WithinAbs(-1.0, 1e-14));
  CHECK_THAT(hom["constant"].get<double>(), WithinAbs(1.0, 1e-14));

  const json osc = to_json(classify_critical(0.0, -0.01, 4));
  CHECK(osc["tag"] == "CriticalOscillatory");
  CHECK(osc["solution_dependent"] == true);
  CHECK(osc["constant"].is_null());  // no closed-form constant exists
  CHECK(osc.contains("oscillation_band"));
  CHECK(osc.contains("kappa_star"));
}
