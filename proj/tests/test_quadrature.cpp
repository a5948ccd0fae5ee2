#include <doctest.h>

#include "g2forms/bump.hpp"
#include "g2forms/error.hpp"
#include "g2forms/quadrature.hpp"
#include "g2forms/rng.hpp"

using namespace g2f;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("unit ball volume: closed form, moment reduction, monte carlo") {
  const double exact = 16.0 * std::pow(M_PI, 3) / 105.0;
  CHECK(exact == doctest::Approx(4.724766).epsilon(1e-6));

  QuadratureSpec spec;
  StructuredScalar one = {{RadialProfile::constant(), Monomial{}, 1.0}};
  const IntegralResult mr = integrate_structured(Domain7::ball(1.0), one, EVec7::Zero(), spec);
  CHECK(mr.value == doctest::Approx(exact).epsilon(1e-13));

  spec.method = QuadMethod::MonteCarlo;
  spec.samples = 1000000;
  const IntegralResult mc =
      integrate(Domain7::ball(1.0), [](const EVec7&) { return 1.0; }, spec);
  CHECK(std::abs(mc.value - exact) <= 1e-9);  // constant integrand: zero variance
}

TEST_CASE("angular moments: area, odd vanishing, trace identity") {
  const AngularMoment a0 = angular_moment(Monomial{});
  CHECK(a0.value() == doctest::Approx(16.0 * std::pow(M_PI, 3) / 15.0).epsilon(1e-15));

  Monomial m1{};
  m1[0] = 1;
  CHECK(angular_moment(m1).rational.is_zero());

  // trace oracle: the seven second moments sum to the full area
  Monomial m2{};
  m2[0] = 2;
  const AngularMoment x2 = angular_moment(m2);
  CHECK(7.0 * x2.value() == doctest::Approx(a0.value()).epsilon(1e-15));
  CHECK((x2.rational * Rat(7)) == a0.rational);  // exactly Area/7
}

TEST_CASE("symmetry: (f'/r)^2 ((x_i)^2 - (x_j)^2) integrates to exactly zero") {
  auto bump = std::make_shared<Bump>(1.0, 0.3, 0.8);
  RadialProfile prof;
  prof.bump = bump;
  prof.factors = {{1, 2}};
  prof.rpow = -2;
  QuadratureSpec spec;
  for (auto [i, j] : {std::pair{0, 3}, {1, 6}, {2, 4}}) {
    Monomial mi{}, mj{};
    mi[i] = 2;
    mj[j] = 2;
    StructuredScalar s = {{prof, mi, 1.0}, {prof, mj, -1.0}};
    const IntegralResult r = integrate_structured(Domain7::ball(1.0), s, EVec7::Zero(), spec);
    CHECK(r.value == 0.0);  // equal radial factors against equal angular moments
  }
}

TEST_CASE("moment reduction vs monte carlo within 3 standard errors") {
  auto bump = std::make_shared<Bump>(1.0, 0.3, 0.8);
  RadialProfile prof;
  prof.bump = bump;
  prof.factors = {{1, 2}};
  prof.rpow = -2;
  StructuredScalar s;
  for (int i = 3; i < 7; ++i) {
    Monomial m{};
    m[i] = 2;
    s.push_back({prof, m, 1.0});
  }
  QuadratureSpec spec;
  const double exact = integrate_structured(Domain7::ball(1.0), s, EVec7::Zero(), spec).value;

  spec.method = QuadMethod::MonteCarlo;
  spec.samples = 400000;
  const EVec7 center = EVec7::Zero();
  const IntegralResult mc = integrate(
      Domain7::ball(1.0), [&](const EVec7& x) { return eval_structured_scalar(s, x, center); },
      spec);
  CHECK(std::abs(mc.value - exact) <= 3.0 * mc.error);
  CHECK(mc.error > 0);
}

TEST_CASE("identical seeds reproduce monte carlo bit-exactly") {
  QuadratureSpec spec;
  spec.method = QuadMethod::MonteCarlo;
  spec.samples = 50000;
  spec.seed = 777;
  auto f = [](const EVec7& x) { return std::sin(x[0]) + x[3] * x[3]; };
  const double a = integrate(Domain7::ball(1.0), f, spec).value;
  const double b = integrate(Domain7::ball(1.0), f, spec).value;
  CHECK(a == b);
  spec.seed = 778;
  CHECK(integrate(Domain7::ball(1.0), f, spec).value != a);
}

TEST_CASE("scaling: vol(B_lambda) = lambda^7 vol(B_1) under moment reduction") {
  QuadratureSpec spec;
  StructuredScalar one = {{RadialProfile::constant(), Monomial{}, 1.0}};
  const double v1 = integrate_structured(Domain7::ball(1.0), one, EVec7::Zero(), spec).value;
  const double v2 = integrate_structured(Domain7::ball(2.0), one, EVec7::Zero(), spec).value;
  CHECK(v2 == doctest::Approx(128.0 * v1).epsilon(1e-13));
}

TEST_CASE("adaptive 1d matches closed forms") {
  double err = 0;
  const double v = adaptive_1d([](double x) { return std::exp(-x) * std::sin(3 * x); }, 0.0, 2.0,
                               1e-12, &err);
  // int exp(-x) sin(3x) = (3 - e^-2 (3 cos 6 + ... )) / 10
  const double exact =
      (3.0 - std::exp(-2.0) * (3.0 * std::cos(6.0) + std::sin(6.0))) / 10.0;
  CHECK(v == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("gauss rules integrate matching-weight polynomials exactly") {
  for (double alpha : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const Rule1D r = gauss_gegenbauer(6, alpha);
    // degree-10 polynomial x^10 against (1-x^2)^alpha
    double acc = 0;
    for (size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * std::pow(r.x[i], 10);
    double exact = 0, errq = 0;
    exact = adaptive_1d(
        [&](double x) { return std::pow(1 - x * x, alpha) * std::pow(x, 10); }, -1.0, 1.0, 1e-13,
        &errq);
    CHECK(acc == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("sphere rule: total weight and exact even moments") {
  const SphereRule& S = sphere_rule(7);
  double total = 0;
  for (double w : S.w) total += w;
  CHECK(total == doctest::Approx(sphere_area6()).epsilon(1e-13));
  // x1^2 x4^4 has degree 6 <= 7: integrated exactly
  double acc = 0;
  for (size_t i = 0; i < S.x.size(); ++i)
    acc += S.w[i] * S.x[i][0] * S.x[i][0] * std::pow(S.x[i][3], 4);
  Monomial m{};
  m[0] = 2;
  m[3] = 4;
  CHECK(acc == doctest::Approx(angular_moment(m).value()).epsilon(1e-12));
}

TEST_CASE("torus trapezoid integrates smooth periodic integrands") {
  QuadratureSpec spec;
  spec.method = QuadMethod::Radial1D;  // trapezoid on torus domains
  spec.nodes = 8;
  EVec7 periods = EVec7::Ones();
  periods[0] = 2.0 * M_PI;
  const IntegralResult r = integrate(
      Domain7::torus(periods), [](const EVec7& x) { return std::sin(x[0]) * std::sin(x[0]); },
      spec);
  CHECK(r.value == doctest::Approx(M_PI).epsilon(1e-12));  // (1/2) * 2 pi * 1^6
}

TEST_CASE("moment reduction rejects unstructured integrands") {
  QuadratureSpec spec;  // default method is moment-reduction
  CHECK_THROWS_AS(integrate(Domain7::ball(1.0), [](const EVec7&) { return 1.0; }, spec), Error);
}

TEST_CASE("tree sum is chunking-independent by construction") {
  std::vector<double> v(1000);
  Philox rng(3);
  for (size_t i = 0; i < v.size(); ++i) v[i] = rng.normal2(i)[0];
  const double s1 = tree_sum(v);
  CHECK(s1 == tree_sum(v));
}

TEST_SUITE_END();
