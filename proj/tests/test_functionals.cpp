#include <doctest.h>

#include "g2forms/perturbations.hpp"
#include "g2forms/rng.hpp"
#include "g2forms/standard_forms.hpp"

using namespace g2f;

namespace {

// closed-form second variations of the seven families:
// each equals coeff * A6 * I2, with I2 = int f'(r)^2 r^6 dr and A6 = Area(S^6).
// The coefficients come from the displayed integrands:
//   P0+:  1           P0-: -(1/8)(4/7) = -1/14
//   SG3+: (1/3)(4/3)(1/7) = 4/63      SG3-: -(1/3)(2/3)(1/7) = -2/63
//   SG4+: (1/4)(1/2)(4/7) = 1/14      SG4-: (1/4)(1/2-1/2-1/2-3/4)(1/7) = -5/112
//   CH-: -(1/3)(2/3 + 4/2)(1/7) = -8/63
double closed_form_coeff(FamilyName n) {
  switch (n) {
    case FamilyName::P0p: return 1.0;
    case FamilyName::P0m: return -1.0 / 14.0;
    case FamilyName::SG3p: return 4.0 / 63.0;
    case FamilyName::SG3m: return -2.0 / 63.0;
    case FamilyName::SG4p: return 1.0 / 14.0;
    case FamilyName::SG4m: return -5.0 / 112.0;
    default: return -8.0 / 63.0;  // CH-
  }
}

double bump_I2(const Bump& b) {
  return adaptive_1d([&](double r) { return b.fp(r) * b.fp(r) * std::pow(r, 6); },
                     b.plateau_a() * b.eta(), b.plateau_b() * b.eta(), 1e-13);
}

EVec7 random_ball_point(Philox& rng, uint64_t i, double rmax) {
  EVec7 x;
  for (int b = 0; b < 4; ++b) {
    const auto z = rng.normal2(i, static_cast<uint32_t>(b));
    if (2 * b < 7) x[2 * b] = z[0];
    if (2 * b + 1 < 7) x[2 * b + 1] = z[1];
  }
  const double r = rmax * (0.02 + 0.96 * rng.uniform(i, 9));
  return x * (r / x.norm());
}

}  // namespace

TEST_SUITE_BEGIN("functionals");

TEST_CASE("H4(psi0) and H3~(phi0~) over the unit ball equal its volume") {
  PerturbationFamily pf;
  pf.name = FamilyName::P0p;
  const FamilyVariation fam = family_variation(pf);
  const IntegralResult r = evaluate_family(fam, 0.0);
  CHECK(r.value == doctest::Approx(unit_ball_volume7()).epsilon(1e-12));

  pf.name = FamilyName::SG3p;  // base phi0~, voldensity 1
  const IntegralResult rt = evaluate_family(family_variation(pf), 0.0);
  CHECK(rt.value == doctest::Approx(unit_ball_volume7()).epsilon(1e-12));

  // generic evaluator paths agree
  QuadratureSpec spec;
  spec.method = QuadMethod::Radial1D;
  spec.nodes = 16;
  spec.sphere_degree = 5;
  const FunctionalKind k4{4, Flavor::Compact};
  const IntegralResult rr =
      evaluate(k4, Domain7::ball(1.0), FormField::constant(psi0()), spec);
  CHECK(rr.value == doctest::Approx(unit_ball_volume7()).epsilon(1e-12));
  spec.method = QuadMethod::MonteCarlo;
  spec.samples = 20000;
  const IntegralResult rmc =
      evaluate(k4, Domain7::ball(1.0), FormField::constant(psi0()), spec);
  CHECK(rmc.value == doctest::Approx(unit_ball_volume7()).epsilon(1e-12));
}

TEST_CASE("H3 scales as lambda^(7/3)") {
  const FunctionalKind k3{3, Flavor::Compact};
  QuadratureSpec spec;
  spec.method = QuadMethod::Radial1D;
  spec.nodes = 8;
  spec.sphere_degree = 3;
  FormD p8 = phi0();
  p8 *= 8.0;
  const double H1 = evaluate(k3, Domain7::ball(1.0), FormField::constant(phi0()), spec).value;
  const double H8 = evaluate(k3, Domain7::ball(1.0), FormField::constant(p8), spec).value;
  CHECK(H8 == doctest::Approx(128.0 * H1).epsilon(1e-12));
}

TEST_CASE("evaluate names the point on an orbit violation") {
  const FunctionalKind k4{4, Flavor::Compact};
  QuadratureSpec spec;
  spec.method = QuadMethod::MonteCarlo;
  spec.samples = 100;
  CHECK_THROWS_WITH_AS(
      evaluate(k4, Domain7::ball(1.0), FormField::constant(basis_form({4, 5, 6, 7})), spec),
      doctest::Contains("orbit violation at point"), Error);
  // split form under the compact functional: wrong orbit, also named
  CHECK_THROWS_AS(evaluate(k4, Domain7::ball(1.0), FormField::constant(psi0_tilde()), spec),
                  Error);
}

TEST_CASE("first variation vanishes at the torsion-free bases") {
  for (FamilyName n : {FamilyName::P0p, FamilyName::CHm}) {
    PerturbationFamily pf;
    pf.name = n;
    const FamilyVariation fam = family_variation(pf);
    QuadratureSpec spec;
    const double fv = first_variation(fam.kind, FormField::constant(fam.base), fam.dalpha(),
                                      fam.domain(), spec);
    CHECK(std::abs(fv) < 1e-14);  // odd angular moments kill every term
  }
}

TEST_CASE("first variation enforces compact support and exactness") {
  PerturbationFamily pf;
  pf.name = FamilyName::P0p;
  const FamilyVariation fam = family_variation(pf);
  QuadratureSpec spec;
  CHECK_THROWS_WITH_AS(first_variation(fam.kind, FormField::constant(fam.base), fam.dalpha(),
                                       Domain7::ball(0.5), spec),
                       doctest::Contains("support check failure"), Error);
  CHECK_THROWS_AS(first_variation(fam.kind, FormField::constant(fam.base),
                                  FormField::constant(psi0()), fam.domain(), spec),
                  Error);
}

TEST_CASE("first variation matches central differences on a non-critical base") {
  // base with first-order torsion: psi0 + 0.05 x4 dx1234 (not closed, so the
  // structural cancellation d(star psi) = O(sigma^2) does not apply; the x4
  // direction pairs with a nonzero coefficient of dx_i ^ phi0 ^ Dphi)
  std::vector<StructTerm> terms(1);
  terms[0].prof = RadialProfile::constant();
  terms[0].mono[3] = 1;
  terms[0].form = FormD(4);
  terms[0].form.set(MultiIndex({1, 2, 3, 4}), 0.05);
  FormField base = FormField::constant(psi0()) + FormField::structured(4, terms);

  PerturbationFamily pf;
  pf.name = FamilyName::P0p;
  const FamilyVariation fam = family_variation(pf);
  const FormField V = fam.dalpha();
  const FunctionalKind kind{4, Flavor::Compact};
  QuadratureSpec spec;
  spec.method = QuadMethod::Radial1D;
  spec.nodes = 12;
  spec.sphere_degree = 5;
  const double analytic = first_variation(kind, base, V, Domain7::ball(1.0), spec);
  // central difference of the volume functional
  auto H = [&](double t) {
    const FormField F = base + V * t;
    return evaluate(kind, Domain7::ball(1.0), F, spec).value;
  };
  const double t = 1e-3;
  const double fd = (H(t) - H(-t)) / (2 * t);
  CHECK(analytic == doctest::Approx(fd).epsilon(5e-4));
  CHECK(std::abs(analytic) > 1e-6);  // genuinely non-critical
}

TEST_CASE("second variation reproduces the closed forms for all seven families") {
  QuadratureSpec spec;
  for (FamilyName n : all_families()) {
    PerturbationFamily pf;
    pf.name = n;
    const FamilyVariation fam = family_variation(pf);
    const FormField da = fam.dalpha();
    const double d2 = second_variation(fam.kind, fam.base, da, da, fam.domain(), spec);
    const double expect = closed_form_coeff(n) * sphere_area6() * bump_I2(fam.bump);
    CHECK(d2 == doctest::Approx(expect).epsilon(1e-11));
    CHECK(family_sign(n) * d2 > 0);
  }
}

TEST_CASE("second variation is symmetric in its two slots") {
  PerturbationFamily pa, pb;
  pa.name = FamilyName::P0p;
  pb.name = FamilyName::P0m;
  const FamilyVariation fa = family_variation(pa);
  const FamilyVariation fb = family_variation(pb);
  QuadratureSpec spec;
  const double ab =
      second_variation(fa.kind, fa.base, fa.dalpha(), fb.dalpha(), fa.domain(), spec);
  const double ba =
      second_variation(fa.kind, fa.base, fb.dalpha(), fa.dalpha(), fa.domain(), spec);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
}

TEST_CASE("pointwise norm identities of the displayed component projections") {
  Philox rng(2024);
  // P0-: pi1 = 0, |pi7|^2 = (1/4)w q4567, |pi27|^2 = 3x that
  // SG3+/SG3-: the three displayed signed squared norms
  for (FamilyName n : {FamilyName::P0m, FamilyName::SG3p, FamilyName::SG3m}) {
    PerturbationFamily pf;
    pf.name = n;
    const FamilyVariation fam = family_variation(pf);
    const FormField da = fam.dalpha();
    const G2Structure S = recover_structure(fam.base);
    TypeProjections P(S);
    const Eigen::MatrixXd& G = P.gram(fam.kind.grade);
    for (int rep = 0; rep < 100; ++rep) {
      const EVec7 x = random_ball_point(rng, static_cast<uint64_t>(rep), 1.0);
      const double r = x.norm();
      const double w = fam.bump.fp(r) / r;
      const FormD g = da(x);
      for (int d : {1, 7, 27}) {
        const FormD gd = P.project(d, g).form;
        double n2 = 0;
        for (int i = 0; i < gd.size(); ++i)
          for (int j = 0; j < gd.size(); ++j) n2 += gd[i] * G(i, j) * gd[j];
        const double expect = family_component_reference(n, d, x, w);
        REQUIRE(!std::isnan(expect));
        CHECK(n2 == doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("analytic vs finite-difference Hessians at step 1e-4, all families") {
  QuadratureSpec spec;
  for (FamilyName n : all_families()) {
    PerturbationFamily pf;
    pf.name = n;
    const FamilyVariation fam = family_variation(pf);
    const FormField da = fam.dalpha();
    const double d2 = second_variation(fam.kind, fam.base, da, da, fam.domain(), spec);
    const double fd = fd_second_variation(fam, 1e-4, 5);
    CHECK(std::abs(d2 - fd) <= 1e-4 * std::abs(d2));
  }
}

TEST_CASE("volume series: the degree-7 invariant fit validates itself") {
  PerturbationFamily pf;
  pf.name = FamilyName::SG4m;
  const FamilyVariation fam = family_variation(pf);
  const VolumeSeries VS = volume_series(fam, 14, 5);
  CHECK(VS.fit_residual < 1e-10);
  CHECK(VS.base_vol == doctest::Approx(1.0));
  // odd orders vanish (reflection through the bump center); the bound is the
  // noise floor of the polynomial fit, far below any genuine coefficient
  CHECK(std::abs(VS.Mk[3]) < 1e-9 * std::abs(VS.Mk[2]));
  CHECK(std::abs(VS.Mk[5]) < 1e-8 * std::abs(VS.Mk[2]));
  // series and direct evaluation agree at moderate amplitude
  const double t = 0.02;
  CHECK(VS.delta(t) == doctest::Approx(VS.delta_direct(t)).epsilon(1e-8));
}

TEST_CASE("moment reduction agrees with monte carlo across the integrand library") {
  // the second-variation integrands of all seven families, within 3 sigma
  for (FamilyName n : all_families()) {
    PerturbationFamily pf;
    pf.name = n;
    const FamilyVariation fam = family_variation(pf);
    const FormField da = fam.dalpha();
    QuadratureSpec spec;
    const double exact = second_variation(fam.kind, fam.base, da, da, fam.domain(), spec);

    const G2Structure S = recover_structure(fam.base);
    TypeProjections P(S);
    spec.method = QuadMethod::MonteCarlo;
    spec.samples = 120000;
    spec.seed = 4242 + static_cast<uint64_t>(n);
    const IntegralResult mc = integrate(
        fam.domain(),
        [&](const EVec7& x) { return hessian_integrand(fam.kind, P, da(x)); }, spec);
    CHECK(std::abs(mc.value - exact) <= 3.0 * mc.error);
  }
}

TEST_CASE("second variation on a perturbed base keeps the family sign") {
  // base psi0 + small closed perturbation; spec-level invariant at eta below threshold
  std::vector<StructTerm> terms(2);
  terms[0].prof = RadialProfile::constant();
  terms[0].mono[0] = 1;
  terms[0].form = FormD(4);
  terms[0].form.set(MultiIndex({2, 3, 4, 5}), 0.02);
  terms[1].prof = RadialProfile::constant();
  terms[1].mono[1] = 1;
  terms[1].form = FormD(4);
  terms[1].form.set(MultiIndex({1, 3, 4, 5}), 0.02);
  const FormField base = FormField::constant(psi0()) + FormField::structured(4, terms);
  for (FamilyName n : {FamilyName::P0p, FamilyName::P0m}) {
    for (double eta : {0.5, 0.25}) {
      PerturbationFamily pf;
      pf.name = n;
      pf.eta = eta;
      const FamilyVariation fam = family_variation(pf);
      const FormField da = fam.dalpha();
      const double d2 = second_variation_field({4, Flavor::Compact}, base, da, da,
                                               Domain7::ball(eta), 3, 10);
      CHECK(family_sign(n) * d2 > 0);
    }
  }
}

TEST_SUITE_END();
