#include <doctest.h>

#include <algorithm>

#include "g2forms/form_field.hpp"
#include "g2forms/form_io.hpp"
#include "g2forms/rng.hpp"
#include "g2forms/standard_forms.hpp"

using namespace g2f;

namespace {

// independent sign oracle: parity of a concatenated index list by bubble count
int bubble_sign(std::vector<int> v) {
  int swaps = 0;
  for (size_t i = 0; i + 1 < v.size(); ++i)
    for (size_t j = 0; j + 1 < v.size() - i; ++j)
      if (v[j] > v[j + 1]) {
        std::swap(v[j], v[j + 1]);
        ++swaps;
      }
  for (size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i] == v[i + 1]) return 0;
  return swaps % 2 ? -1 : 1;
}

// brute-force wedge of two basis forms, independent of the library's tables
std::pair<int, MultiIndex> oracle_basis_wedge(MultiIndex I, MultiIndex J) {
  std::vector<int> cat = I.axes();
  for (int a : J.axes()) cat.push_back(a);
  const int s = bubble_sign(cat);
  uint8_t m = static_cast<uint8_t>(I.mask() | J.mask());
  return {s, MultiIndex(m)};
}

FormQ random_form_q(int grade, uint64_t seed) {
  Philox rng(seed);
  FormQ f(grade);
  for (int i = 0; i < f.size(); ++i) {
    const auto u = rng.uniform2(static_cast<uint64_t>(i));
    f[i] = Rat(static_cast<long long>(u[0] * 21) - 10, 1 + static_cast<long long>(u[1] * 6));
  }
  return f;
}

Vec7Q random_vec_q(uint64_t seed) {
  Philox rng(seed);
  Vec7Q v;
  for (int i = 0; i < 7; ++i)
    v[i] = Rat(static_cast<long long>(rng.uniform(static_cast<uint64_t>(i)) * 19) - 9, 1);
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("exterior");

TEST_CASE("basis wedge matches the brute-force oracle on every pair") {
  for (int p = 1; p <= 4; ++p) {
    for (int q = 1; q + p <= 7; ++q) {
      const GradeTable& tp = grade_table(p);
      const GradeTable& tq = grade_table(q);
      for (uint8_t mi : tp.masks) {
        for (uint8_t mj : tq.masks) {
          FormQ a(p), b(q);
          a.set(MultiIndex(mi), Rat(1));
          b.set(MultiIndex(mj), Rat(1));
          const FormQ w = wedge(a, b);
          const auto [sign, target] = oracle_basis_wedge(MultiIndex(mi), MultiIndex(mj));
          for (int t = 0; t < w.size(); ++t) {
            const Rat expect = (sign != 0 && grade_table(p + q).masks[t] == target.mask())
                                   ? Rat(sign)
                                   : Rat(0);
            CHECK(w[t] == expect);
          }
        }
      }
    }
  }
}

TEST_CASE("dx1 ^ dx2 = dx12 and repeated factors vanish") {
  CHECK(wedge(basis_form_q({1}), basis_form_q({2})) == basis_form_q({1, 2}));
  CHECK(wedge(basis_form_q({1, 2}), basis_form_q({1, 2})).is_zero());
  // grades past 7 clamp to the zero top form
  const FormQ over = wedge(basis_form_q({1, 2, 3, 4}), basis_form_q({4, 5, 6, 7}));
  CHECK(over.grade() == 7);
  CHECK(over.is_zero());
}

TEST_CASE("phi0 ^ psi0 = 7 vol, expanded over all basis pairs") {
  // full coordinate expansion with the oracle signs
  const FormQ phi = phi0_q();
  const FormQ psi = psi0_q();
  Rat total(0);
  const GradeTable& t3 = grade_table(3);
  const GradeTable& t4 = grade_table(4);
  for (int i = 0; i < 35; ++i)
    for (int j = 0; j < 35; ++j) {
      const auto [sign, tgt] = oracle_basis_wedge(MultiIndex(t3.masks[i]), MultiIndex(t4.masks[j]));
      if (sign != 0) total += Rat(sign) * phi[i] * psi[j];
    }
  CHECK(total == Rat(7));
  const FormQ w = wedge(phi, psi);
  CHECK(w[0] == Rat(7));
}

TEST_CASE("graded anticommutativity on random rational forms") {
  for (uint64_t s = 0; s < 8; ++s) {
    const int p = 1 + static_cast<int>(s % 3), q = 1 + static_cast<int>((s / 3) % 3);
    const FormQ a = random_form_q(p, 100 + s);
    const FormQ b = random_form_q(q, 200 + s);
    FormQ ba = wedge(b, a);
    if ((p * q) % 2 == 1) ba = -ba;
    CHECK(wedge(a, b) == ba);
  }
}

TEST_CASE("interior product: leading index, e7 -| phi0, antisymmetry") {
  Vec7Q e1;
  e1[0] = Rat(1);
  CHECK(interior(e1, basis_form_q({1, 2, 3})) == basis_form_q({2, 3}));

  Vec7Q e7;
  e7[6] = Rat(1);
  FormQ expect = basis_form_q({1, 6});
  expect -= basis_form_q({2, 5});
  expect -= basis_form_q({3, 4});
  CHECK(interior(e7, phi0_q()) == expect);

  for (uint64_t s = 0; s < 6; ++s) {
    const Vec7Q v = random_vec_q(300 + s);
    CHECK(interior(v, interior(v, psi0_q())).is_zero());
  }
}

TEST_CASE("interior of a scalar throws") {
  Vec7Q v;
  v[0] = Rat(1);
  CHECK_THROWS_WITH_AS(interior(v, FormQ(0)), "interior: cannot contract a scalar",
                       std::domain_error);
}

TEST_CASE("Leibniz rule for the interior product") {
  for (uint64_t s = 0; s < 6; ++s) {
    const FormQ a = random_form_q(2, 400 + s);
    const FormQ b = random_form_q(3, 500 + s);
    const Vec7Q v = random_vec_q(600 + s);
    FormQ lhs = interior(v, wedge(a, b));
    FormQ rhs = wedge(interior(v, a), b) + wedge(a, interior(v, b));  // (-1)^p with p = 2
    CHECK(lhs == rhs);
  }
}

TEST_CASE("pullback: identity, scaling, determinant, functoriality, wedge") {
  Mat7<Rat> id{};
  for (int i = 0; i < 7; ++i) id[i][i] = Rat(1);
  const FormQ a = random_form_q(3, 700);
  CHECK(pullback(id, a) == a);

  Mat7<Rat> mu{};
  for (int i = 0; i < 7; ++i) mu[i][i] = Rat(3);
  CHECK(pullback(mu, basis_form_q({1, 2, 3})) == Rat(27) * basis_form_q({1, 2, 3}));

  // a matrix with known determinant acting on the top form
  Mat7<Rat> A{};
  Philox rng(900);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      A[i][j] = Rat(static_cast<long long>(rng.uniform(static_cast<uint64_t>(7 * i + j)) * 5) - 2, 1);
  std::vector<std::vector<Rat>> av(7, std::vector<Rat>(7));
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) av[i][j] = A[i][j];
  const Rat detA = rat_det(av);
  FormQ top(7);
  top[0] = Rat(1);
  CHECK(pullback(A, top)[0] == detA);

  // functoriality (AB)^* = B^* A^* ... pullback(AB, a) = pullback(B, pullback(A, a))
  Mat7<Rat> B{};
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      B[i][j] = Rat(static_cast<long long>(rng.uniform(static_cast<uint64_t>(100 + 7 * i + j)) * 5) - 2, 1);
  Mat7<Rat> AB{};
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      Rat acc(0);
      for (int k = 0; k < 7; ++k) acc += A[i][k] * B[k][j];
      AB[i][j] = acc;
    }
  const FormQ f2 = random_form_q(2, 800);
  CHECK(pullback(AB, f2) == pullback(B, pullback(A, f2)));

  const FormQ g2form = random_form_q(2, 810);
  CHECK(pullback(A, wedge(f2, g2form)) == wedge(pullback(A, f2), pullback(A, g2form)));
}

TEST_CASE("exterior derivative: monomial case, radial bump case, d squared") {
  // d(x1 dx23) = dx123
  StructTerm t;
  t.prof = RadialProfile::constant();
  t.mono[0] = 1;
  t.form = basis_form({2, 3});
  FormField F = FormField::structured(2, {t});
  FormField dF = exterior_derivative(F);
  REQUIRE(dF.terms().size() == 1);
  CHECK(dF.terms()[0].form.coeff(MultiIndex({1, 2, 3})) == doctest::Approx(1.0));

  // d(f(r) * star0 psi0) = f'(r) dr ^ star0 psi0, checked pointwise
  auto bump = std::make_shared<Bump>(1.0, 0.3, 0.8);
  StructTerm tf;
  tf.prof = RadialProfile::bump_f(bump);
  tf.form = to_double(hodge_star_q(euclidean_metric_q(), psi0_q()));
  FormField Ff = FormField::structured(3, {tf});
  FormField dFf = exterior_derivative(Ff);
  Philox rng(42);
  for (int k = 0; k < 24; ++k) {
    EVec7 x;
    for (int b = 0; b < 4; ++b) {
      const auto z = rng.normal2(static_cast<uint64_t>(k), static_cast<uint32_t>(b));
      if (2 * b < 7) x[2 * b] = z[0];
      if (2 * b + 1 < 7) x[2 * b + 1] = z[1];
    }
    x *= (0.05 + 0.9 * rng.uniform(static_cast<uint64_t>(k), 9)) / x.norm();
    const double r = x.norm();
    FormD dr(1);
    for (int i = 0; i < 7; ++i) dr.set(MultiIndex({i + 1}), x[i] / r);
    FormD expect = wedge(dr, tf.form);
    expect *= bump->fp(r);
    const FormD got = dFf(x);
    for (int i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }

  // d(d(f(r) dx12)) collects to exactly zero
  StructTerm tb;
  tb.prof = RadialProfile::bump_f(bump);
  tb.form = basis_form({1, 2});
  FormField G = FormField::structured(2, {tb});
  FormField ddG = exterior_derivative(exterior_derivative(G));
  CHECK(ddG.terms().empty());

  // and so does d(d(x1 dx23))
  CHECK(exterior_derivative(dF).terms().empty());
}

TEST_CASE("black-box fields need an explicit finite-difference step") {
  FormField bb = FormField::blackbox(2, [](const EVec7& x) {
    FormD f(2);
    f.set(MultiIndex({1, 2}), std::sin(x[0]) * x[1]);
    return f;
  });
  CHECK_THROWS_AS(exterior_derivative(bb), Error);
  FormField dbb = exterior_derivative(bb, 1e-5);
  EVec7 x = EVec7::Constant(0.3);
  // d = cos(x1) x2 dx1^dx12(=0) + sin(x1) dx2^dx12(=0) -> only cross terms survive
  const FormD v = dbb(x);
  CHECK(v.coeff(MultiIndex({1, 2, 3})) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("support radius is preserved and enforced by evaluation") {
  auto bump = std::make_shared<Bump>(0.7, 0.3, 0.8);
  StructTerm t;
  t.prof = RadialProfile::bump_f(bump);
  t.form = basis_form({1, 2});
  FormField F = FormField::structured(2, {t});
  F.set_support_radius(bump->support_radius());
  FormField dF = exterior_derivative(F);
  CHECK(dF.support_radius() == doctest::Approx(0.56));
  EVec7 far = EVec7::Zero();
  far[0] = 0.69;
  CHECK(dF(far).is_zero());
}

TEST_CASE("form literals round-trip and reject malformed input") {
  const FormQ f = parse_form("dx[1,2,3] + 3/2 dx[1,4,5] - dx[2,5,7]");
  CHECK(f.coeff(MultiIndex({1, 4, 5})) == Rat(3, 2));
  CHECK(f.coeff(MultiIndex({2, 5, 7})) == Rat(-1));
  const FormQ g = parse_form(form_str(f));
  CHECK(f == g);
  CHECK_THROWS_AS(parse_form("dx[1,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_form("dx[1,2] + dx[3,4,5]"), std::invalid_argument);
  CHECK_THROWS_AS(parse_form("dx[1,1]"), std::invalid_argument);
}

TEST_CASE("json serialization of a constant form") {
  nlohmann::json j;
  to_json(j, to_double(phi0_q()));
  CHECK(j["grade"] == 3);
  CHECK(j["coeffs"]["[1,2,3]"] == 1.0);
  CHECK(j["coeffs"]["[2,5,7]"] == -1.0);
}

TEST_SUITE_END();
