#include <doctest.h>

#include "g2forms/rng.hpp"
#include "g2forms/standard_forms.hpp"
#include "g2forms/typedecomp.hpp"

using namespace g2f;

namespace {

Rat rat_trace(const std::vector<std::vector<Rat>>& m) {
  Rat t(0);
  for (size_t i = 0; i < m.size(); ++i) t += m[i][i];
  return t;
}

FormD random_form(int grade, uint64_t seed) {
  Philox rng(seed);
  FormD f(grade);
  for (int i = 0; i < f.size(); ++i) f[i] = rng.normal2(static_cast<uint64_t>(i))[0];
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("typedecomp");

TEST_CASE("exact projections: ranks, idempotency, completeness, both flavors") {
  for (bool split : {false, true}) {
    const TypeProjectionsQ& P = standard_projections_q(split);
    for (int p = 2; p <= 5; ++p) {
      std::vector<std::vector<Rat>> sum(binom7(p), std::vector<Rat>(binom7(p), Rat(0)));
      for (int d : type_labels(p)) {
        const auto& M = P.proj.at({p, d});
        // rank of an exact projector equals its trace
        CHECK(rat_trace(M) == Rat(d));
        CHECK(rat_rank(M) == d);
        // idempotent exactly
        std::vector<std::vector<Rat>> M2(M.size(), std::vector<Rat>(M.size(), Rat(0)));
        for (size_t i = 0; i < M.size(); ++i)
          for (size_t k = 0; k < M.size(); ++k) {
            if (M[i][k] == Rat(0)) continue;
            for (size_t j = 0; j < M.size(); ++j) M2[i][j] += M[i][k] * M[k][j];
          }
        CHECK(M2 == M);
        for (size_t i = 0; i < M.size(); ++i)
          for (size_t j = 0; j < M.size(); ++j) sum[i][j] += M[i][j];
      }
      // completeness: sum of projectors is the identity, exactly
      for (size_t i = 0; i < sum.size(); ++i)
        for (size_t j = 0; j < sum.size(); ++j)
          CHECK(sum[i][j] == (i == j ? Rat(1) : Rat(0)));
    }
  }
}

TEST_CASE("numeric projections agree with the exact ones") {
  const G2Structure S = classify_and_metric_3(phi0());
  TypeProjections P(S);
  const TypeProjectionsQ& PQ = standard_projections_q(false);
  for (int p = 2; p <= 5; ++p)
    for (int d : type_labels(p)) {
      const auto& M = P.matrix(p, d);
      const auto& MQ = PQ.proj.at({p, d});
      for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
          CHECK(M(i, j) == doctest::Approx(MQ[i][j].to_double()).epsilon(1e-12));
    }
}

TEST_CASE("pi_1(dx123) = phi0 / 7") {
  const G2Structure S = classify_and_metric_3(phi0());
  const TypeComponent c = project(S, 1, basis_form({1, 2, 3}));
  // brute-force orthogonal projection onto span(phi0): <dx123, phi0> = 1, <phi0,phi0> = 7
  const double ip = form_inner(*S.metric, basis_form({1, 2, 3}), phi0());
  const double n2 = form_inner(*S.metric, phi0(), phi0());
  CHECK(ip == doctest::Approx(1.0));
  CHECK(n2 == doctest::Approx(7.0));
  for (int i = 0; i < 35; ++i) CHECK(c.form[i] == doctest::Approx(phi0()[i] / 7.0).epsilon(1e-14));
}

TEST_CASE("star intertwines every projection") {
  for (bool split : {false, true}) {
    const G2Structure S =
        classify_and_metric_3(split ? phi0_tilde() : phi0());
    TypeProjections P(S);
    for (int p = 2; p <= 3; ++p) {
      const FormD a = random_form(p, 555 + p + (split ? 10 : 0));
      for (int d : type_labels(p)) {
        const FormD lhs = hodge_star(*S.metric, P.project(d, a).form);
        const FormD rhs = P.project(d, hodge_star(*S.metric, a)).form;
        for (int i = 0; i < lhs.size(); ++i)
          CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("components are mutually orthogonal in the induced pairing") {
  for (bool split : {false, true}) {
    const G2Structure S = classify_and_metric_3(split ? phi0_tilde() : phi0());
    TypeProjections P(S);
    const FormD a = random_form(3, 77);
    const FormD b = random_form(3, 78);
    const auto labels = type_labels(3);
    for (size_t i = 0; i < labels.size(); ++i)
      for (size_t j = i + 1; j < labels.size(); ++j) {
        const double ip = form_inner(*S.metric, P.project(labels[i], a).form,
                                     P.project(labels[j], b).form);
        CHECK(std::abs(ip) < 1e-10);
      }
    // self-adjointness in the induced pairing: <pi a, b> = <a, pi b>
    for (int d : labels) {
      const double l = form_inner(*S.metric, P.project(d, a).form, b);
      const double r = form_inner(*S.metric, a, P.project(d, b).form);
      CHECK(l == doctest::Approx(r).epsilon(1e-10));
    }
  }
}

TEST_CASE("invalid (grade,label) pairs are rejected") {
  const G2Structure S = classify_and_metric_3(phi0());
  CHECK_THROWS_AS(project(S, 14, random_form(3, 9)), Error);
  CHECK_THROWS_AS(project(S, 27, random_form(2, 9)), Error);
  CHECK(!valid_type_pair(3, 14));
  CHECK(valid_type_pair(5, 14));
}

TEST_CASE("characterize: membership certificates for the quoted examples") {
  const G2Structure S = classify_and_metric_3(phi0());
  // e1 -| phi0 lands in Lambda^2_7
  Vec7 e1;
  e1[0] = 1.0;
  Certificate c7 = characterize(S, {2, 7, interior(e1, phi0())});
  CHECK(c7.pass);
  // phi0 itself is R phi0
  Certificate c1 = characterize(S, {3, 1, phi0()});
  CHECK(c1.pass);
  // dx12 - dx47 is not of pure type 14: the certificate reports the residual
  FormD bad = basis_form({1, 2});
  bad -= basis_form({4, 7});
  Certificate c14 = characterize(S, {2, 14, bad});
  CHECK(!c14.pass);
  CHECK(c14.residuals.size() == 1);
  CHECK(c14.residuals[0].second > 1e-6);
  // its projection to 14 does pass
  TypeProjections P(S);
  Certificate c14p = characterize(S, {2, 14, P.project(14, bad).form});
  CHECK(c14p.pass);
}

TEST_CASE("grade 4/5 certificates go through the star transport") {
  const G2Structure S = classify_and_metric_3(phi0());
  TypeProjections P(S);
  const FormD a = random_form(4, 91);
  for (int d : type_labels(4)) {
    Certificate c = characterize(S, {4, d, P.project(d, a).form});
    CHECK(c.pass);
    CHECK(c.detail.find("star") != std::string::npos);
  }
}

TEST_SUITE_END();
