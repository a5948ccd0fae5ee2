#include <doctest.h>

#include "g2forms/coflow.hpp"
#include "g2forms/standard_forms.hpp"

using namespace g2f;

TEST_SUITE_BEGIN("coflow");

TEST_CASE("spectral derivative of smooth periodic data") {
  const int n = 64;
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i)
    f[i] = std::sin(2.0 * M_PI * i / n) + 0.3 * std::cos(6.0 * M_PI * i / n);
  const std::vector<double> d = spectral_derivative(f, 2.0 * M_PI);
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * M_PI * i / n;
    CHECK(d[i] == doctest::Approx(std::cos(x) - 0.9 * std::sin(3 * x)).epsilon(1e-11));
  }
}

TEST_CASE("constant psi0 is a fixed point: 100 steps change no coefficient") {
  CoflowState S = coflow_initial(32, 2.0 * M_PI, 0.0);
  const CoflowState initial = S;
  const double dt = 0.5 * cfl_bound(S);
  for (int k = 0; k < 100; ++k) S = coflow_step(S, dt);
  double sup = 0;
  for (int i = 0; i < S.n; ++i)
    for (int c = 0; c < 35; ++c)
      sup = std::max(sup, std::abs(S.psi[i][c] - initial.psi[i][c]));
  CHECK(sup <= 1e-12);
}

TEST_CASE("torsion: constant field clean; perturbed field has d*psi only") {
  const CoflowState S0 = coflow_initial(64, 2.0 * M_PI, 0.0);
  const TorsionReport t0 = torsion(S0);
  CHECK(t0.sup_dpsi == 0.0);
  CHECK(t0.sup_dstar_psi <= 1e-12);
  CHECK(t0.torsion_free);

  const CoflowState Sp = coflow_initial(64, 2.0 * M_PI, 1e-2);
  const TorsionReport tp = torsion(Sp);
  CHECK(tp.sup_dpsi <= 1e-12);       // the perturbation is exact, d psi = 0
  CHECK(tp.sup_dstar_psi > 1e-4);    // torsion appears in d star psi
  CHECK(!tp.torsion_free);
}

TEST_CASE("torsion scales linearly in the perturbation amplitude") {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double s : {1e-4, 1e-3, 1e-2}) {
    const TorsionReport t = torsion(coflow_initial(32, 2.0 * M_PI, s));
    const double lx = std::log(s), ly = std::log(t.sup_dstar_psi);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("the Euler update stays closed: d of the update vanishes identically") {
  const CoflowState S = coflow_initial(32, 2.0 * M_PI, 1e-2);
  const double dt = 0.5 * cfl_bound(S);
  const CoflowState S1 = coflow_step(S, dt);
  // the update is dx1 ^ (spectral derivative): every nonzero coefficient sits
  // on a multi-index containing axis 1, so d(update) = dx1 ^ d/dx1(update) = 0
  const GradeTable& t4 = grade_table(4);
  for (int i = 0; i < S.n; ++i) {
    for (int c = 0; c < 35; ++c) {
      const double u = S1.psi[i][c] - S.psi[i][c];
      if (!MultiIndex(t4.masks[c]).contains(1)) CHECK(u == 0.0);
    }
  }
  CHECK(exactness_residual(S1, S) <= 1e-12);
}

TEST_CASE("volume monotonicity from perturbed data, with a Richardson check") {
  const CoflowState S = coflow_initial(64, 2.0 * M_PI, 1e-2);
  const double dt = 0.25 * cfl_bound(S);
  const MonotonicityReport m1 = volume_monotonicity_check(S, dt);
  CHECK(m1.pass);
  CHECK(m1.min_rate >= -1e-9);
  // halving dt should roughly halve the first-order error in the measured rate
  const MonotonicityReport m2 = volume_monotonicity_check(S, dt / 2);
  const MonotonicityReport m4 = volume_monotonicity_check(S, dt / 4);
  const double e1 = std::abs(m1.min_rate - m4.min_rate);
  const double e2 = std::abs(m2.min_rate - m4.min_rate);
  CHECK(e2 < 0.75 * e1);
}

TEST_CASE("ten steps from perturbed data: orbit kept, H4 nondecreasing, exact") {
  CoflowState S = coflow_initial(64, 2.0 * M_PI, 1e-2);
  const CoflowState initial = S;
  const double dt = 0.5 * cfl_bound(S);
  double H = coflow_H4(S);
  for (int k = 0; k < 10; ++k) {
    S = coflow_step(S, dt);
    const double Hn = coflow_H4(S);
    CHECK(Hn >= H - 1e-12 * std::abs(H));
    H = Hn;
  }
  CHECK(exactness_residual(S, initial) <= 1e-10);
}

TEST_CASE("cfl violations and degenerate nodes raise errors") {
  const CoflowState S = coflow_initial(32, 2.0 * M_PI, 1e-2);
  CHECK_THROWS_WITH_AS(coflow_step(S, 10.0 * cfl_bound(S)), doctest::Contains("bound"), Error);

  CoflowState bad = S;
  bad.psi[7] = basis_form({4, 5, 6, 7});
  CHECK_THROWS_WITH_AS(torsion(bad), doctest::Contains("node 7"), Error);
}

TEST_CASE("hk bound: saturation at exponent 6, eta/8 at exponent 7") {
  for (double eta : {0.5, 1.0, 2.0}) {
    const HKReport R = hk_bound_check(eta);
    CHECK(R.saturated_exp6);
    CHECK(R.vol_ball == doctest::Approx(R.eta_over_7_area).epsilon(1e-13));
    CHECK(R.rhs_exp7 ==
          doctest::Approx(eta / 8.0 * R.area_sphere).epsilon(1e-12));
    CHECK(R.discrepancy_exp7 < 0);
  }
}

TEST_SUITE_END();
