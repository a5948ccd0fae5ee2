#include <benchmark/benchmark.h>

#include "g2forms/perturbations.hpp"
#include "g2forms/rng.hpp"
#include "g2forms/standard_forms.hpp"
#include "g2forms/typedecomp.hpp"

using namespace g2f;

namespace {

FormD random_form(int grade, uint64_t seed) {
  Philox rng(seed);
  FormD f(grade);
  for (int i = 0; i < f.size(); ++i) f[i] = rng.normal2(static_cast<uint64_t>(i))[0];
  return f;
}

void BM_wedge_3_4(benchmark::State& state) {
  const FormD a = random_form(3, 1), b = random_form(4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(wedge(a, b));
}
BENCHMARK(BM_wedge_3_4);

void BM_vol_density3(benchmark::State& state) {
  FormD phi = random_form(3, 3);
  phi *= 0.05;
  phi += phi0();
  double c[35];
  for (int i = 0; i < 35; ++i) c[i] = phi[i];
  for (auto _ : state) benchmark::DoNotOptimize(vol_density3(c));
}
BENCHMARK(BM_vol_density3);

void BM_vol_density4(benchmark::State& state) {
  FormD psi = random_form(4, 4);
  psi *= 0.05;
  psi += psi0();
  double c[35];
  for (int i = 0; i < 35; ++i) c[i] = psi[i];
  for (auto _ : state) benchmark::DoNotOptimize(vol_density4(c));
}
BENCHMARK(BM_vol_density4);

void BM_classify_3form(benchmark::State& state) {
  FormD phi = random_form(3, 5);
  phi *= 0.05;
  phi += phi0();
  for (auto _ : state) benchmark::DoNotOptimize(classify_and_metric_3(phi));
}
BENCHMARK(BM_classify_3form);

void BM_type_projections_build(benchmark::State& state) {
  const G2Structure S = classify_and_metric_3(phi0());
  for (auto _ : state) benchmark::DoNotOptimize(TypeProjections(S));
}
BENCHMARK(BM_type_projections_build);

void BM_project_27(benchmark::State& state) {
  const G2Structure S = classify_and_metric_3(phi0());
  TypeProjections P(S);
  const FormD a = random_form(3, 6);
  for (auto _ : state) benchmark::DoNotOptimize(P.project(27, a));
}
BENCHMARK(BM_project_27);

void BM_volume_series_deg5(benchmark::State& state) {
  PerturbationFamily pf;
  pf.name = FamilyName::P0m;
  const FamilyVariation fam = family_variation(pf);
  for (auto _ : state) {
    benchmark::DoNotOptimize(volume_series(fam, 14, 5, 0.5));  // bypass the cache
  }
}
BENCHMARK(BM_volume_series_deg5)->Unit(benchmark::kMillisecond);

void BM_second_variation_moment(benchmark::State& state) {
  PerturbationFamily pf;
  pf.name = FamilyName::SG4m;
  const FamilyVariation fam = family_variation(pf);
  const FormField da = fam.dalpha();
  QuadratureSpec spec;
  for (auto _ : state)
    benchmark::DoNotOptimize(second_variation(fam.kind, fam.base, da, da, fam.domain(), spec));
}
BENCHMARK(BM_second_variation_moment)->Unit(benchmark::kMillisecond);

void BM_metric_from_4form(benchmark::State& state) {
  Philox rng(7);
  EMat7 A = EMat7::Identity();
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) A(i, j) += 0.05 * rng.normal2(static_cast<uint64_t>(7 * i + j))[0];
  const FormD psi = pullback(to_mat7(A), psi0());
  for (auto _ : state) benchmark::DoNotOptimize(metric_from_4form(psi));
}
BENCHMARK(BM_metric_from_4form)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
