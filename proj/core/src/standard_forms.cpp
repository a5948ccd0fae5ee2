#include "g2forms/standard_forms.hpp"

namespace g2f {

namespace {
FormQ from_terms(int grade, std::initializer_list<std::pair<MultiIndex, int>> terms) {
  FormQ f(grade);
  for (const auto& [I, s] : terms) f.set(I, Rat(s));
  return f;
}
}  // namespace

FormQ phi0_q() {
  return from_terms(3, {{{1, 2, 3}, 1}, {{1, 4, 5}, 1}, {{1, 6, 7}, 1}, {{2, 4, 6}, 1},
                        {{2, 5, 7}, -1}, {{3, 4, 7}, -1}, {{3, 5, 6}, -1}});
}

FormQ psi0_q() {
  return from_terms(4, {{{4, 5, 6, 7}, 1}, {{2, 3, 6, 7}, 1}, {{2, 3, 4, 5}, 1}, {{1, 3, 5, 7}, 1},
                        {{1, 3, 4, 6}, -1}, {{1, 2, 5, 6}, -1}, {{1, 2, 4, 7}, -1}});
}

FormQ phi0_tilde_q() {
  return from_terms(3, {{{1, 2, 3}, 1}, {{1, 4, 5}, -1}, {{1, 6, 7}, -1}, {{2, 4, 6}, 1},
                        {{2, 5, 7}, -1}, {{3, 4, 7}, -1}, {{3, 5, 6}, -1}});
}

FormQ psi0_tilde_q() {
  return from_terms(4, {{{4, 5, 6, 7}, 1}, {{2, 3, 6, 7}, -1}, {{2, 3, 4, 5}, -1}, {{1, 3, 5, 7}, 1},
                        {{1, 3, 4, 6}, -1}, {{1, 2, 5, 6}, -1}, {{1, 2, 4, 7}, -1}});
}

FormQ phi0_variant247_q() {
  return from_terms(3, {{{1, 2, 3}, 1}, {{1, 4, 5}, 1}, {{1, 6, 7}, 1}, {{2, 4, 6}, 1},
                        {{2, 4, 7}, -1}, {{3, 4, 7}, -1}, {{3, 5, 6}, -1}});
}

FormQ phi0_tilde_variant247_q() {
  return from_terms(3, {{{1, 2, 3}, 1}, {{1, 4, 5}, -1}, {{1, 6, 7}, -1}, {{2, 4, 6}, 1},
                        {{2, 4, 7}, -1}, {{3, 4, 7}, -1}, {{3, 5, 6}, -1}});
}

FormD phi0() { return to_double(phi0_q()); }
FormD psi0() { return to_double(psi0_q()); }
FormD phi0_tilde() { return to_double(phi0_tilde_q()); }
FormD psi0_tilde() { return to_double(psi0_tilde_q()); }

namespace {
Mat7<Rat> diag_q(std::initializer_list<int> d) {
  Mat7<Rat> m{};
  int i = 0;
  for (int v : d) {
    m[i][i] = Rat(v);
    ++i;
  }
  return m;
}
}  // namespace

Mat7<Rat> euclidean_metric_q() { return diag_q({1, 1, 1, 1, 1, 1, 1}); }
Mat7<Rat> split_metric_q() { return diag_q({1, 1, 1, -1, -1, -1, -1}); }
Mat7<Rat> cartan_c0_q() { return diag_q({1, 1, 1, -1, -1, -1, -1}); }

}  // namespace g2f
