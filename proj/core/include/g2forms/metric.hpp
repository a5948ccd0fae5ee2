#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "g2forms/const_form.hpp"

namespace g2f {

using EMat7 = Eigen::Matrix<double, 7, 7>;
using EVec7 = Eigen::Matrix<double, 7, 1>;

/// Symmetric metric on R^7 together with its signature and volume density
/// |det g|^(1/2) in the standard frame.
struct Metric7 {
  EMat7 g = EMat7::Identity();
  std::pair<int, int> signature{7, 0};
  double voldensity = 1.0;

  bool riemannian() const { return signature == std::make_pair(7, 0); }
  bool split34() const { return signature == std::make_pair(3, 4); }
};

/// Signature by eigenvalue signs; |eig| <= tol counts as degenerate (nullity
/// folded into neither count, so p+q < 7 flags degeneracy).
std::pair<int, int> signature_of(const EMat7& g, double tol = 1e-10);

Metric7 make_metric(const EMat7& g);

/// Gram matrix of the induced inner product on Lambda^p: G[I][J] = det(ginv[I,J]).
Eigen::MatrixXd lambda_gram(const EMat7& ginv, int p);

/// <a,b>_g in the induced pairing on p-forms (indefinite when g is).
double form_inner(const Metric7& m, const FormD& a, const FormD& b);

/// Hodge star w.r.t. the metric and the standard orientation dx1^...^dx7.
/// For both signatures in play star(star(a)) == a on every grade.
FormD hodge_star(const Metric7& m, const FormD& a);

/// Exact star for rational metrics whose |det| is a perfect square of a
/// rational (covers the two standard structures).  Throws otherwise.
FormQ hodge_star_q(const Mat7<Rat>& g, const FormQ& a);

// Exact linear algebra helpers on rational matrices (sizes <= ~50).
std::vector<std::vector<Rat>> rat_inverse(const std::vector<std::vector<Rat>>& m);
Rat rat_det(std::vector<std::vector<Rat>> m);
int rat_rank(std::vector<std::vector<Rat>> m);

Mat7<Rat> rat_inverse7(const Mat7<Rat>& m);

inline EMat7 to_eigen(const Mat7<Rat>& m) {
  EMat7 e;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) e(i, j) = m[i][j].to_double();
  return e;
}

inline Mat7<double> to_mat7(const EMat7& e) {
  Mat7<double> m;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) m[i][j] = e(i, j);
  return m;
}

}  // namespace g2f
