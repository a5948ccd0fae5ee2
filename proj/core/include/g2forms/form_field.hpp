#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "g2forms/bump.hpp"
#include "g2forms/const_form.hpp"
#include "g2forms/error.hpp"
#include "g2forms/metric.hpp"

namespace g2f {

/// Scalar radial factor r^rpow * prod_k f^(d_k)(r)^{m_k} built over one bump.
struct RadialProfile {
  BumpPtr bump;                               // null when purely polynomial in r
  std::vector<std::pair<int, int>> factors;   // (derivative order, multiplicity), sorted
  int rpow = 0;

  double operator()(double r) const;
  bool is_constant() const { return factors.empty() && rpow == 0; }
  static RadialProfile constant() { return RadialProfile{}; }
  static RadialProfile bump_f(BumpPtr b) { return RadialProfile{std::move(b), {{0, 1}}, 0}; }

  /// d/dr as a scaled sum of profiles (product rule).
  std::vector<std::pair<RadialProfile, double>> derivative() const;
  RadialProfile times(const RadialProfile& o) const;
  RadialProfile shifted_rpow(int d) const {
    RadialProfile p = *this;
    p.rpow += d;
    return p;
  }
  std::string key() const;
};

using Monomial = std::array<int, 7>;

inline int mono_degree(const Monomial& m) {
  int s = 0;
  for (int v : m) s += v;
  return s;
}

/// One structured term: profile(r) * (x-c)^mono * (constant form).
struct StructTerm {
  RadialProfile prof;
  Monomial mono{};
  FormD form;  // carries the numeric scale
};

/// Scalar-valued structured integrand (same shape, scalar coefficient).
struct ScalarTerm {
  RadialProfile prof;
  Monomial mono{};
  double coeff = 0;
};
using StructuredScalar = std::vector<ScalarTerm>;

/// A p-form-valued field on R^7.  Either a structured sum of
/// radial-profile x monomial x constant-form terms (exact calculus) or a
/// black-box evaluator; both evaluate pointwise.
class FormField {
public:
  FormField() = default;

  static FormField constant(const FormD& w);
  static FormField structured(int grade, std::vector<StructTerm> terms, EVec7 center = EVec7::Zero());
  static FormField blackbox(int grade, std::function<FormD(const EVec7&)> fn,
                            std::optional<double> support_radius = std::nullopt);

  int grade() const { return grade_; }
  const EVec7& center() const { return center_; }
  bool has_structured() const { return structured_; }
  const std::vector<StructTerm>& terms() const { return terms_; }
  std::optional<double> support_radius() const { return support_radius_; }
  void set_support_radius(double r) { support_radius_ = r; }

  FormD operator()(const EVec7& x) const;

  /// Exact primitive when the field was produced as d(beta).
  std::shared_ptr<const FormField> primitive() const { return primitive_; }
  void set_primitive(std::shared_ptr<const FormField> p) { primitive_ = std::move(p); }
  bool is_exact() const { return primitive_ != nullptr; }

  /// Provenance tag for fields of the shape base + t * d(f kappa); lets the
  /// moment-reduction evaluator pick the exact path.
  std::shared_ptr<const void> family;
  double family_amplitude = 0;

  FormField operator+(const FormField& o) const;
  FormField operator*(double s) const;

  /// Merge identical (profile, monomial) keys; drops zero terms.
  void collect(double drop_tol = 0.0);

private:
  int grade_ = 0;
  EVec7 center_ = EVec7::Zero();
  bool structured_ = false;
  std::vector<StructTerm> terms_;
  std::function<FormD(const EVec7&)> eval_;
  std::optional<double> support_radius_;
  std::shared_ptr<const FormField> primitive_;
};

/// Exterior derivative.  Exact on structured fields (d(d(F)) collects to zero
/// term-by-term); black-box fields require finite_difference_step.
FormField exterior_derivative(const FormField& F,
                              std::optional<double> finite_difference_step = std::nullopt);

/// Wedge with a constant form (term-wise).
FormField wedge_const(const FormField& F, const FormD& c);

/// Apply a constant matrix to the coefficient vector of every term
/// (projections, stars).
FormField apply_matrix(const Eigen::MatrixXd& M, const FormField& F, int out_grade);

/// <F1, F2>_G as a structured scalar; both fields must share center and be
/// structured over compatible profiles.
StructuredScalar structured_inner(const FormField& F1, const FormField& F2,
                                  const Eigen::MatrixXd& gram);

/// Coefficient of dx^{1..7} in F ^ c, as a structured scalar.
StructuredScalar structured_top_wedge(const FormField& F, const FormD& c);

double eval_structured_scalar(const StructuredScalar& s, const EVec7& x, const EVec7& center);

}  // namespace g2f
