#pragma once

#include <map>
#include <string>
#include <vector>

#include "g2forms/g2structure.hpp"

namespace g2f {

/// One piece of the type decomposition: the form lands in the d-dimensional
/// module of Lambda^grade for the fixed structure.
struct TypeComponent {
  int grade = 0;
  int label = 0;  // module dimension: 1, 7, 14 or 27
  FormD form;
};

bool valid_type_pair(int grade, int label);
std::vector<int> type_labels(int grade);

/// Projection matrices pi_d on the coefficient spaces of Lambda^p, p = 2..5,
/// assembled once from the characterizing conditions (span of the 3-form,
/// image of the interior-product maps, complements in the induced pairing)
/// and transported across degrees by the Hodge star.
class TypeProjections {
public:
  explicit TypeProjections(const G2Structure& S);

  const G2Structure& structure() const { return S_; }
  const Eigen::MatrixXd& matrix(int grade, int label) const;
  const Eigen::MatrixXd& gram(int grade) const;
  const Eigen::MatrixXd& star_matrix(int grade) const;  // Lambda^p -> Lambda^{7-p}

  TypeComponent project(int label, const FormD& a) const;

private:
  G2Structure S_;
  std::map<std::pair<int, int>, Eigen::MatrixXd> proj_;
  std::map<int, Eigen::MatrixXd> gram_;
  std::map<int, Eigen::MatrixXd> star_;
};

/// Spec-level convenience; builds the cache for one call.
TypeComponent project(const G2Structure& S, int label, const FormD& a);

/// Exact rational projections for the two standard structures.
struct TypeProjectionsQ {
  std::map<std::pair<int, int>, std::vector<std::vector<Rat>>> proj;
};
const TypeProjectionsQ& standard_projections_q(bool split);

/// Membership certificate checked against the defining equations (wedge
/// conditions, interior-product representations, multiple-of-phi), not the
/// projection matrices.
struct Certificate {
  bool pass = false;
  double tolerance = 0;
  std::vector<std::pair<std::string, double>> residuals;
  std::string detail;
};
Certificate characterize(const G2Structure& S, const TypeComponent& c, double tol = 1e-10);

}  // namespace g2f
