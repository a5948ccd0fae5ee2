#pragma once

#include <optional>
#include <string>
#include <vector>

#include "g2forms/const_form.hpp"
#include "g2forms/error.hpp"
#include "g2forms/metric.hpp"

namespace g2f {

enum class OrbitClass { CompactG2, SplitG2, Degenerate };

std::string orbit_name(OrbitClass o);

/// A stable 3-form with everything it induces: the 4-form partner, the metric
/// with its signature, the orbit class and the volume density.
struct G2Structure {
  FormD threeform{3};
  FormD fourform{4};
  std::optional<Metric7> metric;
  OrbitClass orbit = OrbitClass::Degenerate;
  std::string note;  // reason when degenerate

  bool ok() const { return orbit != OrbitClass::Degenerate && metric.has_value(); }
  double voldensity() const { return metric ? metric->voldensity : 0.0; }
};

/// B(u,v) = (u -| w)^(v -| w)^w read off against dx^{1..7}, divided by 6.
/// For the model forms this is exactly the metric times the volume density.
EMat7 bilinear_b3(const FormD& w);

/// Metric, volume density and orbit class of a 3-form via b/(det b)^{1/9}.
G2Structure classify_and_metric_3(const FormD& phi, double degeneracy_tol = 1e-12);

/// Exact-rational metric of a rational 3-form when (det b)^{1/9} is rational
/// (the model forms and their integer rescalings).  Returns metric and voldensity.
std::optional<std::pair<Mat7<Rat>, Rat>> metric3_rational(const FormQ& phi);

/// Direct algebraic recovery from a stable 4-form through the orientation
/// dual: ginv = b_dual/(det b_dual)^{1/6}, vol = (det b_dual)^{1/12}.
G2Structure recover_from_4form_direct(const FormD& psi, double degeneracy_tol = 1e-12);

struct FixedPointResult {
  G2Structure structure;
  int iterations = 0;
  double residual = 0.0;
};

/// Fixed-point recovery g_{k+1} = metric(star_{g_k} psi), seeded at the
/// Euclidean metric unless a seed is given.  Converges on the forms this
/// library produces (perturbations of the model forms); throws
/// NonConvergenceError carrying the last residual otherwise.
FixedPointResult metric_from_4form(const FormD& psi, const EMat7* seed = nullptr,
                                   double tol = 1e-12, int max_iters = 50);

/// Pointwise volume density for quadrature loops.  grade 3 or 4.
/// `det_invariant` is det b (grade 3) resp. det b_dual (grade 4); the form is
/// in one of the two stable orbits iff it is positive.
struct PointwiseVol {
  double det = 0.0;
  double vol = 0.0;
  bool in_orbit = false;
};
PointwiseVol vol_density(const FormD& sigma);
PointwiseVol vol_density3(const double* c35);
PointwiseVol vol_density4(const double* c35);

/// Full pointwise structure (metric + orbit) for either grade.
G2Structure recover_structure(const FormD& sigma);

/// Certified Cartan involution: C preserves the split structure and
/// h = g(.,C.) is positive definite.
struct CartanInvolution {
  EMat7 map;
  Metric7 h;
};
CartanInvolution cartan_check(const G2Structure& S, const EMat7& C, double tol = 1e-9);

// --- GL(7) action helpers ---------------------------------------------------

/// d/dt|_0 of (I + tX)^* a.
FormD gl_action(const EMat7& X, const FormD& a);

/// Differential of A |-> A^* phi at the identity as a (C(7,p) x 49) matrix;
/// rank 35 exactly when a 3-form is stable.
Eigen::MatrixXd orbit_differential(const FormD& phi);

/// Exact rank of the orbit differential for integer-coefficient forms.
int orbit_differential_rank_exact(const FormQ& phi);

/// Basis of the stabilizer algebra {X : X.phi = 0} (14-dimensional for stable forms).
std::vector<EMat7> stabilizer_algebra(const FormD& phi, double tol = 1e-9);

EMat7 mat_exp(const EMat7& X);

/// exp of a random stabilizer-algebra element; pulls back phi to itself.
EMat7 sample_structure_automorphism(const FormD& phi, uint64_t seed, double scale = 0.3);

}  // namespace g2f
