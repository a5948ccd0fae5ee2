#pragma once

#include <optional>

#include "g2forms/bump.hpp"
#include "g2forms/form_field.hpp"
#include "g2forms/g2structure.hpp"
#include "g2forms/quadrature.hpp"
#include "g2forms/typedecomp.hpp"

namespace g2f {

enum class Flavor { Compact, Split };

/// One of the four volume functionals: total volume density of the pointwise
/// structure recovered from a stable 3- or 4-form field.
struct FunctionalKind {
  int grade = 4;                    // 3 or 4
  Flavor flavor = Flavor::Compact;

  double prefactor() const { return grade == 3 ? 1.0 / 3.0 : 1.0 / 4.0; }
  double c1() const { return grade == 3 ? 4.0 / 3.0 : 3.0 / 4.0; }  // pi_1 coefficient
  OrbitClass orbit() const {
    return flavor == Flavor::Compact ? OrbitClass::CompactG2 : OrbitClass::SplitG2;
  }
  std::string name() const;
};

/// The standard torsion-free base form for a kind (phi0 / psi0 / tilde pair).
FormD standard_base(const FunctionalKind& k);

/// A variation d(f(r) kappa) of a constant stable base: the whole family of
/// explicit perturbations used throughout.  dalpha = f'(r) dr ^ kappa.
struct FamilyVariation {
  FunctionalKind kind;
  FormD base;    // constant stable form of kind.grade
  FormD kappa;   // constant form of grade kind.grade - 1
  Bump bump;
  EVec7 center = EVec7::Zero();

  FormField alpha() const;    // potential f * kappa, support strictly inside B_eta
  FormField dalpha() const;   // exact derivative, same support
  FormField field(double t) const;  // base + t * dalpha
  Domain7 domain() const { return Domain7::ball(bump.eta(), center); }
};

/// Taylor data of t |-> H(base + t dalpha) - H(base) over the family's ball:
/// Delta(t) = sum_k t^k M_k, with per-node degree-7 volume polynomials kept
/// for direct large-t evaluation and orbit checks.
class VolumeSeries {
public:
  std::vector<double> Mk;      // index k = 0..order, Mk[0] unused
  double H0 = 0;               // H(base) over the ball
  double base_vol = 1;         // volume density of the base form
  double c_star = 0;           // fit window in c = t * f'(r)
  double max_abs_fp = 0;
  double fit_residual = 0;     // worst polynomial misfit (validates the degree-7 invariant)
  double orbit_margin_c = 0;   // all |c| below this kept det > 0 at every node

  double delta(double t) const;        // series value of H(t) - H0
  double tail_estimate(double t) const;
  double value(double t) const { return H0 + delta(t); }

  /// Direct evaluation through the stored per-node volume polynomials; exact
  /// in the angular rule's degree, valid at any t that stays in orbit.
  double delta_direct(double t) const;
  bool in_orbit(double t) const;  // min over nodes/radii of the det invariant > 0

  // internal layout
  int order = 0;
  int sphere_degree = 0;
  double eta = 0;
  double vol_exponent = 0;  // 1/3 (grade 3) or 1/4 (grade 4)
  std::vector<std::array<double, 8>> node_poly;  // q(c) per sphere node
  std::vector<double> node_weight;
  std::vector<double> radial_fk;  // R_k = int f'(r)^k r^6 dr, k = 0..order
  const Bump* bump_ref = nullptr;
  Bump bump_copy;
};

VolumeSeries volume_series(const FamilyVariation& fam, int order = 14, int sphere_degree = 9,
                           std::optional<double> c_star = std::nullopt);

/// H(kind, D, F) = integral of the pointwise volume density.  Moment-reduction
/// is served by the series engine and is restricted to family fields.
IntegralResult evaluate(const FunctionalKind& kind, const Domain7& D, const FormField& F,
                        const QuadratureSpec& spec);

/// Same, for an explicit family at amplitude t (exact path).
IntegralResult evaluate_family(const FamilyVariation& fam, double t, int sphere_degree = 9);

/// First variation (1/m) int V ^ star_S S over D.  V must be exact with
/// compactly supported primitive inside D.
double first_variation(const FunctionalKind& kind, const FormField& base, const FormField& V,
                       const Domain7& D, const QuadratureSpec& spec);

/// Second variation at a constant torsion-free base via pointwise type
/// projections: (1/m) int [ c1 <pi1 V1, pi1 V2> + <pi7 V1, pi7 V2> - <pi27 V1, pi27 V2> ].
double second_variation(const FunctionalKind& kind, const FormD& base, const FormField& V1,
                        const FormField& V2, const Domain7& D, const QuadratureSpec& spec);

/// Second variation at a non-constant base field, by pointwise structure
/// recovery and per-node projections (slower; used for perturbed-base checks).
double second_variation_field(const FunctionalKind& kind, const FormField& base,
                              const FormField& V1, const FormField& V2, const Domain7& D,
                              int sphere_degree, int radial_nodes);

/// Central finite-difference Hessian 2*(H(t)+H(-t)-2H(0))/(2 t^2) of the family
/// functional, from the series engine (independent of the projection path).
double fd_second_variation(const FamilyVariation& fam, double t, int sphere_degree = 5);

/// The pointwise integrand of the second variation at a constant base,
/// evaluated at x: (1/m)[c1 |pi1 g|^2 + |pi7 g|^2 - |pi27 g|^2](x) for g = V(x).
double hessian_integrand(const FunctionalKind& kind, const TypeProjections& P, const FormD& g);

}  // namespace g2f
