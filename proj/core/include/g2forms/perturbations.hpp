#pragma once

#include <string>
#include <vector>

#include "g2forms/functionals.hpp"

namespace g2f {

/// The seven named bump perturbations.  P0 lives over psi0 (compact, grade 4),
/// SG3 over phi0~ (split, grade 3), SG4 over psi0~ (split, grade 4) and CH-
/// over phi0 (compact, grade 3).
enum class FamilyName { P0p, P0m, SG3p, SG3m, SG4p, SG4m, CHm };

std::string family_str(FamilyName n);
FamilyName family_from_str(const std::string& s);
const std::vector<FamilyName>& all_families();

/// Expected sign of the second variation along the family (+1 or -1).
int family_sign(FamilyName n);
FunctionalKind family_kind(FamilyName n);

struct PerturbationFamily {
  FamilyName name = FamilyName::P0p;
  EVec7 center = EVec7::Zero();
  double eta = 1.0;
  double amplitude = 0.0;
  double plateau_a = 0.3;
  double plateau_b = 0.8;
};

/// The fixed name -> potential mapping (P0+ -> f * star0 psi0, P0- -> f dx123,
/// SG3+/- -> f dx12 / f dx14, SG4+/- -> f dx123 / f dx124, CH- -> f dx12).
FamilyVariation family_variation(const PerturbationFamily& p);

struct MakeFamilyResult {
  FormField alpha;
  FormField dalpha;
};
MakeFamilyResult make_family(const PerturbationFamily& p);

struct AmplitudeResult {
  double t_best = 0;
  double H0 = 0;
  double H_best = 0;
  double eps_hat = 0;  // |H(t*) - H0| / H0
  bool sign_achieved = false;
  std::vector<double> grid;
  std::vector<double> H;            // H(t) on the grid (NaN where out of orbit)
  std::vector<bool> in_orbit;
  // Taylor remainder |H(t) - H0 - (t^2/2) D2H| on the in-orbit grid
  std::vector<double> remainder;
  double d2_analytic = 0;
  double remainder_slope = 0;       // log-log fit over the grid
};

/// Scan a logarithmic amplitude grid, pick the best valid t for the family's
/// sign, and fit the Taylor-remainder exponent.
AmplitudeResult optimize_amplitude(const FamilyVariation& fam, int sign,
                                   const std::vector<double>& t_grid, int sphere_degree = 9);

std::vector<double> log_grid(double lo, double hi, int n);

/// eta^{-4} mu_eta^* F for grade 4 (eta^{-3} for grade 3): exact on
/// structured fields centered at the origin.
FormField rescale(const FormField& F, double eta);

struct PrimitiveReport {
  FormField primitive;
  double d_residual = 0;       // sup |d(primitive) - W| on samples
  bool quadratic_flag = false; // W(0) == 0, enabling the eta^2 bound
  double C1 = 0;               // fitted sup|W| / eta over the grid
  double C2 = 0;               // fitted sup|primitive| / eta^2
  double eta_exponent = 0;     // log-log slope of sup|primitive| vs eta
  std::vector<double> etas, sup_w, sup_prim;
};

/// Radial-homotopy primitive K(W), exact on polynomial-coefficient fields;
/// requires a closed input.
PrimitiveReport poincare_primitive(const FormField& W,
                                   const std::vector<double>& eta_grid = {0.5, 0.25, 0.125},
                                   double tol = 1e-10);

struct GlueResult {
  FormField psi_glued;
  double eta = 0;
  double sup_change = 0;        // measured ||d(f eta primitive)||_C0
  double match_residual = 0;    // sup |psi'' - psi0| on B_eta samples
  bool ok = false;
  std::vector<std::pair<double, double>> attempts;  // (eta, sup_change)
};

/// psi'' = psi' + d(f_eta * K(psi0 - psi')) equal to psi0 on B_eta with
/// ||d(...)|| < delta; searches a descending eta grid.
GlueResult glue_to_standard(const FormField& psi_prime, double delta,
                            const std::vector<double>& eta_grid = {});

struct BallSpec {
  EVec7 center = EVec7::Zero();
  double radius = 1.0;
};

struct Packing {
  std::string name;
  std::vector<BallSpec> balls;
  double covered_fraction = 0;  // filled by unbounded_iterate / helpers
};

/// Axis-aligned grid of inscribed balls (counts per axis).
Packing packing_grid(const Domain7& box, const std::array<int, 7>& counts, double fill = 1.0);
/// Checkerboard (D7) lattice packing scaled into the box.
Packing packing_d7(const Domain7& box, int cells_per_axis, double fill = 1.0);
Packing packing_preset(const std::string& name, const Domain7& box);
double packing_covered_fraction(const Domain7& box, const Packing& p);

struct UnboundedResult {
  std::vector<double> H;          // H_0 .. H_rounds
  std::vector<double> ratios;     // H_n / H_{n-1}
  std::vector<double> amplitudes; // unit-model amplitude per round
  double eps_hat = 0;             // measured per-ball relative change at round 1
  double covered_fraction = 0;
  bool monotone = false;
  bool ratio_ok = false;          // every ratio beats 1 +- eps_hat/2
  double ratio_bound = 0;         // 1 + sign * eps_hat/2
};

/// Rounds of disjoint-ball volume perturbations on a box (or torus) with the
/// P0 family; errors on overlapping balls or covered fraction below 1 - nu.
UnboundedResult unbounded_iterate(const Domain7& box, const Packing& packing, int sign,
                                  int rounds, double nu, double plateau_a = 0.3,
                                  double plateau_b = 0.8, int sphere_degree = 9);

struct SaddleResult {
  Eigen::MatrixXd gram;
  double min_eig = 0, max_eig = 0;
  double max_offdiag = 0;
  int definite_sign = 0;  // +1 positive definite, -1 negative definite, 0 neither
};

/// Measured sandwich of the rescaled geodesic ball of a base field whose
/// metric is computable on a grid: per direction, radial arc length is
/// integrated out to eta and the Euclidean exit radius recorded, so that
/// B_{1-r} subset eta^{-1} B_eta(base) subset B_{1+r} with
/// r = max(1 - min_ratio, max_ratio - 1).  The base must carry the model
/// metric at the center for the ratios to approach 1 as eta shrinks.
struct SandwichReport {
  double min_ratio = 0, max_ratio = 0;
  double r = 0;
};
SandwichReport geodesic_ball_sandwich(const FormField& base, double eta, int directions = 64,
                                      int radial_steps = 64);

/// Closed-form pointwise Hessian integrand of a family at its standard base:
/// (f'(r)/r)^2 Q(x) with the family's quadratic Q.
double family_integrand_reference(FamilyName n, const EVec7& x, double fp_over_r);

/// Signed squared norm of the label-d projection of dalpha at x, for the
/// families whose component norms have closed forms (P0-, SG3+, SG3-).
/// Returns NaN when no closed form is tabulated.
double family_component_reference(FamilyName n, int label, const EVec7& x, double fp_over_r);

/// Gram matrix of the second variation on the span of k disjoint bumps of one
/// sign; errors on overlapping supports.
SaddleResult saddle_gram(const std::vector<PerturbationFamily>& bumps,
                         const QuadratureSpec& spec = {});

}  // namespace g2f
