#pragma once

#include <vector>

#include "g2forms/g2structure.hpp"
#include "g2forms/quadrature.hpp"

namespace g2f {

/// Periodic field of 4-forms depending on one active coordinate (x^1), the
/// cohomogeneity reduction of the flow on a flat 7-torus.  Every algebraic
/// operation stays fully 7-dimensional; only the differentiation collapses.
struct CoflowState {
  int n = 256;
  double period = 2.0 * M_PI;          // period of x^1; remaining six are 1
  double time = 0;
  std::vector<FormD> psi;              // grade 4, one per node
  std::vector<FormD> primitive_accum;  // grade 3, d(primitive) == psi - psi(0)

  double spacing() const { return period / n; }
  EVec7 torus_periods() const {
    EVec7 p = EVec7::Ones();
    p[0] = period;
    return p;
  }
  double node_x(int i) const { return period * i / n; }
};

/// psi0 + s cos(2 pi x / L) dx1 ^ phi0 (closed and exact; the primitive is
/// s L/(2 pi) sin(2 pi x / L) phi0).
CoflowState coflow_initial(int n, double period, double s);

struct TorsionReport {
  std::vector<FormD> dpsi;        // grade 5, per node
  std::vector<FormD> dstar_psi;   // grade 4, per node
  double sup_dpsi = 0;
  double sup_dstar_psi = 0;
  bool torsion_free = false;
  double tol = 1e-10;
};
TorsionReport torsion(const CoflowState& S);

/// Reported stability bound cfl_factor * h^2 / max metric eigenvalue.
double cfl_bound(const CoflowState& S, double cfl_factor = 0.2);

/// One explicit Euler step of d psi/dt = d d* psi.  The update is exact, so
/// closedness is preserved identically; throws when a node leaves the orbit
/// (suggesting a smaller step) or when dt violates the reported bound.
CoflowState coflow_step(const CoflowState& S, double dt, double cfl_factor = 0.2);

struct MonotonicityReport {
  double min_rate = 0;  // min over nodes of (vol_after - vol_before)/dt
  double tol = 1e-9;
  bool pass = false;
};
MonotonicityReport volume_monotonicity_check(const CoflowState& S, double dt,
                                             double tol = 1e-9);

/// H4 over the torus (mean volume density times torus volume).
double coflow_H4(const CoflowState& S);

/// sup over nodes of |d(primitive_accum) - (psi - psi_initial)|.
double exactness_residual(const CoflowState& S, const CoflowState& initial);

struct HKReport {
  double eta = 1;
  double vol_ball = 0;           // Vol(B_eta), quadrature
  double area_sphere = 0;        // Area(S^6_eta)
  double rhs_exp6 = 0;           // int_0^eta (1 - r/eta)^6 dr * Area
  double rhs_exp7 = 0;           // int_0^eta (1 - r/eta)^7 dr * Area
  double eta_over_7_area = 0;    // (eta/7) * Area
  bool saturated_exp6 = false;   // Vol == (eta/7) Area == rhs_exp6
  double discrepancy_exp7 = 0;   // rhs_exp7 - (eta/7) Area  (the eta/8 variant)
};
HKReport hk_bound_check(double eta);

/// Spectral derivative of a periodic sample vector.
std::vector<double> spectral_derivative(const std::vector<double>& f, double period);

}  // namespace g2f
