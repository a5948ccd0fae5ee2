#pragma once

#include <array>
#include <functional>
#include <vector>

namespace g2f {

struct Rule1D {
  std::vector<double> x, w;
};

/// n-point Gauss-Legendre on [-1,1].
Rule1D gauss_legendre(int n);

/// n-point Gauss rule for the weight (1-x^2)^alpha on [-1,1] (Gegenbauer).
Rule1D gauss_gegenbauer(int n, double alpha);

Rule1D mapped(const Rule1D& r, double a, double b);

/// Adaptive Gauss7/Kronrod15 on [a,b] to a relative tolerance.
double adaptive_1d(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   double* err_estimate = nullptr, int max_depth = 14);

/// Product cubature on the unit 6-sphere, exact for polynomials of total
/// degree <= exact_degree.  Weights sum to Area(S^6) = 16 pi^3 / 15.
struct SphereRule {
  std::vector<std::array<double, 7>> x;
  std::vector<double> w;
  int exact_degree = 0;
};
const SphereRule& sphere_rule(int exact_degree);

}  // namespace g2f
