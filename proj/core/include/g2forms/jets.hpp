#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace g2f {

/// Truncated Taylor series around 0 (coefficient vector, fixed order).
using Jet = std::vector<double>;

inline Jet jet_mul(const Jet& a, const Jet& b) {
  Jet c(a.size(), 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; i + j < a.size() && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

/// a^alpha for a[0] > 0 via the standard recurrence
/// (alpha a c' = c a' convolution identity).
inline Jet jet_pow(const Jet& a, double alpha) {
  if (a[0] <= 0) throw std::domain_error("jet_pow: positive leading coefficient required");
  const size_t K = a.size();
  Jet c(K, 0.0);
  c[0] = std::pow(a[0], alpha);
  for (size_t k = 1; k < K; ++k) {
    double s = 0;
    for (size_t j = 1; j <= k; ++j) {
      const double aj = j < a.size() ? a[j] : 0.0;
      s += (alpha * j - (k - j)) * aj * c[k - j];
    }
    c[k] = s / (k * a[0]);
  }
  return c;
}

/// Polynomial fit q(c) = sum coeffs[k] c^k from samples at `nodes`,
/// least squares; residual is the max abs misfit at the sample points.
struct PolyFit {
  std::vector<double> coeffs;
  double residual = 0;
  double eval(double c) const {
    double acc = 0;
    for (size_t k = coeffs.size(); k-- > 0;) acc = acc * c + coeffs[k];
    return acc;
  }
};

PolyFit fit_polynomial(const std::vector<double>& nodes, const std::vector<double>& values,
                       int degree);

/// Chebyshev sample points of the first kind on [-w, w].
inline std::vector<double> chebyshev_nodes(int n, double w) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = w * std::cos(M_PI * (i + 0.5) / n);
  return x;
}

}  // namespace g2f
