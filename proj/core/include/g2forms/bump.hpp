#pragma once

#include <array>
#include <cmath>
#include <memory>

namespace g2f {

/// Radial cutoff f: [0, eta] -> [0,1] with f == 1 on [0, a*eta] and f == 0 on
/// [b*eta, eta], glued by the exp(-1/x) smoothstep on the transition annulus.
/// f(r) = S((b - r/eta)/(b - a)) there, S(u) = E(u)/(E(u)+E(1-u)), E(x)=exp(-1/x).
class Bump {
public:
  Bump(double eta = 1.0, double a = 0.3, double b = 0.8) : eta_(eta), a_(a), b_(b) {}

  double eta() const { return eta_; }
  double plateau_a() const { return a_; }
  double plateau_b() const { return b_; }
  double support_radius() const { return b_ * eta_; }

  double f(double r) const { return jet3(r)[0]; }
  double fp(double r) const { return jet3(r)[1]; }
  double fpp(double r) const { return jet3(r)[2]; }

  /// (f, f', f'') at r.
  std::array<double, 3> jet3(double r) const {
    if (r <= a_ * eta_) return {1.0, 0.0, 0.0};
    if (r >= b_ * eta_) return {0.0, 0.0, 0.0};
    const double du = -1.0 / ((b_ - a_) * eta_);  // du/dr
    const double u = (b_ - r / eta_) / (b_ - a_);
    const auto s = smoothstep_jet(u);
    return {s[0], s[1] * du, s[2] * du * du};
  }

  /// max |f'| over the support (used to size series windows).
  double max_abs_fp() const {
    double m = 0;
    const double lo = a_ * eta_, hi = b_ * eta_;
    for (int i = 0; i <= 400; ++i) m = std::max(m, std::abs(fp(lo + (hi - lo) * i / 400.0)));
    return m;
  }

  bool same_as(const Bump& o) const { return eta_ == o.eta_ && a_ == o.a_ && b_ == o.b_; }

private:
  // (S, S', S'') for the exp-based smoothstep on (0,1)
  static std::array<double, 3> smoothstep_jet(double u) {
    const auto e = expm_jet(u);        // E(u), E'(u), E''(u)
    const auto g = expm_jet(1.0 - u);  // E(1-u), E'(1-u), E''(1-u)
    const double A = e[0], Ap = e[1], App = e[2];
    const double B = g[0], Bp = -g[1], Bpp = g[2];  // chain through (1-u)
    const double D = A + B, Dp = Ap + Bp, Dpp = App + Bpp;
    const double S = A / D;
    const double Sp = (Ap * D - A * Dp) / (D * D);
    const double Spp = (App * D - A * Dpp) / (D * D) - 2.0 * Dp * Sp / D;
    return {S, Sp, Spp};
  }
  // E(x) = exp(-1/x) for x > 0 with E', E''
  static std::array<double, 3> expm_jet(double x) {
    const double E = std::exp(-1.0 / x);
    const double x2 = x * x;
    const double Ep = E / x2;
    const double Epp = E * (1.0 - 2.0 * x) / (x2 * x2);
    return {E, Ep, Epp};
  }

  double eta_, a_, b_;
};

using BumpPtr = std::shared_ptr<const Bump>;

}  // namespace g2f
