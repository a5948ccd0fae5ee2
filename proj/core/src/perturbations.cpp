#include "g2forms/perturbations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "g2forms/rng.hpp"
#include "g2forms/standard_forms.hpp"

namespace g2f {

std::string family_str(FamilyName n) {
  switch (n) {
    case FamilyName::P0p: return "P0+";
    case FamilyName::P0m: return "P0-";
    case FamilyName::SG3p: return "SG3+";
    case FamilyName::SG3m: return "SG3-";
    case FamilyName::SG4p: return "SG4+";
    case FamilyName::SG4m: return "SG4-";
    default: return "CH-";
  }
}

FamilyName family_from_str(const std::string& s) {
  for (FamilyName n : all_families())
    if (family_str(n) == s) return n;
  throw Error("unknown perturbation family '" + s + "'");
}

const std::vector<FamilyName>& all_families() {
  static const std::vector<FamilyName> v = {FamilyName::P0p,  FamilyName::P0m, FamilyName::SG3p,
                                            FamilyName::SG3m, FamilyName::SG4p, FamilyName::SG4m,
                                            FamilyName::CHm};
  return v;
}

int family_sign(FamilyName n) {
  switch (n) {
    case FamilyName::P0p:
    case FamilyName::SG3p:
    case FamilyName::SG4p: return +1;
    default: return -1;
  }
}

FunctionalKind family_kind(FamilyName n) {
  switch (n) {
    case FamilyName::P0p:
    case FamilyName::P0m: return {4, Flavor::Compact};
    case FamilyName::SG3p:
    case FamilyName::SG3m: return {3, Flavor::Split};
    case FamilyName::SG4p:
    case FamilyName::SG4m: return {4, Flavor::Split};
    default: return {3, Flavor::Compact};
  }
}

FamilyVariation family_variation(const PerturbationFamily& p) {
  if (p.eta <= 0) throw Error("family_variation: eta must be positive");
  FamilyVariation fam;
  fam.kind = family_kind(p.name);
  fam.base = standard_base(fam.kind);
  switch (p.name) {
    case FamilyName::P0p: {
      // f * star0 psi0 = f * phi0
      fam.kappa = phi0();
      break;
    }
    case FamilyName::P0m: fam.kappa = basis_form({1, 2, 3}); break;
    case FamilyName::SG3p: fam.kappa = basis_form({1, 2}); break;
    case FamilyName::SG3m: fam.kappa = basis_form({1, 4}); break;
    case FamilyName::SG4p: fam.kappa = basis_form({1, 2, 3}); break;
    case FamilyName::SG4m: fam.kappa = basis_form({1, 2, 4}); break;
    case FamilyName::CHm: fam.kappa = basis_form({1, 2}); break;
  }
  fam.bump = Bump(p.eta, p.plateau_a, p.plateau_b);
  fam.center = p.center;
  return fam;
}

MakeFamilyResult make_family(const PerturbationFamily& p) {
  const FamilyVariation fam = family_variation(p);
  return {fam.alpha(), fam.dalpha()};
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

AmplitudeResult optimize_amplitude(const FamilyVariation& fam, int sign,
                                   const std::vector<double>& t_grid, int sphere_degree) {
  AmplitudeResult R;
  const VolumeSeries VS = volume_series(fam, 14, sphere_degree);
  R.H0 = VS.H0;
  R.grid = t_grid;
  // analytic Hessian through the projection path for the remainder reference
  {
    const FormField da = fam.dalpha();
    const QuadratureSpec mspec;
    R.d2_analytic = second_variation(fam.kind, fam.base, da, da, fam.domain(), mspec);
  }
  bool any_valid = false;
  for (double t : t_grid) {
    const bool ok = VS.in_orbit(t);
    R.in_orbit.push_back(ok);
    if (!ok) {
      R.H.push_back(std::numeric_limits<double>::quiet_NaN());
      R.remainder.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    any_valid = true;
    const double dH = VS.delta_direct(t);
    R.H.push_back(VS.H0 + dH);
    R.remainder.push_back(std::abs(dH - 0.5 * t * t * R.d2_analytic));
    const double Ht = VS.H0 + dH;
    const bool better = sign > 0 ? (Ht > R.H_best || !R.sign_achieved)
                                 : (Ht < R.H_best || !R.sign_achieved);
    const bool right_side = sign > 0 ? Ht > VS.H0 : Ht < VS.H0;
    if (right_side && (!R.sign_achieved || better)) {
      R.sign_achieved = true;
      R.t_best = t;
      R.H_best = Ht;
    }
  }
  if (!any_valid)
    throw Error("optimize_amplitude: no amplitude in the grid keeps the form in the stable orbit");
  if (R.sign_achieved) R.eps_hat = std::abs(R.H_best - R.H0) / R.H0;
  // log-log remainder slope over valid grid points
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!R.in_orbit[i] || !(R.remainder[i] > 0)) continue;
    const double lx = std::log(t_grid[i]), ly = std::log(R.remainder[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n >= 2) R.remainder_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return R;
}

FormField rescale(const FormField& F, double eta) {
  if (eta <= 0) throw Error("rescale: eta must be positive");
  const int p = F.grade();
  if (p != 3 && p != 4) throw Error("rescale: grade 3 or 4 expected");
  const double normalization = std::pow(eta, -p);  // eta^-4 or eta^-3
  if (!F.has_structured()) {
    auto base = F;
    FormField out = FormField::blackbox(
        p,
        [base, eta, p, normalization](const EVec7& x) {
          FormD v = base(eta * x);
          v *= normalization * std::pow(eta, p);
          return v;
        },
        F.support_radius() ? std::optional<double>(*F.support_radius() / eta) : std::nullopt);
    return out;
  }
  if (F.center().norm() != 0) throw Error("rescale: origin-centered fields only");
  std::vector<StructTerm> terms;
  for (const auto& t : F.terms()) {
    StructTerm nt = t;
    double scale = normalization * std::pow(eta, p + t.prof.rpow + mono_degree(t.mono));
    if (t.prof.bump) {
      const Bump& ob = *t.prof.bump;
      auto nb = std::make_shared<Bump>(ob.eta() / eta, ob.plateau_a(), ob.plateau_b());
      nt.prof.bump = nb;
      for (const auto& [d, m] : t.prof.factors) scale *= std::pow(eta, -d * m);
      // factors carry over with scaled derivative values baked into `scale`
    }
    nt.form *= scale;
    terms.push_back(std::move(nt));
  }
  FormField out = FormField::structured(p, std::move(terms), F.center());
  if (F.support_radius()) out.set_support_radius(*F.support_radius() / eta);
  return out;
}

namespace {

double sup_form_norm(const FormField& F, double radius, int nsample, uint64_t seed) {
  Philox rng(seed);
  double sup = 0;
  for (int i = 0; i < nsample; ++i) {
    EVec7 x;
    double nrm = 0;
    for (int b = 0; b < 4; ++b) {
      const auto z = rng.normal2(static_cast<uint64_t>(i), static_cast<uint32_t>(b));
      if (2 * b < 7) x[2 * b] = z[0];
      if (2 * b + 1 < 7) x[2 * b + 1] = z[1];
    }
    nrm = x.norm();
    const double r = radius * std::pow(rng.uniform(static_cast<uint64_t>(i), 5), 1.0 / 7.0);
    x *= (nrm > 0 ? r / nrm : 0.0);
    const FormD v = F(x);
    double s2 = 0;
    for (int k = 0; k < v.size(); ++k) s2 += v[k] * v[k];
    sup = std::max(sup, std::sqrt(s2));
  }
  return sup;
}

}  // namespace

PrimitiveReport poincare_primitive(const FormField& W, const std::vector<double>& eta_grid,
                                   double tol) {
  const int p = W.grade();
  if (p < 1) throw Error("poincare_primitive: grade >= 1 required");
  if (!W.has_structured()) throw Error("poincare_primitive: structured field required");
  for (const auto& t : W.terms())
    if (t.prof.bump || t.prof.rpow != 0)
      throw Error("poincare_primitive: polynomial-coefficient fields only");
  if (W.center().norm() != 0) throw Error("poincare_primitive: origin-centered fields only");

  // closedness
  {
    FormField dW = exterior_derivative(W);
    const double res = sup_form_norm(dW, 2.0, 64, 99);
    if (res > tol) {
      std::ostringstream os;
      os << "poincare_primitive: input is not closed (sup |dW| = " << res << ")";
      throw Error(os.str());
    }
  }

  // K(x^b e_J) = 1/(p + |b|) sum_l (-1)^{l-1} x^{b + e_{j_l}} e_{J \ j_l}
  std::vector<StructTerm> terms;
  const GradeTable& gt = grade_table(p);
  for (const auto& t : W.terms()) {
    const int denom_base = p + mono_degree(t.mono);
    for (int jpos = 0; jpos < t.form.size(); ++jpos) {
      const double cf = t.form[jpos];
      if (cf == 0.0) continue;
      const uint8_t m = gt.masks[jpos];
      for (int axis = 1; axis <= 7; ++axis) {
        if (!((m >> (axis - 1)) & 1u)) continue;
        StructTerm nt;
        nt.prof = RadialProfile::constant();
        nt.mono = t.mono;
        nt.mono[axis - 1] += 1;
        nt.form = FormD(p - 1);
        const int s = removal_sign(m, axis);
        nt.form.set(MultiIndex(static_cast<uint8_t>(m & ~(1u << (axis - 1)))),
                    s * cf / denom_base);
        terms.push_back(std::move(nt));
      }
    }
  }
  PrimitiveReport rep;
  rep.primitive = FormField::structured(p - 1, std::move(terms));
  rep.primitive.collect();

  {
    FormField dprim = exterior_derivative(rep.primitive);
    FormField diff = dprim + W * (-1.0);
    rep.d_residual = sup_form_norm(diff, 2.0, 128, 7);
  }
  const FormD at0 = W(EVec7::Zero());
  rep.quadratic_flag = at0.is_zero();

  for (double eta : eta_grid) {
    rep.etas.push_back(eta);
    rep.sup_w.push_back(sup_form_norm(W, 2 * eta, 512, 11));
    rep.sup_prim.push_back(sup_form_norm(rep.primitive, 2 * eta, 512, 13));
  }
  double c1 = 0, c2 = 0;
  for (size_t i = 0; i < rep.etas.size(); ++i) {
    c1 = std::max(c1, rep.sup_w[i] / rep.etas[i]);
    c2 = std::max(c2, rep.sup_prim[i] / (rep.etas[i] * rep.etas[i]));
  }
  rep.C1 = c1;
  rep.C2 = c2;
  if (rep.etas.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(rep.etas.size());
    for (int i = 0; i < n; ++i) {
      const double lx = std::log(rep.etas[i]), ly = std::log(std::max(rep.sup_prim[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    rep.eta_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

GlueResult glue_to_standard(const FormField& psi_prime, double delta,
                            const std::vector<double>& eta_grid_in) {
  if (psi_prime.grade() != 4) throw Error("glue_to_standard: grade-4 field expected");
  const FormD psi_std = psi0();
  const FormD at0 = psi_prime(EVec7::Zero());
  for (int i = 0; i < 35; ++i)
    if (std::abs(at0[i] - psi_std[i]) > 1e-12)
      throw Error("glue_to_standard: psi' must equal psi0 at the origin");

  FormField W = FormField::constant(psi_std) + psi_prime * (-1.0);
  const PrimitiveReport prim = poincare_primitive(W, {0.5, 0.25}, 1e-9);

  std::vector<double> grid = eta_grid_in;
  if (grid.empty())
    for (int k = 0; k < 14; ++k) grid.push_back(std::pow(0.5, k));

  GlueResult best;
  best.sup_change = std::numeric_limits<double>::infinity();
  for (double eta : grid) {
    auto fb = std::make_shared<Bump>(2.0 * eta, 0.5, 0.95);  // == 1 on [0, eta]
    std::vector<StructTerm> terms;
    for (const auto& t : prim.primitive.terms()) {
      StructTerm nt = t;
      nt.prof = nt.prof.times(RadialProfile::bump_f(fb));
      terms.push_back(std::move(nt));
    }
    FormField alpha = FormField::structured(3, std::move(terms));
    alpha.set_support_radius(fb->support_radius());
    FormField dalpha = exterior_derivative(alpha);
    const double sup_change = sup_form_norm(dalpha, 2.0 * eta, 768, 21);

    FormField glued = psi_prime + dalpha;
    // residual |psi'' - psi0| on B_eta
    FormField diff = glued + FormField::constant(psi_std) * (-1.0);
    const double match = sup_form_norm(diff, 0.999 * eta, 256, 31);

    best.attempts.push_back({eta, sup_change});
    if (sup_change < best.sup_change) {
      best.sup_change = sup_change;
      best.eta = eta;
      best.psi_glued = glued;
      best.match_residual = match;
    }
    if (sup_change < delta && match < 1e-10) {
      best.ok = true;
      best.eta = eta;
      best.sup_change = sup_change;
      best.match_residual = match;
      best.psi_glued = glued;
      return best;
    }
  }
  std::ostringstream os;
  os << "glue_to_standard: no eta in the grid achieves ||d(f w)|| < " << delta
     << " (best achieved " << best.sup_change << " at eta " << best.eta << ")";
  throw Error(os.str());
}

Packing packing_grid(const Domain7& box, const std::array<int, 7>& counts, double fill) {
  if (box.kind != Domain7::Kind::Box) throw Error("packing_grid: box domain expected");
  Packing P;
  P.name = "grid";
  double cell = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 7; ++i) cell = std::min(cell, box.lengths[i] / counts[i]);
  const double radius = 0.5 * cell * fill;
  std::array<int, 7> idx{};
  while (true) {
    BallSpec b;
    for (int i = 0; i < 7; ++i)
      b.center[i] = box.corner[i] + (idx[i] + 0.5) * box.lengths[i] / counts[i];
    b.radius = radius;
    P.balls.push_back(b);
    int j = 6;
    while (j >= 0 && ++idx[j] == counts[j]) idx[j--] = 0;
    if (j < 0) break;
  }
  return P;
}

Packing packing_d7(const Domain7& box, int m, double fill) {
  if (box.kind != Domain7::Kind::Box) throw Error("packing_d7: box domain expected");
  // D7 checkerboard: integer points with even coordinate sum, minimal distance sqrt(2)
  Packing P;
  P.name = "d7";
  double h = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 7; ++i) h = std::min(h, box.lengths[i] / m);
  const double radius = fill * h * std::sqrt(2.0) / 2.0;
  std::array<int, 7> idx{};
  while (true) {
    int sum = 0;
    for (int i = 0; i < 7; ++i) sum += idx[i];
    if (sum % 2 == 0) {
      BallSpec b;
      bool inside = true;
      for (int i = 0; i < 7; ++i) {
        b.center[i] = box.corner[i] + idx[i] * h;
        if (b.center[i] - radius < box.corner[i] - 1e-12 ||
            b.center[i] + radius > box.corner[i] + box.lengths[i] + 1e-12)
          inside = false;
      }
      b.radius = radius;
      if (inside) P.balls.push_back(b);
    }
    int j = 6;
    while (j >= 0 && ++idx[j] > m) idx[j--] = 0;
    if (j < 0) break;
  }
  return P;
}

Packing packing_preset(const std::string& name, const Domain7& box) {
  if (name == "grid64") return packing_grid(box, {2, 2, 2, 2, 2, 2, 1});
  if (name == "grid128") return packing_grid(box, {2, 2, 2, 2, 2, 2, 2});
  if (name == "grid2187") return packing_grid(box, {3, 3, 3, 3, 3, 3, 3});
  if (name == "d7-4") return packing_d7(box, 4);
  if (name == "d7-6") return packing_d7(box, 6);
  if (name == "d7-8") return packing_d7(box, 8);
  throw Error("unknown packing preset '" + name + "'");
}

double packing_covered_fraction(const Domain7& box, const Packing& p) {
  double covered = 0;
  for (const auto& b : p.balls) covered += unit_ball_volume7() * std::pow(b.radius, 7);
  return covered / box.volume();
}

UnboundedResult unbounded_iterate(const Domain7& box, const Packing& packing, int sign, int rounds,
                                  double nu, double plateau_a, double plateau_b,
                                  int sphere_degree) {
  if (box.kind != Domain7::Kind::Box && box.kind != Domain7::Kind::Torus)
    throw Error("unbounded_iterate: box or torus domain expected");
  if (sign != 1 && sign != -1) throw Error("unbounded_iterate: sign must be +1 or -1");

  // disjointness (sorted first-coordinate window) and interiority
  const auto& balls = packing.balls;
  double rmax = 0;
  for (const auto& b : balls) rmax = std::max(rmax, b.radius);
  std::vector<size_t> order(balls.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return balls[a].center[0] < balls[b].center[0]; });
  for (size_t oi = 0; oi < order.size(); ++oi) {
    const size_t i = order[oi];
    for (size_t oj = oi + 1; oj < order.size(); ++oj) {
      const size_t j = order[oj];
      if (balls[j].center[0] - balls[i].center[0] > 2 * rmax) break;
      const double d = (balls[i].center - balls[j].center).norm();
      if (d < balls[i].radius + balls[j].radius - 1e-12) {
        std::ostringstream os;
        os << "unbounded_iterate: balls " << i << " and " << j << " overlap";
        throw Error(os.str());
      }
    }
    if (box.kind == Domain7::Kind::Box) {
      for (int k = 0; k < 7; ++k) {
        if (balls[i].center[k] - balls[i].radius < box.corner[k] - 1e-12 ||
            balls[i].center[k] + balls[i].radius > box.corner[k] + box.lengths[k] + 1e-12)
          throw Error("unbounded_iterate: ball " + std::to_string(i) + " is not interior to the box");
      }
    }
  }
  UnboundedResult R;
  R.covered_fraction = packing_covered_fraction(box, packing);
  if (R.covered_fraction < 1.0 - nu) {
    std::ostringstream os;
    os << "unbounded_iterate: covered fraction " << R.covered_fraction << " < required "
       << (1.0 - nu) << " (deficit " << (1.0 - nu - R.covered_fraction)
       << "); disjoint balls cannot reach this coverage";
    throw Error(os.str());
  }

  // unit-model family: P0+/P0- on the unit ball; per-ball numbers are exact
  // eta^7-scaled copies by the rescaling invariance.
  PerturbationFamily pf;
  pf.name = sign > 0 ? FamilyName::P0p : FamilyName::P0m;
  pf.eta = 1.0;
  pf.plateau_a = plateau_a;
  pf.plateau_b = plateau_b;
  const FamilyVariation fam = family_variation(pf);
  const VolumeSeries VS = volume_series(fam, 14, sphere_degree);
  const AmplitudeResult opt = optimize_amplitude(fam, sign, log_grid(1e-3, 0.3, 25), sphere_degree);
  if (!opt.sign_achieved)
    throw Error("unbounded_iterate: no amplitude achieves the requested sign");
  // stay well inside the orbit so the escalating schedule keeps validity
  const double t1 = 0.5 * opt.t_best;
  const double Hunit0 = VS.H0;
  const double ball_total = R.covered_fraction * box.volume();
  const double out_total = box.volume() - ball_total;

  R.eps_hat = std::abs(VS.delta_direct(t1)) / Hunit0;
  R.ratio_bound = 1.0 + sign * R.eps_hat / 2.0;

  R.H.push_back(out_total + ball_total);  // base density is 1 everywhere
  for (int n = 1; n <= rounds; ++n) {
    const double s = t1 * std::sqrt(static_cast<double>(n));
    if (!VS.in_orbit(s))
      throw Error("unbounded_iterate: schedule leaves the stable orbit at round " +
                  std::to_string(n));
    R.amplitudes.push_back(s);
    const double Hunit = Hunit0 + VS.delta_direct(s);
    const double H = out_total + ball_total * (Hunit / Hunit0);
    R.H.push_back(H);
  }
  R.monotone = true;
  R.ratio_ok = true;
  for (size_t n = 1; n < R.H.size(); ++n) {
    const double ratio = R.H[n] / R.H[n - 1];
    R.ratios.push_back(ratio);
    if (sign > 0 && ratio <= 1.0) R.monotone = false;
    if (sign < 0 && ratio >= 1.0) R.monotone = false;
    if (sign > 0 && ratio < R.ratio_bound) R.ratio_ok = false;
    if (sign < 0 && ratio > R.ratio_bound) R.ratio_ok = false;
  }
  return R;
}

SandwichReport geodesic_ball_sandwich(const FormField& base, double eta, int directions,
                                      int radial_steps) {
  if (eta <= 0) throw Error("geodesic_ball_sandwich: eta must be positive");
  Philox rng(2718);
  SandwichReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (int d = 0; d < directions; ++d) {
    EVec7 u;
    for (int b = 0; b < 4; ++b) {
      const auto z = rng.normal2(static_cast<uint64_t>(d), static_cast<uint32_t>(b));
      if (2 * b < 7) u[2 * b] = z[0];
      if (2 * b + 1 < 7) u[2 * b + 1] = z[1];
    }
    u /= u.norm();
    // cumulative arc length along s -> s u by the trapezoid rule; exit radius
    // where it reaches eta (the metric varies slowly on these bases)
    const double smax = 3.0 * eta;
    const double h = smax / radial_steps;
    auto speed = [&](double s) {
      const G2Structure S = recover_structure(base(s * u));
      if (!S.ok()) throw Error("geodesic_ball_sandwich: base leaves the stable orbits");
      return std::sqrt(u.dot(S.metric->g * u));
    };
    double length = 0, prev = speed(0.0), exit_s = smax;
    for (int k = 1; k <= radial_steps; ++k) {
      const double cur = speed(k * h);
      const double seg = 0.5 * (prev + cur) * h;
      if (length + seg >= eta) {
        exit_s = (k - 1) * h + h * (eta - length) / seg;
        break;
      }
      length += seg;
      prev = cur;
    }
    const double ratio = exit_s / eta;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.r = std::max(1.0 - rep.min_ratio, rep.max_ratio - 1.0);
  return rep;
}

double family_integrand_reference(FamilyName n, const EVec7& x, double fp_over_r) {
  const double w = fp_over_r * fp_over_r;
  const double x2 = x[1] * x[1], x3 = x[2] * x[2], x5 = x[4] * x[4], x6 = x[5] * x[5],
               x7 = x[6] * x[6];
  const double q4567 = x[3] * x[3] + x5 + x6 + x7;
  switch (n) {
    case FamilyName::P0p: return w * x.squaredNorm();
    case FamilyName::P0m: return -w * q4567 / 8.0;
    case FamilyName::SG3p: return w / 3.0 * (-(2.0 / 3.0) * x3 + 0.5 * q4567);
    case FamilyName::SG3m: return w / 3.0 * (0.5 * x2 + 0.5 * x3 - (2.0 / 3.0) * x5 - 0.5 * x6 - 0.5 * x7);
    case FamilyName::SG4p: return w / 4.0 * 0.5 * q4567;
    case FamilyName::SG4m: return w / 4.0 * (0.5 * x3 - 0.5 * x5 - 0.5 * x6 - 0.75 * x7);
    default: return -w / 3.0 * ((2.0 / 3.0) * x3 + 0.5 * q4567);  // CH-
  }
}

double family_component_reference(FamilyName n, int label, const EVec7& x, double fp_over_r) {
  const double w = fp_over_r * fp_over_r;
  const double x2 = x[1] * x[1], x3 = x[2] * x[2], x5 = x[4] * x[4], x6 = x[5] * x[5],
               x7 = x[6] * x[6];
  const double q4567 = x[3] * x[3] + x5 + x6 + x7;
  switch (n) {
    case FamilyName::P0m:
      if (label == 1) return 0.0;
      if (label == 7) return w * q4567 / 4.0;
      if (label == 27) return 3.0 * w * q4567 / 4.0;
      break;
    case FamilyName::SG3p:
      if (label == 1) return w * x3 / 7.0;
      if (label == 7) return -w * q4567 / 4.0;
      if (label == 27) return w * ((6.0 / 7.0) * x3 - 0.75 * q4567);
      break;
    case FamilyName::SG3m:
      if (label == 1) return w * x5 / 7.0;
      if (label == 7) return w * (-x2 - x3 + x6 + x7) / 4.0;
      if (label == 27) return w * ((6.0 / 7.0) * x5 + 0.75 * (-x2 - x3 + x6 + x7));
      break;
    default: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SaddleResult saddle_gram(const std::vector<PerturbationFamily>& bumps,
                         const QuadratureSpec& spec) {
  const size_t k = bumps.size();
  if (k == 0) throw Error("saddle_gram: at least one bump required");
  const FunctionalKind kind = family_kind(bumps[0].name);
  for (const auto& b : bumps) {
    if (family_kind(b.name).grade != kind.grade ||
        family_kind(b.name).flavor != kind.flavor)
      throw Error("saddle_gram: bumps must target one functional");
  }
  // disjoint supports
  std::vector<FamilyVariation> fams;
  for (const auto& b : bumps) fams.push_back(family_variation(b));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      const double d = (fams[i].center - fams[j].center).norm();
      if (d <= fams[i].bump.support_radius() + fams[j].bump.support_radius())
        throw Error("saddle_gram: supports of bumps " + std::to_string(i) + " and " +
                    std::to_string(j) + " overlap");
    }
  }
  SaddleResult R;
  R.gram = Eigen::MatrixXd::Zero(static_cast<long>(k), static_cast<long>(k));
  const FormD base = standard_base(kind);
  for (size_t i = 0; i < k; ++i) {
    const FormField di = fams[i].dalpha();
    for (size_t j = i; j < k; ++j) {
      const FormField dj = fams[j].dalpha();
      const Domain7 D = Domain7::ball(fams[i].bump.eta(), fams[i].center);
      const double v = second_variation(kind, base, di, dj, D, spec);
      R.gram(static_cast<long>(i), static_cast<long>(j)) = v;
      R.gram(static_cast<long>(j), static_cast<long>(i)) = v;
      if (i != j) R.max_offdiag = std::max(R.max_offdiag, std::abs(v));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R.gram);
  R.min_eig = es.eigenvalues().minCoeff();
  R.max_eig = es.eigenvalues().maxCoeff();
  R.definite_sign = R.min_eig > 0 ? +1 : (R.max_eig < 0 ? -1 : 0);
  return R;
}

}  // namespace g2f
