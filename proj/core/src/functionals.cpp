#include "g2forms/functionals.hpp"

#include <cmath>
#include <map>
#include <atomic>
#include <mutex>
#include <thread>
#include <sstream>

#include "g2forms/jets.hpp"
#include "g2forms/standard_forms.hpp"

namespace g2f {

std::string FunctionalKind::name() const {
  std::string n = grade == 3 ? "H3" : "H4";
  if (flavor == Flavor::Split) n += "~";
  return n + "_boundary";
}

FormD standard_base(const FunctionalKind& k) {
  if (k.grade == 3) return k.flavor == Flavor::Compact ? phi0() : phi0_tilde();
  return k.flavor == Flavor::Compact ? psi0() : psi0_tilde();
}

FormField FamilyVariation::alpha() const {
  auto b = std::make_shared<Bump>(bump);
  StructTerm t;
  t.prof = RadialProfile::bump_f(b);
  t.form = kappa;
  FormField F = FormField::structured(kappa.grade(), {t}, center);
  F.set_support_radius(bump.support_radius());
  return F;
}

FormField FamilyVariation::dalpha() const { return exterior_derivative(alpha()); }

FormField FamilyVariation::field(double t) const {
  FormField F = FormField::constant(base) + dalpha() * t;
  F.family = std::make_shared<FamilyVariation>(*this);
  F.family_amplitude = t;
  F.set_support_radius(bump.support_radius());
  return F;
}

namespace {

double vol_exponent_for(int grade) { return grade == 3 ? 1.0 / 3.0 : 1.0 / 4.0; }

/// q(c) = cbrt(det invariant) of base + c * mu; a degree-7 polynomial in c,
/// equal to vol^3 (grade 3) resp. vol^4 (grade 4) on the stable orbits.
double q_invariant(const FormD& sigma) {
  double c[35];
  for (int i = 0; i < 35; ++i) c[i] = sigma[i];
  const PointwiseVol pv = sigma.grade() == 3 ? vol_density3(c) : vol_density4(c);
  return std::cbrt(pv.det);
}

double q_invariant_raw(int grade, const double* c35) {
  const PointwiseVol pv = grade == 3 ? vol_density3(c35) : vol_density4(c35);
  return std::cbrt(pv.det);
}

struct SeriesKey {
  std::string s;
  bool operator<(const SeriesKey& o) const { return s < o.s; }
};

SeriesKey series_key(const FamilyVariation& fam, int order, int degree) {
  std::ostringstream os;
  os.precision(17);
  os << fam.kind.grade << '|' << (fam.kind.flavor == Flavor::Split) << '|' << order << '|' << degree
     << '|' << fam.bump.eta() << '|' << fam.bump.plateau_a() << '|' << fam.bump.plateau_b() << '|';
  for (int i = 0; i < fam.base.size(); ++i) os << fam.base[i] << ',';
  os << '|';
  for (int i = 0; i < fam.kappa.size(); ++i) os << fam.kappa[i] << ',';
  return {os.str()};
}

}  // namespace

VolumeSeries volume_series(const FamilyVariation& fam, int order, int sphere_degree,
                           std::optional<double> c_star_opt) {
  static std::map<SeriesKey, VolumeSeries> cache;
  static std::mutex mu;
  const SeriesKey key = series_key(fam, order, sphere_degree);
  if (!c_star_opt) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  VolumeSeries VS;
  VS.order = order;
  VS.sphere_degree = sphere_degree;
  VS.eta = fam.bump.eta();
  VS.vol_exponent = vol_exponent_for(fam.kind.grade);
  VS.max_abs_fp = fam.bump.max_abs_fp();
  VS.bump_copy = fam.bump;
  double c_star = c_star_opt.value_or(0.5);

  const SphereRule& S = sphere_rule(sphere_degree);
  const int nfit = 8;
  const int grade = fam.kind.grade;

  // one shared fit operator: degree-7 coefficients from 8 Chebyshev samples
  std::vector<double> nodes;
  Eigen::MatrixXd Vinv;
  auto build_fit = [&](double w) {
    nodes = chebyshev_nodes(nfit, w);
    Eigen::MatrixXd V(nfit, 8);
    for (int i = 0; i < nfit; ++i) {
      double p = 1;
      for (int k = 0; k < 8; ++k) {
        V(i, k) = p;
        p *= nodes[i];
      }
    }
    Vinv = V.inverse();
  };

  // shrink the window until every sampled det invariant stays positive
  for (int attempt = 0; attempt < 12; ++attempt) {
    build_fit(c_star);
    bool ok = true;
    for (size_t is = 0; is < S.x.size() && ok; is += std::max<size_t>(1, S.x.size() / 37)) {
      FormD mu_dir = [&] {
        FormD x1(1);
        for (int k = 0; k < 7; ++k) x1.set(MultiIndex({k + 1}), S.x[is][k]);
        return wedge(x1, fam.kappa);
      }();
      for (double c : {nodes[0], nodes[nfit - 1]}) {
        FormD sig = fam.base;
        FormD m = mu_dir;
        m *= c;
        sig += m;
        if (q_invariant(sig) <= 0) ok = false;
      }
    }
    if (ok) break;
    c_star *= 0.7;
  }
  VS.c_star = c_star;

  VS.Mk.assign(order + 1, 0.0);
  VS.node_poly.resize(S.x.size());
  VS.node_weight = S.w;
  VS.fit_residual = 0;

  // wedge table: row i holds the coefficients of dx^{i+1} ^ kappa
  double Wt[7][35];
  for (int i = 0; i < 7; ++i) {
    FormD dxi(1);
    dxi.set(MultiIndex({i + 1}), 1.0);
    const FormD w = wedge(dxi, fam.kappa);
    for (int j = 0; j < 35; ++j) Wt[i][j] = w[j];
  }
  double base_c[35];
  for (int j = 0; j < 35; ++j) base_c[j] = fam.base[j];

  // fixed 4096-node chunks combined in order: the result does not depend on
  // how many threads execute them
  const size_t nnodes = S.x.size();
  const size_t chunk = 4096;
  const size_t nchunks = (nnodes + chunk - 1) / chunk;
  std::vector<std::vector<double>> Sk_part(nchunks, std::vector<double>(order + 1, 0.0));
  std::vector<double> res_part(nchunks, 0.0);
  double vol0_first = 0;
  std::atomic<size_t> next_chunk{0};
  auto work = [&]() {
    Eigen::VectorXd vals(nfit);
    double mu[35], sig[35];
    for (size_t ic = next_chunk.fetch_add(1); ic < nchunks; ic = next_chunk.fetch_add(1)) {
    const size_t lo = ic * chunk, hi = std::min(nnodes, lo + chunk);
    for (size_t is = lo; is < hi; ++is) {
      for (int j = 0; j < 35; ++j) {
        double acc = 0;
        for (int i = 0; i < 7; ++i) acc += S.x[is][i] * Wt[i][j];
        mu[j] = acc;
      }
      for (int i = 0; i < nfit; ++i) {
        for (int j = 0; j < 35; ++j) sig[j] = base_c[j] + nodes[i] * mu[j];
        vals(i) = q_invariant_raw(grade, sig);
      }
      const Eigen::VectorXd coef = Vinv * vals;
      std::array<double, 8>& poly = VS.node_poly[is];
      for (int k = 0; k < 8; ++k) poly[k] = coef(k);

      // validate the degree-7 claim at off-node points
      for (double c : {0.37 * c_star, -0.81 * c_star}) {
        for (int j = 0; j < 35; ++j) sig[j] = base_c[j] + c * mu[j];
        double pv = 0, p = 1;
        for (int k = 0; k < 8; ++k) {
          pv += poly[k] * p;
          p *= c;
        }
        res_part[ic] = std::max(res_part[ic], std::abs(pv - q_invariant_raw(grade, sig)));
      }

      // Taylor of vol = q^exponent around c = 0
      Jet q(order + 1, 0.0);
      for (int k = 0; k <= std::min(order, 7); ++k) q[k] = poly[k];
      const Jet vol = jet_pow(q, VS.vol_exponent);
      for (int k = 1; k <= order; ++k) Sk_part[ic][k] += S.w[is] * vol[k];
      if (is == 0) vol0_first = vol[0];
    }
    }
  };
  {
    const unsigned nthreads = std::min(std::max(1u, std::thread::hardware_concurrency()), 8u);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }
  std::vector<double> Sk(order + 1, 0.0);
  for (size_t ic = 0; ic < nchunks; ++ic) {
    for (int k = 1; k <= order; ++k) Sk[k] += Sk_part[ic][k];
    VS.fit_residual = std::max(VS.fit_residual, res_part[ic]);
  }
  VS.base_vol = vol0_first;

  // radial moments R_k = int_0^eta f'(r)^k r^6 dr (supported on the annulus)
  VS.radial_fk.assign(order + 1, 0.0);
  const Bump& bp = VS.bump_copy;
  const double lo = bp.plateau_a() * bp.eta(), hi = bp.plateau_b() * bp.eta();
  for (int k = 1; k <= order; ++k) {
    VS.radial_fk[k] = adaptive_1d(
        [&](double r) { return std::pow(bp.fp(r), k) * std::pow(r, 6); }, lo, hi, 1e-12);
    VS.Mk[k] = Sk[k] * VS.radial_fk[k];
  }
  VS.H0 = VS.base_vol * unit_ball_volume7() * std::pow(bp.eta(), 7);

  // orbit margin: smallest positive root of any node polynomial, scanned
  double margin = c_star;
  for (const auto& poly : VS.node_poly) {
    for (int g = 1; g <= 64; ++g) {
      const double c = c_star * g / 64.0;
      for (double cc : {c, -c}) {
        double pv = 0, p = 1;
        for (int k = 0; k < 8; ++k) {
          pv += poly[k] * p;
          p *= cc;
        }
        if (pv <= 0) margin = std::min(margin, std::abs(cc));
      }
    }
  }
  VS.orbit_margin_c = margin;

  if (!c_star_opt) {
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, VS);
  }
  return VS;
}

double VolumeSeries::delta(double t) const {
  double acc = 0, p = t;
  for (int k = 1; k <= order; ++k) {
    acc += Mk[k] * p;
    p *= t;
  }
  return acc;
}

double VolumeSeries::tail_estimate(double t) const {
  const double rho = std::abs(t) * max_abs_fp / std::max(c_star, 1e-300);
  const double last = std::abs(Mk[order] * std::pow(t, order));
  if (rho >= 1) return std::numeric_limits<double>::infinity();
  return last * rho / (1 - rho);
}

double VolumeSeries::delta_direct(double t) const {
  const Bump& bp = bump_copy;
  const double lo = bp.plateau_a() * bp.eta(), hi = bp.plateau_b() * bp.eta();
  // integrand r^6 sum_nodes w (q(c)^e - q(0)^e), computed cancellation-free:
  // q(c)^e - q0^e = q0^e expm1(e log1p((q(c)-q0)/q0)) with q(c)-q0 = c * Horner.
  auto shell = [&](double r) {
    const double c = t * bp.fp(r);
    double acc = 0;
    for (size_t is = 0; is < node_poly.size(); ++is) {
      const auto& poly = node_poly[is];
      double dq = 0;
      for (int k = 7; k >= 1; --k) dq = dq * c + poly[k];
      dq *= c;
      const double q0 = poly[0];
      acc += node_weight[is] * std::pow(q0, vol_exponent) *
             std::expm1(vol_exponent * std::log1p(dq / q0));
    }
    return acc * std::pow(r, 6);
  };
  return adaptive_1d(shell, lo, hi, 1e-11);
}

bool VolumeSeries::in_orbit(double t) const {
  const Bump& bp = bump_copy;
  const double lo = bp.plateau_a() * bp.eta(), hi = bp.plateau_b() * bp.eta();
  for (int g = 0; g <= 48; ++g) {
    const double r = lo + (hi - lo) * g / 48.0;
    const double c = t * bp.fp(r);
    for (const auto& poly : node_poly) {
      double pv = 0, p = 1;
      for (int k = 0; k < 8; ++k) {
        pv += poly[k] * p;
        p *= c;
      }
      if (pv <= 0) return false;
    }
  }
  return true;
}

IntegralResult evaluate_family(const FamilyVariation& fam, double t, int sphere_degree) {
  const VolumeSeries VS = volume_series(fam, 14, sphere_degree);
  if (!VS.in_orbit(t))
    throw Error("evaluate_family: form leaves the stable orbit at amplitude t = " +
                std::to_string(t));
  IntegralResult r;
  r.value = VS.H0 + VS.delta_direct(t);
  r.error = std::abs(r.value) * 1e-11 + VS.fit_residual;
  r.evals = static_cast<long>(VS.node_poly.size());
  return r;
}

namespace {

void check_point_orbit(const FunctionalKind& kind, const FormD& sigma, const EVec7& x) {
  const G2Structure S = recover_structure(sigma);
  if (S.orbit != kind.orbit()) {
    std::ostringstream os;
    os << "orbit violation at point (";
    for (int i = 0; i < 7; ++i) os << (i ? "," : "") << x[i];
    os << "): " << (S.note.empty() ? orbit_name(S.orbit) : S.note);
    throw Error(os.str());
  }
}

}  // namespace

IntegralResult evaluate(const FunctionalKind& kind, const Domain7& D, const FormField& F,
                        const QuadratureSpec& spec) {
  if (F.grade() != kind.grade) throw Error("evaluate: field grade does not match the functional");
  if (spec.method == QuadMethod::MomentReduction) {
    if (!F.family)
      throw Error("evaluate: moment-reduction requires the structured family representation");
    const auto fam = std::static_pointer_cast<const FamilyVariation>(F.family);
    if (D.kind != Domain7::Kind::Ball || std::abs(D.radius - fam->bump.eta()) > 1e-14 ||
        (D.center - fam->center).norm() > 1e-14)
      throw Error("evaluate: moment-reduction integrates over the family's own ball");
    return evaluate_family(*fam, F.family_amplitude, spec.sphere_degree);
  }
  long counter = 0;
  auto density = [&](const EVec7& x) {
    const FormD sigma = F(x);
    double c[35];
    for (int i = 0; i < 35; ++i) c[i] = sigma[i];
    const PointwiseVol pv = kind.grade == 3 ? vol_density3(c) : vol_density4(c);
    if (!pv.in_orbit) check_point_orbit(kind, sigma, x);  // throws with the point
    if ((counter++ & 0xfff) == 0) check_point_orbit(kind, sigma, x);
    return pv.vol;
  };
  return integrate(D, density, spec);
}

double first_variation(const FunctionalKind& kind, const FormField& base, const FormField& V,
                       const Domain7& D, const QuadratureSpec& spec) {
  if (V.grade() != kind.grade) throw Error("first_variation: variation grade mismatch");
  if (!V.is_exact())
    throw Error("first_variation: variation must be exact (constructed as d(beta))");
  if (D.kind == Domain7::Kind::Ball) {
    if (!V.support_radius())
      throw Error("first_variation: support check failure (no support radius)");
    const double dist = (V.center() - D.center).norm();
    if (dist + *V.support_radius() >= D.radius)
      throw Error("first_variation: support check failure (support not compactly inside domain)");
  }
  const double pref = kind.prefactor();
  // constant base: integrand is V ^ star(base), a structured scalar
  const bool const_base =
      base.has_structured() && base.terms().size() == 1 &&
      base.terms()[0].prof.is_constant() && mono_degree(base.terms()[0].mono) == 0;
  if (const_base && V.has_structured() && D.kind == Domain7::Kind::Ball) {
    const G2Structure S = recover_structure(base.terms()[0].form);
    if (!S.ok()) throw Error("first_variation: degenerate base");
    const FormD star_base = kind.grade == 3 ? S.fourform : S.threeform;
    StructuredScalar integrand = structured_top_wedge(V, star_base);
    for (auto& t : integrand) t.coeff *= pref;
    Domain7 Dc = D;
    Dc.center = V.center();
    return integrate_structured(Dc, integrand, V.center(), spec).value;
  }
  auto f = [&](const EVec7& x) {
    const FormD sigma = base(x);
    const G2Structure S = recover_structure(sigma);
    if (!S.ok()) check_point_orbit(kind, sigma, x);
    const FormD star_sigma = kind.grade == 3 ? S.fourform : S.threeform;
    return pref * wedge(V(x), star_sigma)[0];
  };
  QuadratureSpec sp = spec;
  if (sp.method == QuadMethod::MomentReduction) sp.method = QuadMethod::Radial1D;
  return integrate(D, f, sp).value;
}

double hessian_integrand(const FunctionalKind& kind, const TypeProjections& P, const FormD& g) {
  const int p = g.grade();
  const Eigen::MatrixXd& G = P.gram(p);
  auto norm2 = [&](const FormD& a) {
    double acc = 0;
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      for (int j = 0; j < a.size(); ++j) acc += a[i] * G(i, j) * a[j];
    }
    return acc;
  };
  const FormD g1 = P.project(1, g).form;
  const FormD g7 = P.project(7, g).form;
  const FormD g27 = P.project(27, g).form;
  return kind.prefactor() * (kind.c1() * norm2(g1) + norm2(g7) - norm2(g27));
}

double second_variation(const FunctionalKind& kind, const FormD& base, const FormField& V1,
                        const FormField& V2, const Domain7& D, const QuadratureSpec& spec) {
  if (V1.grade() != kind.grade || V2.grade() != kind.grade)
    throw Error("second_variation: variation grade mismatch");
  if (!V1.is_exact() || !V2.is_exact())
    throw Error("second_variation: variations must be exact (constructed as d(beta))");
  // disjoint supports integrate to zero identically
  if (V1.support_radius() && V2.support_radius()) {
    const double dist = (V1.center() - V2.center()).norm();
    if (dist > *V1.support_radius() + *V2.support_radius()) return 0.0;
  }
  const G2Structure S = recover_structure(base);
  if (!S.ok()) throw Error("second_variation: degenerate base form");
  static std::map<std::string, std::shared_ptr<TypeProjections>> pj_cache;
  static std::mutex mu;
  std::shared_ptr<TypeProjections> P;
  {
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < base.size(); ++i) os << base[i] << ',';
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = pj_cache[os.str()];
    if (!slot) slot = std::make_shared<TypeProjections>(S);
    P = slot;
  }
  const int p = kind.grade;
  if (V1.has_structured() && V2.has_structured() && D.kind == Domain7::Kind::Ball) {
    StructuredScalar total;
    const double pref = kind.prefactor();
    const struct { int label; double coef; } parts[] = {{1, kind.c1()}, {7, 1.0}, {27, -1.0}};
    for (const auto& part : parts) {
      const Eigen::MatrixXd& M = P->matrix(p, part.label);
      const FormField p1 = apply_matrix(M, V1, p);
      const FormField p2 = apply_matrix(M, V2, p);
      StructuredScalar inner = structured_inner(p1, p2, P->gram(p));
      for (auto& t : inner) t.coeff *= pref * part.coef;
      total.insert(total.end(), inner.begin(), inner.end());
    }
    Domain7 Dc = D;
    Dc.center = V1.center();
    return integrate_structured(Dc, total, V1.center(), spec).value;
  }
  auto f = [&](const EVec7& x) {
    FormD g = V1(x);
    const FormD h = V2(x);
    // polarization: <A g1, g2> with the symmetric operator; evaluate directly
    const Eigen::MatrixXd& G = P->gram(p);
    const struct { int label; double coef; } parts[] = {{1, kind.c1()}, {7, 1.0}, {27, -1.0}};
    double acc = 0;
    for (const auto& part : parts) {
      const FormD a = P->project(part.label, g).form;
      const FormD b = P->project(part.label, h).form;
      double ip = 0;
      for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j) ip += a[i] * G(i, j) * b[j];
      acc += part.coef * ip;
    }
    return kind.prefactor() * acc;
  };
  QuadratureSpec sp = spec;
  if (sp.method == QuadMethod::MomentReduction) sp.method = QuadMethod::Radial1D;
  return integrate(D, f, sp).value;
}

double second_variation_field(const FunctionalKind& kind, const FormField& base,
                              const FormField& V1, const FormField& V2, const Domain7& D,
                              int sphere_degree, int radial_nodes) {
  if (D.kind != Domain7::Kind::Ball) throw Error("second_variation_field: ball domain expected");
  const SphereRule& S = sphere_rule(sphere_degree);
  const Rule1D rad = mapped(gauss_legendre(radial_nodes), 0.0, D.radius);
  std::vector<double> shells(rad.x.size());
  for (size_t ir = 0; ir < rad.x.size(); ++ir) {
    std::vector<double> vals(S.x.size());
    for (size_t is = 0; is < S.x.size(); ++is) {
      EVec7 x;
      for (int k = 0; k < 7; ++k) x[k] = D.center[k] + rad.x[ir] * S.x[is][k];
      const FormD sigma = base(x);
      const G2Structure Sx = recover_structure(sigma);
      if (Sx.orbit != kind.orbit())
        throw Error("second_variation_field: base leaves the expected orbit");
      TypeProjections P(Sx);
      const FormD g = V1(x), h = V2(x);
      const Eigen::MatrixXd& G = P.gram(kind.grade);
      const struct { int label; double coef; } parts[] = {{1, kind.c1()}, {7, 1.0}, {27, -1.0}};
      double acc = 0;
      for (const auto& part : parts) {
        const FormD a = P.project(part.label, g).form;
        const FormD b = P.project(part.label, h).form;
        double ip = 0;
        for (int i = 0; i < a.size(); ++i)
          for (int j = 0; j < b.size(); ++j) ip += a[i] * G(i, j) * b[j];
        acc += part.coef * ip;
      }
      vals[is] = S.w[is] * kind.prefactor() * acc;
    }
    shells[ir] = rad.w[ir] * std::pow(rad.x[ir], 6) * tree_sum(vals);
  }
  return tree_sum(shells);
}

double fd_second_variation(const FamilyVariation& fam, double t, int sphere_degree) {
  const VolumeSeries VS = volume_series(fam, 14, sphere_degree);
  return (VS.delta_direct(t) + VS.delta_direct(-t)) / (t * t);
}

}  // namespace g2f
