#include "g2forms/quadrature.hpp"

#include <cmath>

#include "g2forms/error.hpp"
#include "g2forms/rng.hpp"

namespace g2f {

Domain7 Domain7::ball(double r, EVec7 c) {
  Domain7 d;
  d.kind = Kind::Ball;
  d.radius = r;
  d.center = std::move(c);
  return d;
}

Domain7 Domain7::box(EVec7 corner, EVec7 lengths) {
  Domain7 d;
  d.kind = Kind::Box;
  d.corner = std::move(corner);
  d.lengths = std::move(lengths);
  for (int i = 0; i < 7; ++i)
    if (d.lengths[i] <= 0) throw Error("Domain7: box edge lengths must be positive");
  return d;
}

Domain7 Domain7::torus(EVec7 periods) {
  Domain7 d;
  d.kind = Kind::Torus;
  d.periods = std::move(periods);
  for (int i = 0; i < 7; ++i)
    if (d.periods[i] <= 0) throw Error("Domain7: torus periods must be positive");
  return d;
}

double unit_ball_volume7() { return 16.0 * std::pow(M_PI, 3) / 105.0; }
double sphere_area6() { return 16.0 * std::pow(M_PI, 3) / 15.0; }

double Domain7::volume() const {
  switch (kind) {
    case Kind::Ball: return unit_ball_volume7() * std::pow(radius, 7);
    case Kind::Box: return lengths.prod();
    default: return periods.prod();
  }
}

std::string Domain7::str() const {
  switch (kind) {
    case Kind::Ball: return "ball(radius " + std::to_string(radius) + ")";
    case Kind::Box: return "box";
    default: return "torus";
  }
}

QuadMethod quad_method_from_string(const std::string& s) {
  if (s == "moment-reduction") return QuadMethod::MomentReduction;
  if (s == "monte-carlo") return QuadMethod::MonteCarlo;
  if (s == "radial-1d") return QuadMethod::Radial1D;
  throw Error("unknown quadrature method '" + s + "'");
}

std::string quad_method_name(QuadMethod m) {
  switch (m) {
    case QuadMethod::MomentReduction: return "moment-reduction";
    case QuadMethod::MonteCarlo: return "monte-carlo";
    default: return "radial-1d";
  }
}

AngularMoment angular_moment(const Monomial& e) {
  for (int v : e)
    if (v < 0) throw Error("angular_moment: exponents must be nonnegative");
  for (int v : e)
    if (v % 2 == 1) return {Rat(0)};
  // int_{S^6} prod x_i^{2k_i} = 2 prod Gamma(k_i + 1/2) / Gamma(7/2 + K)
  // with Gamma(k+1/2) = sqrt(pi) (2k)! / (4^k k!); the pi powers collapse to pi^3.
  auto gamma_half_rat = [](int k) {
    // Gamma(k + 1/2) / sqrt(pi) as a rational
    Rat r(1);
    for (int j = 1; j <= k; ++j) r *= Rat(2 * j - 1, 2);
    return r;
  };
  int K = 0;
  Rat num(2);
  for (int v : e) {
    num *= gamma_half_rat(v / 2);
    K += v / 2;
  }
  // Gamma(7/2 + K)/sqrt(pi) = prod_{j=1}^{3+K} (2j-1)/2
  Rat den(1);
  for (int j = 1; j <= 3 + K; ++j) den *= Rat(2 * j - 1, 2);
  return {num / den};
}

double tree_sum(const std::vector<double>& v) {
  if (v.empty()) return 0;
  std::vector<double> layer = v;
  while (layer.size() > 1) {
    std::vector<double> next((layer.size() + 1) / 2);
    for (size_t i = 0; i + 1 < layer.size(); i += 2) next[i / 2] = layer[i] + layer[i + 1];
    if (layer.size() % 2) next.back() = layer.back();
    layer = std::move(next);
  }
  return layer[0];
}

namespace {

EVec7 ball_point(const Philox& rng, uint64_t i, const EVec7& center, double radius) {
  // 7 normals (blocks 0..3) + 1 uniform for the radius (block 3 second slot)
  double n[8];
  for (int b = 0; b < 4; ++b) {
    const auto z = rng.normal2(i, static_cast<uint32_t>(b));
    n[2 * b] = z[0];
    n[2 * b + 1] = z[1];
  }
  double norm = 0;
  for (int k = 0; k < 7; ++k) norm += n[k] * n[k];
  norm = std::sqrt(norm);
  const double u = rng.uniform(i, 4);
  const double r = radius * std::pow(u, 1.0 / 7.0);
  EVec7 x;
  for (int k = 0; k < 7; ++k) x[k] = center[k] + r * n[k] / (norm > 0 ? norm : 1.0);
  return x;
}

EVec7 box_point(const Philox& rng, uint64_t i, const EVec7& corner, const EVec7& lengths) {
  EVec7 x;
  for (int b = 0; b < 4; ++b) {
    const auto u = rng.uniform2(i, static_cast<uint32_t>(b));
    if (2 * b < 7) x[2 * b] = corner[2 * b] + lengths[2 * b] * u[0];
    if (2 * b + 1 < 7) x[2 * b + 1] = corner[2 * b + 1] + lengths[2 * b + 1] * u[1];
  }
  return x;
}

IntegralResult monte_carlo(const Domain7& D, const std::function<double(const EVec7&)>& f,
                           const QuadratureSpec& spec) {
  const long N = spec.samples;
  if (N < 1) throw Error("monte-carlo needs samples >= 1");
  Philox rng(spec.seed);
  std::vector<double> vals(static_cast<size_t>(N)), sq(static_cast<size_t>(N));
  for (long i = 0; i < N; ++i) {
    EVec7 x;
    switch (D.kind) {
      case Domain7::Kind::Ball: x = ball_point(rng, static_cast<uint64_t>(i), D.center, D.radius); break;
      case Domain7::Kind::Box: x = box_point(rng, static_cast<uint64_t>(i), D.corner, D.lengths); break;
      default: x = box_point(rng, static_cast<uint64_t>(i), EVec7::Zero(), D.periods); break;
    }
    const double v = f(x);
    vals[static_cast<size_t>(i)] = v;
    sq[static_cast<size_t>(i)] = v * v;
  }
  const double vol = D.volume();
  const double mean = tree_sum(vals) / static_cast<double>(N);
  const double mean2 = tree_sum(sq) / static_cast<double>(N);
  const double var = std::max(0.0, mean2 - mean * mean);
  IntegralResult r;
  r.value = vol * mean;
  r.error = vol * std::sqrt(var / static_cast<double>(N));
  r.evals = N;
  return r;
}

IntegralResult radial_sphere(const Domain7& D, const std::function<double(const EVec7&)>& f,
                             const QuadratureSpec& spec) {
  if (D.kind != Domain7::Kind::Ball) throw Error("radial-1d requires a ball domain");
  const SphereRule& S = sphere_rule(spec.sphere_degree);
  const Rule1D rad = mapped(gauss_legendre(spec.nodes), 0.0, D.radius);
  IntegralResult res;
  std::vector<double> shell(rad.x.size());
  for (size_t ir = 0; ir < rad.x.size(); ++ir) {
    const double r = rad.x[ir];
    std::vector<double> vals(S.x.size());
    for (size_t is = 0; is < S.x.size(); ++is) {
      EVec7 x;
      for (int k = 0; k < 7; ++k) x[k] = D.center[k] + r * S.x[is][k];
      vals[is] = f(x) * S.w[is];
    }
    shell[ir] = rad.w[ir] * std::pow(r, 6) * tree_sum(vals);
    res.evals += static_cast<long>(S.x.size());
  }
  res.value = tree_sum(shell);
  res.error = std::abs(res.value) * 1e-12;  // smooth-integrand heuristic
  return res;
}

IntegralResult torus_trapezoid(const Domain7& D, const std::function<double(const EVec7&)>& f,
                               const QuadratureSpec& spec) {
  // tensor-product trapezoid; node count per axis kept small enough to stay
  // tractable in 7 dimensions.
  const int n = std::max(2, std::min(spec.nodes, 8));
  std::array<int, 7> idx{};
  std::vector<double> vals;
  vals.reserve(static_cast<size_t>(std::pow(n, 7)));
  while (true) {
    EVec7 x;
    for (int k = 0; k < 7; ++k) x[k] = D.periods[k] * idx[k] / n;
    vals.push_back(f(x));
    int j = 6;
    while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
    if (j < 0) break;
  }
  IntegralResult r;
  r.value = D.volume() * tree_sum(vals) / static_cast<double>(vals.size());
  r.evals = static_cast<long>(vals.size());
  r.error = std::abs(r.value) * 1e-10;
  return r;
}

}  // namespace

IntegralResult integrate(const Domain7& D, const std::function<double(const EVec7&)>& f,
                         const QuadratureSpec& spec) {
  switch (spec.method) {
    case QuadMethod::MonteCarlo: return monte_carlo(D, f, spec);
    case QuadMethod::Radial1D:
      return D.kind == Domain7::Kind::Torus ? torus_trapezoid(D, f, spec) : radial_sphere(D, f, spec);
    default:
      throw Error("integrate: moment-reduction requires a structured integrand");
  }
}

IntegralResult integrate_structured(const Domain7& D, const StructuredScalar& s,
                                    const EVec7& center, const QuadratureSpec& spec) {
  if (D.kind != Domain7::Kind::Ball) throw Error("moment-reduction is defined on ball domains");
  if ((D.center - center).norm() > 0)
    throw Error("moment-reduction: integrand center must match the ball center");
  IntegralResult res;
  for (const auto& term : s) {
    const AngularMoment am = angular_moment(term.mono);
    if (am.rational.is_zero()) continue;
    const int deg = mono_degree(term.mono);
    // split the radial integral at the bump plateau edges
    std::vector<double> cuts = {0.0, D.radius};
    if (term.prof.bump) {
      const double a = term.prof.bump->plateau_a() * term.prof.bump->eta();
      const double b = term.prof.bump->plateau_b() * term.prof.bump->eta();
      if (a > 0 && a < D.radius) cuts.insert(cuts.end() - 1, a);
      if (b > a && b < D.radius) cuts.insert(cuts.end() - 1, b);
    }
    // fold the profile's r-power into the volume factor to avoid 0 * inf at r -> 0
    RadialProfile pf = term.prof;
    const int rp = pf.rpow;
    pf.rpow = 0;
    double radial = 0, err = 0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      double e = 0;
      radial += adaptive_1d([&](double r) { return pf(r) * std::pow(r, 6 + deg + rp); },
                            cuts[i], cuts[i + 1], spec.tolerance, &e);
      err += e;
    }
    res.value += term.coeff * radial * am.value();
    res.error += std::abs(term.coeff) * err * std::abs(am.value());
  }
  return res;
}

}  // namespace g2f
