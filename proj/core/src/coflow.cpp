#include "g2forms/coflow.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "g2forms/standard_forms.hpp"

namespace g2f {

namespace {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n < 2) return;
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1 : -1);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1);
      for (size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

bool is_pow2(size_t n) { return n && !(n & (n - 1)); }

}  // namespace

std::vector<double> spectral_derivative(const std::vector<double>& f, double period) {
  const size_t n = f.size();
  const double k0 = 2.0 * M_PI / period;
  std::vector<std::complex<double>> a(n);
  for (size_t i = 0; i < n; ++i) a[i] = f[i];
  if (is_pow2(n)) {
    fft(a, false);
  } else {  // plain DFT for awkward sizes
    std::vector<std::complex<double>> out(n, 0.0);
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i)
        out[k] += f[i] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * i) / n);
    a = std::move(out);
  }
  for (size_t k = 0; k < n; ++k) {
    long m = static_cast<long>(k);
    if (m > static_cast<long>(n) / 2) m -= static_cast<long>(n);
    if (2 * static_cast<size_t>(std::abs(m)) == n) m = 0;  // Nyquist
    a[k] *= std::complex<double>(0.0, k0 * m);
  }
  if (is_pow2(n)) {
    fft(a, true);
  } else {
    std::vector<std::complex<double>> out(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t k = 0; k < n; ++k)
        out[i] += a[k] * std::polar(1.0, 2.0 * M_PI * static_cast<double>(k * i) / n) /
                  static_cast<double>(n);
    a = std::move(out);
  }
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = a[i].real();
  return d;
}

namespace {

/// nodewise d along the active coordinate: dx1 ^ (spectral d/dx1 of the field)
std::vector<FormD> discrete_d(const std::vector<FormD>& field, double period) {
  const size_t n = field.size();
  const int p = field[0].grade();
  FormD dx1(1);
  dx1.set(MultiIndex({1}), 1.0);
  std::vector<FormD> out(n, FormD(p + 1));
  std::vector<double> comp(n);
  for (int c = 0; c < field[0].size(); ++c) {
    for (size_t i = 0; i < n; ++i) comp[i] = field[i][c];
    const std::vector<double> dc = spectral_derivative(comp, period);
    FormD basis(p);
    basis[c] = 1.0;
    const FormD wedge1 = wedge(dx1, basis);
    for (size_t i = 0; i < n; ++i) {
      if (dc[i] == 0.0) continue;
      FormD t = wedge1;
      t *= dc[i];
      out[i] += t;
    }
  }
  return out;
}

double sup_coeff_field(const std::vector<FormD>& f) {
  double m = 0;
  for (const auto& v : f)
    for (int i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

G2Structure node_structure(const FormD& psi, size_t node) {
  const G2Structure S = recover_from_4form_direct(psi);
  if (!S.ok()) {
    std::ostringstream os;
    os << "coflow: metric recovery failed at node " << node << " (" << S.note << ")";
    throw Error(os.str());
  }
  return S;
}

}  // namespace

CoflowState coflow_initial(int n, double period, double s) {
  CoflowState S;
  S.n = n;
  S.period = period;
  S.psi.reserve(n);
  S.primitive_accum.assign(n, FormD(3));
  FormD dx1(1);
  dx1.set(MultiIndex({1}), 1.0);
  const FormD pattern = wedge(dx1, phi0());
  for (int i = 0; i < n; ++i) {
    FormD p = psi0();
    FormD t = pattern;
    t *= s * std::cos(2.0 * M_PI * S.node_x(i) / period);
    p += t;
    S.psi.push_back(p);
  }
  return S;
}

TorsionReport torsion(const CoflowState& S) {
  TorsionReport R;
  std::vector<FormD> stars;
  stars.reserve(S.psi.size());
  for (size_t i = 0; i < S.psi.size(); ++i) stars.push_back(node_structure(S.psi[i], i).threeform);
  R.dpsi = discrete_d(S.psi, S.period);
  R.dstar_psi = discrete_d(stars, S.period);
  R.sup_dpsi = sup_coeff_field(R.dpsi);
  R.sup_dstar_psi = sup_coeff_field(R.dstar_psi);
  R.torsion_free = R.sup_dpsi <= R.tol && R.sup_dstar_psi <= R.tol;
  return R;
}

double cfl_bound(const CoflowState& S, double cfl_factor) {
  double lam_max = 0;
  for (size_t i = 0; i < S.psi.size(); ++i) {
    const G2Structure st = node_structure(S.psi[i], i);
    Eigen::SelfAdjointEigenSolver<EMat7> es(st.metric->g);
    lam_max = std::max(lam_max, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  const double h = S.spacing();
  return cfl_factor * h * h / lam_max;
}

CoflowState coflow_step(const CoflowState& S, double dt, double cfl_factor) {
  const double bound = cfl_bound(S, cfl_factor);
  if (dt > bound) {
    std::ostringstream os;
    os << "coflow_step: dt " << dt << " exceeds the stability bound " << bound;
    throw Error(os.str());
  }
  const size_t n = S.psi.size();
  // delta psi = (-1)^p star d star psi, p = 4
  std::vector<FormD> star_psi;
  std::vector<Metric7> metrics;
  star_psi.reserve(n);
  metrics.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const G2Structure st = node_structure(S.psi[i], i);
    star_psi.push_back(st.threeform);
    metrics.push_back(*st.metric);
  }
  const std::vector<FormD> d_star = discrete_d(star_psi, S.period);  // grade 4
  std::vector<FormD> delta(n, FormD(3));
  for (size_t i = 0; i < n; ++i) delta[i] = hodge_star(metrics[i], d_star[i]);  // grade 3
  const std::vector<FormD> laplacian = discrete_d(delta, S.period);             // grade 4

  CoflowState out = S;
  out.time += dt;
  for (size_t i = 0; i < n; ++i) {
    FormD upd = laplacian[i];
    upd *= dt;
    out.psi[i] += upd;
    FormD pr = delta[i];
    pr *= dt;
    out.primitive_accum[i] += pr;
    double c[35];
    for (int k = 0; k < 35; ++k) c[k] = out.psi[i][k];
    if (!vol_density4(c).in_orbit) {
      std::ostringstream os;
      os << "coflow_step: node " << i << " left the stable orbit; retry with dt <= " << dt / 4;
      throw Error(os.str());
    }
  }
  return out;
}

MonotonicityReport volume_monotonicity_check(const CoflowState& S, double dt, double tol) {
  MonotonicityReport R;
  R.tol = tol;
  const CoflowState next = coflow_step(S, dt);
  double mn = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < S.psi.size(); ++i) {
    double c0[35], c1[35];
    for (int k = 0; k < 35; ++k) {
      c0[k] = S.psi[i][k];
      c1[k] = next.psi[i][k];
    }
    mn = std::min(mn, (vol_density4(c1).vol - vol_density4(c0).vol) / dt);
  }
  R.min_rate = mn;
  R.pass = mn >= -tol;
  return R;
}

double coflow_H4(const CoflowState& S) {
  double acc = 0;
  for (size_t i = 0; i < S.psi.size(); ++i) {
    double c[35];
    for (int k = 0; k < 35; ++k) c[k] = S.psi[i][k];
    const PointwiseVol pv = vol_density4(c);
    if (!pv.in_orbit) throw Error("coflow_H4: node " + std::to_string(i) + " is degenerate");
    acc += pv.vol;
  }
  return acc / static_cast<double>(S.psi.size()) * S.torus_periods().prod();
}

double exactness_residual(const CoflowState& S, const CoflowState& initial) {
  const std::vector<FormD> dprim = discrete_d(S.primitive_accum, S.period);
  double sup = 0;
  for (size_t i = 0; i < S.psi.size(); ++i) {
    FormD diff = S.psi[i];
    diff -= initial.psi[i];
    diff -= dprim[i];
    for (int k = 0; k < diff.size(); ++k) sup = std::max(sup, std::abs(diff[k]));
  }
  return sup;
}

HKReport hk_bound_check(double eta) {
  if (eta <= 0) throw Error("hk_bound_check: eta must be positive");
  HKReport R;
  R.eta = eta;
  R.area_sphere = sphere_area6() * std::pow(eta, 6);
  R.vol_ball = sphere_area6() * adaptive_1d([](double r) { return std::pow(r, 6); }, 0, eta, 1e-13);
  R.eta_over_7_area = eta / 7.0 * R.area_sphere;
  R.rhs_exp6 =
      adaptive_1d([&](double r) { return std::pow(1.0 - r / eta, 6); }, 0, eta, 1e-13) *
      R.area_sphere;
  R.rhs_exp7 =
      adaptive_1d([&](double r) { return std::pow(1.0 - r / eta, 7); }, 0, eta, 1e-13) *
      R.area_sphere;
  R.saturated_exp6 = std::abs(R.vol_ball - R.eta_over_7_area) <= 1e-12 * R.vol_ball &&
                     std::abs(R.rhs_exp6 - R.eta_over_7_area) <= 1e-12 * R.vol_ball;
  R.discrepancy_exp7 = R.rhs_exp7 - R.eta_over_7_area;
  return R;
}

}  // namespace g2f
