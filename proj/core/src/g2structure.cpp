#include "g2forms/g2structure.hpp"

#include <cmath>
#include <cstring>

#include "g2forms/rng.hpp"

namespace g2f {

std::string orbit_name(OrbitClass o) {
  switch (o) {
    case OrbitClass::CompactG2: return "compact-G2";
    case OrbitClass::SplitG2: return "split-G2";
    default: return "degenerate";
  }
}

namespace {

// Precomputed combinatorics for B(u,v) = (u -| w)^(v -| w)^w on 35 coefficients.
struct B3Tables {
  struct IEntry { int16_t src, dst; int8_t sign; };
  struct WEntry { int16_t a, b, dst; int8_t sign; };
  std::array<std::vector<IEntry>, 7> interior;  // per axis
  std::vector<WEntry> wedge22;                  // ordered disjoint 2,2 pairs
  std::array<int16_t, 35> top_pos;              // 4-pos -> complementary 3-pos
  std::array<int8_t, 35> top_sign;
  std::array<int16_t, 35> dual_src;             // 3-pos K -> 4-pos K^c
  std::array<int8_t, 35> dual_sign;             // sign(K, K^c)
};

const B3Tables& b3t() {
  static const B3Tables t = [] {
    B3Tables t;
    const GradeTable& g3 = grade_table(3);
    const GradeTable& g2 = grade_table(2);
    const GradeTable& g4 = grade_table(4);
    for (int axis = 1; axis <= 7; ++axis) {
      for (int s = 0; s < 35; ++s) {
        const uint8_t m = g3.masks[s];
        if (!((m >> (axis - 1)) & 1u)) continue;
        const uint8_t md = static_cast<uint8_t>(m & ~(1u << (axis - 1)));
        t.interior[axis - 1].push_back({static_cast<int16_t>(s),
                                        static_cast<int16_t>(pos_of_mask(md)),
                                        static_cast<int8_t>(removal_sign(m, axis))});
      }
    }
    for (int a = 0; a < 21; ++a) {
      for (int b = 0; b < 21; ++b) {
        const int s = merge_sign(g2.masks[a], g2.masks[b]);
        if (s == 0) continue;
        t.wedge22.push_back({static_cast<int16_t>(a), static_cast<int16_t>(b),
                             static_cast<int16_t>(pos_of_mask(static_cast<uint8_t>(g2.masks[a] | g2.masks[b]))),
                             static_cast<int8_t>(s)});
      }
    }
    for (int m4 = 0; m4 < 35; ++m4) {
      const uint8_t mk = g4.masks[m4];
      t.top_pos[m4] = static_cast<int16_t>(pos_of_mask(static_cast<uint8_t>(~mk & 0x7f)));
      t.top_sign[m4] = static_cast<int8_t>(complement_sign(mk));
    }
    for (int k3 = 0; k3 < 35; ++k3) {
      const uint8_t mk = g3.masks[k3];
      t.dual_src[k3] = static_cast<int16_t>(pos_of_mask(static_cast<uint8_t>(~mk & 0x7f)));
      t.dual_sign[k3] = static_cast<int8_t>(complement_sign(mk));
    }
    return t;
  }();
  return t;
}

// b_{ij} = B_{ij}/6 for the 35 coefficients of a 3-form.
void b_matrix3(const double* c, EMat7& b) {
  const B3Tables& t = b3t();
  double w2[7][21];
  std::memset(w2, 0, sizeof(w2));
  for (int i = 0; i < 7; ++i)
    for (const auto& e : t.interior[i]) w2[i][e.dst] += e.sign * c[e.src];

  for (int i = 0; i < 7; ++i) {
    for (int j = i; j < 7; ++j) {
      double t4[35];
      std::memset(t4, 0, sizeof(t4));
      for (const auto& e : t.wedge22) t4[e.dst] += e.sign * w2[i][e.a] * w2[j][e.b];
      double acc = 0;
      for (int m = 0; m < 35; ++m) acc += t4[m] * t.top_sign[m] * c[t.top_pos[m]];
      b(i, j) = acc / 6.0;
      b(j, i) = b(i, j);
    }
  }
}

double det7(EMat7 a) {
  // partial-pivot LU, plenty for 7x7
  double det = 1.0;
  for (int col = 0; col < 7; ++col) {
    int piv = col;
    for (int r = col + 1; r < 7; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0) return 0.0;
    if (piv != col) { a.row(piv).swap(a.row(col)); det = -det; }
    det *= a(col, col);
    for (int r = col + 1; r < 7; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f != 0.0) a.row(r).tail(7 - col) -= f * a.row(col).tail(7 - col);
    }
  }
  return det;
}

void dual_coeffs(const double* c4, double* c3) {
  const B3Tables& t = b3t();
  for (int k = 0; k < 35; ++k) c3[k] = t.dual_sign[k] * c4[t.dual_src[k]];
}

}  // namespace

EMat7 bilinear_b3(const FormD& w) {
  if (w.grade() != 3) throw Error("bilinear_b3: grade-3 form expected");
  double c[35];
  for (int i = 0; i < 35; ++i) c[i] = w[i];
  EMat7 b;
  b_matrix3(c, b);
  return b;
}

PointwiseVol vol_density3(const double* c35) {
  EMat7 b;
  b_matrix3(c35, b);
  PointwiseVol out;
  out.det = det7(b);
  out.in_orbit = out.det > 0.0;
  out.vol = out.in_orbit ? std::pow(out.det, 1.0 / 9.0) : 0.0;
  return out;
}

PointwiseVol vol_density4(const double* c35) {
  double c3[35];
  dual_coeffs(c35, c3);
  EMat7 b;
  b_matrix3(c3, b);
  PointwiseVol out;
  out.det = det7(b);
  out.in_orbit = out.det > 0.0;
  out.vol = out.in_orbit ? std::pow(out.det, 1.0 / 12.0) : 0.0;
  return out;
}

PointwiseVol vol_density(const FormD& sigma) {
  double c[35];
  for (int i = 0; i < 35; ++i) c[i] = sigma[i];
  if (sigma.grade() == 3) return vol_density3(c);
  if (sigma.grade() == 4) return vol_density4(c);
  throw Error("vol_density: grade 3 or 4 expected");
}

G2Structure classify_and_metric_3(const FormD& phi, double degeneracy_tol) {
  if (phi.grade() != 3) throw Error("classify_and_metric_3: grade-3 form expected");
  G2Structure S;
  S.threeform = phi;
  const EMat7 b = bilinear_b3(phi);
  const double det = det7(b);
  if (std::abs(det) <= degeneracy_tol) {
    S.orbit = OrbitClass::Degenerate;
    S.note = "degenerate 3-form: det b is zero to tolerance";
    return S;
  }
  if (det < 0) {
    S.orbit = OrbitClass::Degenerate;
    S.note = "3-form outside the two model orbits (negative invariant)";
    return S;
  }
  const double s = std::pow(det, 1.0 / 9.0);
  Metric7 m = make_metric(b / s);
  if (m.riemannian()) S.orbit = OrbitClass::CompactG2;
  else if (m.split34()) S.orbit = OrbitClass::SplitG2;
  else {
    S.orbit = OrbitClass::Degenerate;
    S.note = "unexpected metric signature (" + std::to_string(m.signature.first) + "," +
             std::to_string(m.signature.second) + ")";
    return S;
  }
  S.metric = m;
  S.fourform = hodge_star(m, phi);
  return S;
}

std::optional<std::pair<Mat7<Rat>, Rat>> metric3_rational(const FormQ& phi) {
  // exact B via the generic exterior ops
  Mat7<Rat> b{};
  for (int i = 0; i < 7; ++i) {
    Vec7Q ei;
    ei[i] = Rat(1);
    const FormQ wi = interior(ei, phi);
    for (int j = i; j < 7; ++j) {
      Vec7Q ej;
      ej[j] = Rat(1);
      const FormQ top = wedge(wedge(wi, interior(ej, phi)), phi);
      b[i][j] = top[0] / Rat(6);
      b[j][i] = b[i][j];
    }
  }
  std::vector<std::vector<Rat>> bv(7, std::vector<Rat>(7));
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) bv[i][j] = b[i][j];
  const Rat det = rat_det(bv);
  if (det.num() <= 0) return std::nullopt;
  auto iroot9 = [](Rat::Int v) -> std::optional<Rat::Int> {
    const long long g = static_cast<long long>(std::llround(std::pow(static_cast<double>(v), 1.0 / 9.0)));
    for (long long c = std::max(1LL, g - 2); c <= g + 2; ++c) {
      __int128 p = 1;
      bool ovf = false;
      for (int k = 0; k < 9 && !ovf; ++k) ovf = __builtin_mul_overflow(p, (__int128)c, &p);
      if (!ovf && p == v) return c;
    }
    return std::nullopt;
  };
  const auto rn = iroot9(det.num());
  const auto rd = iroot9(det.den());
  if (!rn || !rd) return std::nullopt;
  const Rat s = Rat::make(*rn, *rd);
  Mat7<Rat> g{};
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) g[i][j] = b[i][j] / s;
  return std::make_pair(g, s);
}

G2Structure recover_from_4form_direct(const FormD& psi, double degeneracy_tol) {
  if (psi.grade() != 4) throw Error("recover_from_4form_direct: grade-4 form expected");
  G2Structure S;
  S.fourform = psi;
  double c4[35], c3[35];
  for (int i = 0; i < 35; ++i) c4[i] = psi[i];
  dual_coeffs(c4, c3);
  EMat7 bd;
  b_matrix3(c3, bd);
  const double det = det7(bd);
  if (std::abs(det) <= degeneracy_tol || det < 0) {
    S.orbit = OrbitClass::Degenerate;
    S.note = det < 0 ? "4-form outside the two model orbits (negative invariant)"
                     : "degenerate 4-form: dual invariant is zero to tolerance";
    S.threeform = FormD(3);
    return S;
  }
  const EMat7 ginv = bd / std::pow(det, 1.0 / 6.0);
  Metric7 m = make_metric(ginv.inverse());
  if (m.riemannian()) S.orbit = OrbitClass::CompactG2;
  else if (m.split34()) S.orbit = OrbitClass::SplitG2;
  else {
    S.orbit = OrbitClass::Degenerate;
    S.note = "unexpected metric signature from 4-form";
    S.threeform = FormD(3);
    return S;
  }
  S.metric = m;
  S.threeform = hodge_star(m, psi);
  return S;
}

G2Structure recover_structure(const FormD& sigma) {
  if (sigma.grade() == 3) return classify_and_metric_3(sigma);
  if (sigma.grade() == 4) return recover_from_4form_direct(sigma);
  throw Error("recover_structure: grade 3 or 4 expected");
}

namespace {

/// One application of the fixed-point map F(g) = metric(star_g psi).
G2Structure fp_map(const EMat7& g, const FormD& psi, int it, double residual) {
  const Metric7 mk = make_metric(g);
  if (mk.signature.first + mk.signature.second < 7)
    throw NonConvergenceError("metric_from_4form: degenerate iterate at iteration " +
                              std::to_string(it), residual);
  const G2Structure Sk = classify_and_metric_3(hodge_star(mk, psi));
  if (!Sk.ok())
    throw NonConvergenceError("metric_from_4form: iterate left the stable orbits (" + Sk.note +
                              ") at iteration " + std::to_string(it), residual);
  return Sk;
}

}  // namespace

// The plain Picard sweep g <- F(g) is unstable: at the model fixed point the
// differential of F has eigenvalue 2 on the 27 traceless directions (and -1/3
// on the conformal one), so only conformal rescalings converge.  The same
// fixed-point equation g = F(g) is therefore driven by a Newton step on
// F(g) - g, keeping the Euclidean seed, the residual contract and the
// iteration cap.
FixedPointResult metric_from_4form(const FormD& psi, const EMat7* seed, double tol, int max_iters) {
  if (psi.grade() != 4) throw Error("metric_from_4form: grade-4 form expected");
  EMat7 g = seed ? *seed : EMat7::Identity();
  double residual = 0;
  for (int it = 1; it <= max_iters; ++it) {
    const G2Structure Sk = fp_map(g, psi, it, residual);
    const EMat7 Fg = Sk.metric->g;
    residual = (Fg - g).cwiseAbs().maxCoeff();
    if (residual <= tol) {
      FixedPointResult r;
      r.structure = fp_map(Fg, psi, it, residual);
      r.structure.fourform = psi;
      r.iterations = it;
      r.residual = residual;
      return r;
    }
    // Newton step on G(g) = F(g) - g over the 28 symmetric coordinates
    const double h = std::max(1e-7, 1e-7 * g.cwiseAbs().maxCoeff());
    Eigen::MatrixXd J(28, 28);
    std::vector<std::pair<int, int>> ij;
    for (int a = 0; a < 7; ++a)
      for (int b = a; b < 7; ++b) ij.push_back({a, b});
    for (int col = 0; col < 28; ++col) {
      EMat7 gp = g, gm = g;
      gp(ij[col].first, ij[col].second) += h;
      gp(ij[col].second, ij[col].first) = gp(ij[col].first, ij[col].second);
      gm(ij[col].first, ij[col].second) -= h;
      gm(ij[col].second, ij[col].first) = gm(ij[col].first, ij[col].second);
      const EMat7 d = (fp_map(gp, psi, it, residual).metric->g - gp -
                       (fp_map(gm, psi, it, residual).metric->g - gm)) /
                      (2 * h);
      for (int row = 0; row < 28; ++row)
        J(row, col) = d(ij[row].first, ij[row].second);
    }
    Eigen::VectorXd rhs(28);
    const EMat7 G = Fg - g;
    for (int row = 0; row < 28; ++row) rhs(row) = -G(ij[row].first, ij[row].second);
    const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(rhs);
    for (int k = 0; k < 28; ++k) {
      g(ij[k].first, ij[k].second) += delta(k);
      g(ij[k].second, ij[k].first) = g(ij[k].first, ij[k].second);
    }
  }
  throw NonConvergenceError("metric_from_4form: no convergence within " +
                            std::to_string(max_iters) + " iterations (last residual " +
                            std::to_string(residual) + ")", residual);
}

CartanInvolution cartan_check(const G2Structure& S, const EMat7& C, double tol) {
  if (S.orbit != OrbitClass::SplitG2 || !S.metric)
    throw Error("cartan_check: a split-G2 structure is required");
  if ((C * C - EMat7::Identity()).cwiseAbs().maxCoeff() > tol)
    throw Error("cartan_check: map is not an involution");
  const FormD pulled = pullback(to_mat7(C), S.threeform);
  double diff = 0, scale = 0;
  for (int i = 0; i < 35; ++i) {
    diff = std::max(diff, std::abs(pulled[i] - S.threeform[i]));
    scale = std::max(scale, std::abs(S.threeform[i]));
  }
  if (diff > tol * std::max(1.0, scale))
    throw Error("cartan_check: not an automorphism of the structure");
  const EMat7 h = 0.5 * (S.metric->g * C + (S.metric->g * C).transpose());
  if ((S.metric->g * C - h).cwiseAbs().maxCoeff() > tol * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw Error("cartan_check: g(.,C.) is not symmetric");
  Eigen::SelfAdjointEigenSolver<EMat7> es(h);
  if (es.eigenvalues().minCoeff() <= 0)
    throw Error("cartan_check: not a Cartan involution (g(.,C.) is not positive definite)");
  return {C, make_metric(h)};
}

FormD gl_action(const EMat7& X, const FormD& a) {
  const int p = a.grade();
  const GradeTable& t = grade_table(p);
  FormD out(p);
  for (int ipos = 0; ipos < a.size(); ++ipos) {
    const uint8_t m = t.masks[ipos];
    for (int axis = 1; axis <= 7; ++axis) {
      if (!((m >> (axis - 1)) & 1u)) continue;
      const uint8_t rest = static_cast<uint8_t>(m & ~(1u << (axis - 1)));
      const int s_rm = removal_sign(m, axis);
      for (int rep = 1; rep <= 7; ++rep) {
        if ((rest >> (rep - 1)) & 1u) continue;  // repeated axis kills the term
        const double x = X(rep - 1, axis - 1);
        if (x == 0.0) continue;
        const uint8_t mj = static_cast<uint8_t>(rest | (1u << (rep - 1)));
        const int s_ins = removal_sign(mj, rep);
        out[ipos] += s_rm * s_ins * x * a.coeff(MultiIndex(mj));
      }
    }
  }
  return out;
}

Eigen::MatrixXd orbit_differential(const FormD& phi) {
  const int n = phi.size();
  Eigen::MatrixXd D(n, 49);
  for (int aa = 0; aa < 7; ++aa) {
    for (int bb = 0; bb < 7; ++bb) {
      EMat7 E = EMat7::Zero();
      E(aa, bb) = 1.0;
      const FormD col = gl_action(E, phi);
      for (int i = 0; i < n; ++i) D(i, 7 * aa + bb) = col[i];
    }
  }
  return D;
}

int orbit_differential_rank_exact(const FormQ& phi) {
  const FormD pd = to_double(phi);
  const Eigen::MatrixXd D = orbit_differential(pd);
  // entries are small integers for integer input forms; recover them exactly
  std::vector<std::vector<Rat>> m(pd.size(), std::vector<Rat>(49));
  for (int i = 0; i < pd.size(); ++i)
    for (int j = 0; j < 49; ++j) m[i][j] = Rat(static_cast<long long>(std::llround(D(i, j))));
  return rat_rank(std::move(m));
}

std::vector<EMat7> stabilizer_algebra(const FormD& phi, double tol) {
  const Eigen::MatrixXd D = orbit_differential(phi);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<EMat7> basis;
  const double cutoff = tol * sv(0);
  for (int k = 0; k < 49; ++k) {
    if (k < sv.size() && sv(k) > cutoff) continue;
    const Eigen::VectorXd v = svd.matrixV().col(k);
    EMat7 X;
    for (int aa = 0; aa < 7; ++aa)
      for (int bb = 0; bb < 7; ++bb) X(aa, bb) = v(7 * aa + bb);
    basis.push_back(X);
  }
  return basis;
}

EMat7 mat_exp(const EMat7& X) {
  const double nrm = X.cwiseAbs().maxCoeff() * 7;
  int squarings = 0;
  double scale = 1.0;
  while (nrm * scale > 0.5) { scale *= 0.5; ++squarings; }
  const EMat7 Y = X * scale;
  EMat7 term = EMat7::Identity(), sum = EMat7::Identity();
  for (int k = 1; k <= 18; ++k) {
    term = term * Y / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

EMat7 sample_structure_automorphism(const FormD& phi, uint64_t seed, double scale) {
  static thread_local std::vector<EMat7> cache;
  static thread_local double cache_tag = 0;
  double tag = 0;
  for (int i = 0; i < phi.size(); ++i) tag += (i + 1) * phi[i];
  if (cache.empty() || cache_tag != tag) {
    cache = stabilizer_algebra(phi);
    cache_tag = tag;
  }
  Philox rng(seed);
  EMat7 X = EMat7::Zero();
  for (size_t i = 0; i < cache.size(); ++i) {
    X += rng.normal2(i)[0] * cache[i];
  }
  const double n = X.cwiseAbs().maxCoeff();
  if (n > 0) X *= scale / n;
  return mat_exp(X);
}

}  // namespace g2f
