#include "g2forms/typedecomp.hpp"

#include <algorithm>
#include <cmath>

#include "g2forms/standard_forms.hpp"

namespace g2f {

bool valid_type_pair(int grade, int label) {
  switch (grade) {
    case 2: return label == 7 || label == 14;
    case 3: return label == 1 || label == 7 || label == 27;
    case 4: return label == 1 || label == 7 || label == 27;
    case 5: return label == 7 || label == 14;
    default: return false;
  }
}

std::vector<int> type_labels(int grade) {
  switch (grade) {
    case 2: return {7, 14};
    case 3: return {1, 7, 27};
    case 4: return {1, 7, 27};
    case 5: return {7, 14};
    default: return {};
  }
}

namespace {

Eigen::MatrixXd interior_columns(const FormD& w) {
  // columns v_a = e_a -| w
  const int out_dim = binom7(w.grade() - 1);
  Eigen::MatrixXd M(out_dim, 7);
  for (int a = 0; a < 7; ++a) {
    Vec7 e;
    e[a] = 1.0;
    const FormD col = interior(e, w);
    for (int i = 0; i < out_dim; ++i) M(i, a) = col[i];
  }
  return M;
}

Eigen::MatrixXd pairing_projector(const Eigen::MatrixXd& M, const Eigen::MatrixXd& G) {
  // G-orthogonal projector onto the column span, via the (small) restricted Gram
  const Eigen::MatrixXd small = M.transpose() * G * M;
  return M * small.inverse() * M.transpose() * G;
}

}  // namespace

TypeProjections::TypeProjections(const G2Structure& S) : S_(S) {
  if (!S.ok()) throw Error("TypeProjections: degenerate structure");
  const EMat7 ginv = S.metric->g.inverse();
  for (int p = 2; p <= 5; ++p) gram_[p] = lambda_gram(ginv, p);
  const double vol = S.metric->voldensity;
  for (int p = 2; p <= 5; ++p) {
    // (star a)_{K^c} = sign(K, K^c) vol (G_p a)_K: one signed row per K
    const GradeTable& t = grade_table(p);
    Eigen::MatrixXd St = Eigen::MatrixXd::Zero(binom7(7 - p), binom7(p));
    for (int k = 0; k < binom7(p); ++k) {
      const uint8_t mk = t.masks[k];
      const int row = pos_of_mask(static_cast<uint8_t>(~mk & 0x7f));
      const double s = complement_sign(mk) * vol;
      for (int j = 0; j < binom7(p); ++j) St(row, j) = s * gram_[p](k, j);
    }
    star_[p] = St;
  }

  const FormD& phi = S.threeform;
  const FormD& psi = S.fourform;

  // Lambda^2 = 7 + 14
  {
    const Eigen::MatrixXd M = interior_columns(phi);
    const Eigen::MatrixXd p7 = pairing_projector(M, gram_[2]);
    proj_[{2, 7}] = p7;
    proj_[{2, 14}] = Eigen::MatrixXd::Identity(21, 21) - p7;
  }
  // Lambda^3 = 1 + 7 + 27
  {
    Eigen::VectorXd vphi(35);
    for (int i = 0; i < 35; ++i) vphi(i) = phi[i];
    const double n2 = vphi.dot(gram_[3] * vphi);
    const Eigen::MatrixXd p1 = vphi * (gram_[3] * vphi).transpose() / n2;
    const Eigen::MatrixXd N = interior_columns(psi);
    const Eigen::MatrixXd p7 = pairing_projector(N, gram_[3]);
    proj_[{3, 1}] = p1;
    proj_[{3, 7}] = p7;
    proj_[{3, 27}] = Eigen::MatrixXd::Identity(35, 35) - p1 - p7;
  }
  // Lambda^4 and Lambda^5 by star transport (star o star = id on every grade here)
  for (int label : type_labels(3)) proj_[{4, label}] = star_[3] * proj_[{3, label}] * star_[4];
  for (int label : type_labels(2)) proj_[{5, label}] = star_[2] * proj_[{2, label}] * star_[5];
}

const Eigen::MatrixXd& TypeProjections::matrix(int grade, int label) const {
  auto it = proj_.find({grade, label});
  if (it == proj_.end()) throw Error("TypeProjections: invalid (grade,label) pair " +
                                     std::to_string(grade) + "," + std::to_string(label));
  return it->second;
}

const Eigen::MatrixXd& TypeProjections::gram(int grade) const { return gram_.at(grade); }
const Eigen::MatrixXd& TypeProjections::star_matrix(int grade) const { return star_.at(grade); }

TypeComponent TypeProjections::project(int label, const FormD& a) const {
  if (!valid_type_pair(a.grade(), label))
    throw Error("project: invalid (grade,label) pair " + std::to_string(a.grade()) + "," +
                std::to_string(label));
  const Eigen::MatrixXd& P = matrix(a.grade(), label);
  TypeComponent c;
  c.grade = a.grade();
  c.label = label;
  c.form = FormD(a.grade());
  for (int i = 0; i < a.size(); ++i) {
    double acc = 0;
    for (int j = 0; j < a.size(); ++j) acc += P(i, j) * a[j];
    c.form[i] = acc;
  }
  return c;
}

TypeComponent project(const G2Structure& S, int label, const FormD& a) {
  return TypeProjections(S).project(label, a);
}

// --- exact rational projections at the standard structures ------------------

namespace {

std::vector<std::vector<Rat>> rat_gram(const Mat7<Rat>& g, int p) {
  const Mat7<Rat> ginv = rat_inverse7(g);
  const int n = binom7(p);
  const GradeTable& t = grade_table(p);
  std::vector<std::vector<Rat>> G(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) {
    std::vector<int> ri;
    for (int b = 0; b < 7; ++b)
      if ((t.masks[i] >> b) & 1u) ri.push_back(b);
    for (int j = 0; j < n; ++j) {
      std::vector<int> rj;
      for (int b = 0; b < 7; ++b)
        if ((t.masks[j] >> b) & 1u) rj.push_back(b);
      // p x p minor of ginv
      std::vector<std::vector<Rat>> sub(ri.size(), std::vector<Rat>(rj.size()));
      for (size_t a = 0; a < ri.size(); ++a)
        for (size_t b = 0; b < rj.size(); ++b) sub[a][b] = ginv[ri[a]][rj[b]];
      G[i][j] = rat_det(sub);
    }
  }
  return G;
}

std::vector<std::vector<Rat>> rat_matmul(const std::vector<std::vector<Rat>>& A,
                                         const std::vector<std::vector<Rat>>& B) {
  const size_t n = A.size(), k = B.size(), m = B[0].size();
  std::vector<std::vector<Rat>> C(n, std::vector<Rat>(m, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (A[i][l] == Rat(0)) continue;
      for (size_t j = 0; j < m; ++j) {
        if (B[l][j] == Rat(0)) continue;
        C[i][j] += A[i][l] * B[l][j];
      }
    }
  return C;
}

std::vector<std::vector<Rat>> rat_transpose(const std::vector<std::vector<Rat>>& A) {
  std::vector<std::vector<Rat>> T(A[0].size(), std::vector<Rat>(A.size()));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < A[0].size(); ++j) T[j][i] = A[i][j];
  return T;
}

std::vector<std::vector<Rat>> rat_interior_columns(const FormQ& w) {
  const int out_dim = binom7(w.grade() - 1);
  std::vector<std::vector<Rat>> M(out_dim, std::vector<Rat>(7, Rat(0)));
  for (int a = 0; a < 7; ++a) {
    Vec7Q e;
    e[a] = Rat(1);
    const FormQ col = interior(e, w);
    for (int i = 0; i < out_dim; ++i) M[i][a] = col[i];
  }
  return M;
}

std::vector<std::vector<Rat>> rat_pairing_projector(const std::vector<std::vector<Rat>>& M,
                                                    const std::vector<std::vector<Rat>>& G) {
  const auto Mt = rat_transpose(M);
  const auto small = rat_matmul(rat_matmul(Mt, G), M);
  const auto inv = rat_inverse(small);
  return rat_matmul(rat_matmul(M, inv), rat_matmul(Mt, G));
}

std::vector<std::vector<Rat>> rat_star_matrix(const Mat7<Rat>& g, int p) {
  std::vector<std::vector<Rat>> St(binom7(7 - p), std::vector<Rat>(binom7(p), Rat(0)));
  for (int j = 0; j < binom7(p); ++j) {
    FormQ e(p);
    e[j] = Rat(1);
    const FormQ se = hodge_star_q(g, e);
    for (int i = 0; i < se.size(); ++i) St[i][j] = se[i];
  }
  return St;
}

TypeProjectionsQ build_standard_q(bool split) {
  const Mat7<Rat> g = split ? split_metric_q() : euclidean_metric_q();
  const FormQ phi = split ? phi0_tilde_q() : phi0_q();
  const FormQ psi = split ? psi0_tilde_q() : psi0_q();
  TypeProjectionsQ P;
  const auto G2 = rat_gram(g, 2);
  const auto G3 = rat_gram(g, 3);
  // 2-forms
  {
    const auto M = rat_interior_columns(phi);
    const auto p7 = rat_pairing_projector(M, G2);
    std::vector<std::vector<Rat>> p14(21, std::vector<Rat>(21, Rat(0)));
    for (int i = 0; i < 21; ++i)
      for (int j = 0; j < 21; ++j) p14[i][j] = (i == j ? Rat(1) : Rat(0)) - p7[i][j];
    P.proj[{2, 7}] = p7;
    P.proj[{2, 14}] = p14;
  }
  // 3-forms
  {
    std::vector<std::vector<Rat>> vphi(35, std::vector<Rat>(1));
    for (int i = 0; i < 35; ++i) vphi[i][0] = phi[i];
    const auto Gphi = rat_matmul(G3, vphi);
    Rat n2(0);
    for (int i = 0; i < 35; ++i) n2 += phi[i] * Gphi[i][0];
    std::vector<std::vector<Rat>> p1(35, std::vector<Rat>(35));
    for (int i = 0; i < 35; ++i)
      for (int j = 0; j < 35; ++j) p1[i][j] = vphi[i][0] * Gphi[j][0] / n2;
    const auto N = rat_interior_columns(psi);
    const auto p7 = rat_pairing_projector(N, G3);
    std::vector<std::vector<Rat>> p27(35, std::vector<Rat>(35));
    for (int i = 0; i < 35; ++i)
      for (int j = 0; j < 35; ++j)
        p27[i][j] = (i == j ? Rat(1) : Rat(0)) - p1[i][j] - p7[i][j];
    P.proj[{3, 1}] = p1;
    P.proj[{3, 7}] = p7;
    P.proj[{3, 27}] = p27;
  }
  // star transport
  const auto S2 = rat_star_matrix(g, 2);
  const auto S3 = rat_star_matrix(g, 3);
  const auto S4 = rat_star_matrix(g, 4);
  const auto S5 = rat_star_matrix(g, 5);
  for (int label : type_labels(3)) P.proj[{4, label}] = rat_matmul(S3, rat_matmul(P.proj[{3, label}], S4));
  for (int label : type_labels(2)) P.proj[{5, label}] = rat_matmul(S2, rat_matmul(P.proj[{2, label}], S5));
  return P;
}

}  // namespace

const TypeProjectionsQ& standard_projections_q(bool split) {
  static const TypeProjectionsQ compact = build_standard_q(false);
  static const TypeProjectionsQ splitp = build_standard_q(true);
  return split ? splitp : compact;
}

namespace {

double sup_coeff(const FormD& a) {
  double m = 0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

/// residual of least-squares solving a = M v (coefficient 2-norm)
double rep_residual(const Eigen::MatrixXd& M, const FormD& a) {
  Eigen::VectorXd rhs(a.size());
  for (int i = 0; i < a.size(); ++i) rhs(i) = a[i];
  const Eigen::VectorXd v = M.colPivHouseholderQr().solve(rhs);
  return (M * v - rhs).cwiseAbs().maxCoeff();
}

}  // namespace

Certificate characterize(const G2Structure& S, const TypeComponent& c, double tol) {
  if (!S.ok()) throw Error("characterize: degenerate structure");
  Certificate cert;
  cert.tolerance = tol;
  const FormD& phi = S.threeform;
  const FormD& psi = S.fourform;
  const int p = c.grade;
  const int d = c.label;
  if (!valid_type_pair(p, d)) throw Error("characterize: invalid (grade,label) pair");

  FormD a = c.form;
  std::string via;
  // degrees 4,5 are characterized through the star isomorphism
  if (p >= 4) {
    a = hodge_star(*S.metric, a);
    via = "star-transported; ";
  }
  const double scale = std::max(1.0, sup_coeff(a));
  auto push = [&](const std::string& name, double r) { cert.residuals.push_back({name, r}); };

  const int q = a.grade();
  if (q == 2) {
    if (d == 7) {
      push("a = v -| phi (least squares)", rep_residual(interior_columns(phi), a));
      cert.detail = via + "{v -| phi | v in R^7}";
    } else {
      push("a ^ psi = 0", sup_coeff(wedge(a, psi)));
      cert.detail = via + "{alpha | alpha ^ psi = 0}";
    }
  } else {  // q == 3
    if (d == 1) {
      const double n2 = form_inner(*S.metric, phi, phi);
      const double t = form_inner(*S.metric, a, phi) / n2;
      FormD res = a;
      FormD tphi = phi;
      tphi *= t;
      res -= tphi;
      push("a - <a,phi>/<phi,phi> phi = 0", sup_coeff(res));
      cert.detail = via + "R · phi";
    } else if (d == 7) {
      push("a = v -| psi (least squares)", rep_residual(interior_columns(psi), a));
      cert.detail = via + "{v -| psi | v in R^7}";
    } else {
      push("a ^ phi = 0", sup_coeff(wedge(a, phi)));
      push("a ^ psi = 0", sup_coeff(wedge(a, psi)));
      cert.detail = via + "{a | a ^ phi = 0 and a ^ psi = 0}";
    }
  }
  cert.pass = true;
  for (const auto& [name, r] : cert.residuals)
    if (r > tol * scale) cert.pass = false;
  return cert;
}

}  // namespace g2f
