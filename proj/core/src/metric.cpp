#include "g2forms/metric.hpp"

#include <cmath>
#include <stdexcept>

namespace g2f {

std::pair<int, int> signature_of(const EMat7& g, double tol) {
  Eigen::SelfAdjointEigenSolver<EMat7> es(0.5 * (g + g.transpose()));
  int pos = 0, neg = 0;
  for (int i = 0; i < 7; ++i) {
    if (es.eigenvalues()[i] > tol) ++pos;
    else if (es.eigenvalues()[i] < -tol) ++neg;
  }
  return {pos, neg};
}

Metric7 make_metric(const EMat7& g) {
  Metric7 m;
  m.g = 0.5 * (g + g.transpose());
  m.signature = signature_of(m.g);
  m.voldensity = std::sqrt(std::abs(m.g.determinant()));
  return m;
}

namespace {

double minor_det(const EMat7& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int n = static_cast<int>(rows.size());
  double s[7][7];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s[i][j] = a(rows[i], cols[j]);
  switch (n) {
    case 1: return s[0][0];
    case 2: return s[0][0] * s[1][1] - s[0][1] * s[1][0];
    case 3:
      return s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) -
             s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0]) +
             s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
    case 4: {
      const double m01 = s[2][0] * s[3][1] - s[2][1] * s[3][0];
      const double m02 = s[2][0] * s[3][2] - s[2][2] * s[3][0];
      const double m03 = s[2][0] * s[3][3] - s[2][3] * s[3][0];
      const double m12 = s[2][1] * s[3][2] - s[2][2] * s[3][1];
      const double m13 = s[2][1] * s[3][3] - s[2][3] * s[3][1];
      const double m23 = s[2][2] * s[3][3] - s[2][3] * s[3][2];
      return s[0][0] * (s[1][1] * m23 - s[1][2] * m13 + s[1][3] * m12) -
             s[0][1] * (s[1][0] * m23 - s[1][2] * m03 + s[1][3] * m02) +
             s[0][2] * (s[1][0] * m13 - s[1][1] * m03 + s[1][3] * m01) -
             s[0][3] * (s[1][0] * m12 - s[1][1] * m02 + s[1][2] * m01);
    }
    default: {
      // pivoted elimination in place for n = 5..7
      double det = 1.0;
      for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
          if (std::abs(s[r][col]) > std::abs(s[piv][col])) piv = r;
        if (s[piv][col] == 0.0) return 0.0;
        if (piv != col) {
          for (int j = 0; j < n; ++j) std::swap(s[piv][j], s[col][j]);
          det = -det;
        }
        det *= s[col][col];
        for (int r = col + 1; r < n; ++r) {
          const double f = s[r][col] / s[col][col];
          if (f != 0.0)
            for (int j = col; j < n; ++j) s[r][j] -= f * s[col][j];
        }
      }
      return det;
    }
  }
}

std::vector<int> axes_of(uint8_t mask) {
  std::vector<int> v;
  for (int b = 0; b < 7; ++b)
    if ((mask >> b) & 1u) v.push_back(b);
  return v;
}

}  // namespace

Eigen::MatrixXd lambda_gram(const EMat7& ginv, int p) {
  const int n = binom7(p);
  const GradeTable& t = grade_table(p);
  Eigen::MatrixXd G(n, n);
  if (p == 0) {
    G(0, 0) = 1.0;
    return G;
  }
  for (int i = 0; i < n; ++i) {
    const auto ri = axes_of(t.masks[i]);
    for (int j = i; j < n; ++j) {
      const double d = minor_det(ginv, ri, axes_of(t.masks[j]));
      G(i, j) = d;
      G(j, i) = d;
    }
  }
  return G;
}

double form_inner(const Metric7& m, const FormD& a, const FormD& b) {
  if (a.grade() != b.grade()) throw std::invalid_argument("form_inner: grade mismatch");
  const EMat7 ginv = m.g.inverse();
  const Eigen::MatrixXd G = lambda_gram(ginv, a.grade());
  double acc = 0;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < b.size(); ++j) acc += a[i] * G(i, j) * b[j];
  }
  return acc;
}

FormD hodge_star(const Metric7& m, const FormD& a) {
  if (m.signature.first + m.signature.second < 7)
    throw std::domain_error("hodge_star: degenerate metric");
  const int p = a.grade();
  const EMat7 ginv = m.g.inverse();
  const Eigen::MatrixXd G = lambda_gram(ginv, p);
  const GradeTable& t = grade_table(p);
  FormD out(7 - p);
  // (star a)_{K^c} = sign(K, K^c) * voldensity * (G a)_K
  for (int k = 0; k < binom7(p); ++k) {
    double raised = 0;
    for (int j = 0; j < binom7(p); ++j) raised += G(k, j) * a[j];
    if (raised == 0.0) continue;
    const uint8_t mk = t.masks[k];
    const int s = complement_sign(mk);
    out[pos_of_mask(static_cast<uint8_t>(~mk & 0x7f))] = s * m.voldensity * raised;
  }
  return out;
}

// --- exact rational path ---------------------------------------------------

namespace {

Rat rat_minor(const Mat7<Rat>& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int n = static_cast<int>(rows.size());
  if (n == 1) return a[rows[0]][cols[0]];
  Rat acc(0);
  std::vector<int> subrows(rows.begin() + 1, rows.end());
  for (int k = 0; k < n; ++k) {
    if (a[rows[0]][cols[k]] == Rat(0)) continue;
    std::vector<int> subcols;
    for (int l = 0; l < n; ++l)
      if (l != k) subcols.push_back(cols[l]);
    Rat term = a[rows[0]][cols[k]] * rat_minor(a, subrows, subcols);
    acc += (k % 2 == 0) ? term : -term;
  }
  return acc;
}

std::optional<Rat> rat_sqrt(const Rat& x) {
  if (x.num() < 0) return std::nullopt;
  auto isqrt = [](long long v) -> std::optional<long long> {
    if (v < 0) return std::nullopt;
    long long r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(v))));
    for (long long c = std::max(0LL, r - 2); c <= r + 2; ++c)
      if (c * c == v) return c;
    return std::nullopt;
  };
  auto n = isqrt(x.num());
  auto d = isqrt(x.den());
  if (!n || !d) return std::nullopt;
  return Rat(*n, *d);
}

}  // namespace

FormQ hodge_star_q(const Mat7<Rat>& g, const FormQ& a) {
  const Mat7<Rat> ginv = rat_inverse7(g);
  std::vector<std::vector<Rat>> gv(7, std::vector<Rat>(7));
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) gv[i][j] = g[i][j];
  const Rat detg = rat_det(gv);
  const auto vol = rat_sqrt(abs(detg));
  if (!vol) throw std::domain_error("hodge_star_q: |det g| is not a rational square");

  const int p = a.grade();
  const GradeTable& t = grade_table(p);
  FormQ out(7 - p);
  for (int k = 0; k < binom7(p); ++k) {
    const auto K = axes_of(t.masks[k]);
    Rat raised(0);
    for (int j = 0; j < binom7(p); ++j) {
      if (a[j] == Rat(0)) continue;
      raised += (p == 0 ? a[j] : rat_minor(ginv, K, axes_of(t.masks[j])) * a[j]);
    }
    if (raised == Rat(0)) continue;
    const uint8_t mk = t.masks[k];
    const int s = complement_sign(mk);
    Rat val = *vol * raised;
    out[pos_of_mask(static_cast<uint8_t>(~mk & 0x7f))] = (s > 0) ? val : -val;
  }
  return out;
}

std::vector<std::vector<Rat>> rat_inverse(const std::vector<std::vector<Rat>>& m) {
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<Rat>> a = m;
  std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) inv[i][i] = Rat(1);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!(a[r][col] == Rat(0))) { piv = r; break; }
    if (piv < 0) throw std::domain_error("rat_inverse: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const Rat d = a[col][col];
    for (int j = 0; j < n; ++j) { a[col][j] /= d; inv[col][j] /= d; }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == Rat(0)) continue;
      const Rat f = a[r][col];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Rat rat_det(std::vector<std::vector<Rat>> a) {
  const int n = static_cast<int>(a.size());
  Rat det(1);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!(a[r][col] == Rat(0))) { piv = r; break; }
    if (piv < 0) return Rat(0);
    if (piv != col) { std::swap(a[piv], a[col]); det = -det; }
    det *= a[col][col];
    for (int r = col + 1; r < n; ++r) {
      if (a[r][col] == Rat(0)) continue;
      const Rat f = a[r][col] / a[col][col];
      for (int j = col; j < n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return det;
}

int rat_rank(std::vector<std::vector<Rat>> a) {
  if (a.empty()) return 0;
  const int nr = static_cast<int>(a.size());
  const int nc = static_cast<int>(a[0].size());
  int rank = 0;
  for (int col = 0; col < nc && rank < nr; ++col) {
    int piv = -1;
    for (int r = rank; r < nr; ++r)
      if (!(a[r][col] == Rat(0))) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    for (int r = rank + 1; r < nr; ++r) {
      if (a[r][col] == Rat(0)) continue;
      const Rat f = a[r][col] / a[rank][col];
      for (int j = col; j < nc; ++j) a[r][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

Mat7<Rat> rat_inverse7(const Mat7<Rat>& m) {
  std::vector<std::vector<Rat>> v(7, std::vector<Rat>(7));
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) v[i][j] = m[i][j];
  const auto inv = rat_inverse(v);
  Mat7<Rat> out;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) out[i][j] = inv[i][j];
  return out;
}

}  // namespace g2f
