#include "g2forms/gauss_rules.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace g2f {

namespace {

/// Golub-Welsch from the monic three-term recurrence (diag a_k, offdiag sqrt(b_k)).
Rule1D golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mu0) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = a[i];
    if (i + 1 < n) {
      J(i, i + 1) = std::sqrt(b[i + 1]);
      J(i + 1, i) = J(i, i + 1);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

Rule1D gauss_legendre(int n) { return gauss_gegenbauer(n, 0.0); }

Rule1D gauss_gegenbauer(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss rule needs n >= 1");
  // Jacobi weight (1-x)^alpha (1+x)^alpha: monic recurrence, a_k = 0 by symmetry.
  std::vector<double> a(n, 0.0), b(n, 0.0);
  const double ab = 2 * alpha;
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
    b[k] = 4.0 * k * (k + alpha) * (k + alpha) * (k + ab) / den;
  }
  // mu0 = int_{-1}^{1} (1-x^2)^alpha dx = sqrt(pi) Gamma(alpha+1)/Gamma(alpha+3/2)
  const double mu0 = std::sqrt(M_PI) * std::tgamma(alpha + 1.0) / std::tgamma(alpha + 1.5);
  return golub_welsch(a, b, mu0);
}

Rule1D mapped(const Rule1D& r, double a, double b) {
  Rule1D out = r;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (size_t i = 0; i < r.x.size(); ++i) {
    out.x[i] = c + h * r.x[i];
    out.w[i] = h * r.w[i];
  }
  return out;
}

namespace {

// classic 7-15 Gauss-Kronrod pair on [-1,1]
constexpr double kronrod_x[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                                 0.741531185599394, 0.586087235467691, 0.405845151377397,
                                 0.207784955007898, 0.0};
constexpr double kronrod_w[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                                 0.140653259715525, 0.169004726639267, 0.190350578064785,
                                 0.204432940075298, 0.209482141084728};
constexpr double gauss_w[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                               0.417959183673469};

void gk15(const std::function<double(double)>& f, double a, double b, double& kron, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kronrod_x[i]);
    fv[14 - i] = f(c + h * kronrod_x[i]);
  }
  fv[7] = f(c);
  double resk = kronrod_w[7] * fv[7];
  double resg = gauss_w[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += kronrod_w[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += gauss_w[i / 2] * (fv[i] + fv[14 - i]);
  }
  kron = resk * h;
  err = std::abs((resk - resg) * h);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double tol_abs,
                    int depth, double& err_acc) {
  double kron, err;
  gk15(f, a, b, kron, err);
  // stop at the tolerance, the maximum depth, or the roundoff floor of the piece
  if (err <= tol_abs || depth <= 0 || err <= 64 * 1e-16 * std::abs(kron)) {
    err_acc += err;
    return kron;
  }
  const double m = 0.5 * (a + b);
  return adaptive_rec(f, a, m, tol_abs * 0.5, depth - 1, err_acc) +
         adaptive_rec(f, m, b, tol_abs * 0.5, depth - 1, err_acc);
}

}  // namespace

double adaptive_1d(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   double* err_estimate, int max_depth) {
  double kron, err;
  gk15(f, a, b, kron, err);
  const double scale = std::max(std::abs(kron), 1e-300);
  double err_acc = 0;
  const double v = adaptive_rec(f, a, b, rel_tol * scale, max_depth, err_acc);
  if (err_estimate) *err_estimate = err_acc;
  return v;
}

const SphereRule& sphere_rule(int exact_degree) {
  static std::map<int, SphereRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(exact_degree);
  if (it != cache.end()) return it->second;

  const int n = exact_degree / 2 + 1;     // polar points per angle
  const int naz = 2 * n;                  // azimuth points (> degree)
  // polar angle j = 1..5 carries weight sin^{6-j}: alpha = (5-j+... ) = (m-1)/2, m = 6-j
  std::array<Rule1D, 5> polar;
  for (int j = 0; j < 5; ++j) {
    const int m = 6 - (j + 1);  // sin power: 5,4,3,2,1
    polar[j] = gauss_gegenbauer(n, (m - 1) / 2.0);
  }
  SphereRule rule;
  rule.exact_degree = exact_degree;
  std::array<int, 5> idx{};
  const double waz = 2.0 * M_PI / naz;
  while (true) {
    double wpol = 1.0;
    std::array<double, 5> u, s;
    for (int j = 0; j < 5; ++j) {
      u[j] = polar[j].x[idx[j]];
      s[j] = std::sqrt(std::max(0.0, 1.0 - u[j] * u[j]));
      wpol *= polar[j].w[idx[j]];
    }
    for (int k = 0; k < naz; ++k) {
      const double az = (k + 0.5) * 2.0 * M_PI / naz;
      std::array<double, 7> x{};
      double sinprod = 1.0;
      for (int j = 0; j < 5; ++j) {
        x[j] = sinprod * u[j];
        sinprod *= s[j];
      }
      x[5] = sinprod * std::cos(az);
      x[6] = sinprod * std::sin(az);
      rule.x.push_back(x);
      rule.w.push_back(wpol * waz);
    }
    int j = 4;
    while (j >= 0 && ++idx[j] == n) idx[j--] = 0;
    if (j < 0) break;
  }
  return cache.emplace(exact_degree, std::move(rule)).first->second;
}

}  // namespace g2f
