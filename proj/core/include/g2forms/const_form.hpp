#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "g2forms/multi_index.hpp"
#include "g2forms/rational.hpp"

namespace g2f {

template <class T>
using Mat7 = std::array<std::array<T, 7>, 7>;

template <class T>
struct Vec7T {
  std::array<T, 7> c{};
  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }
};

/// Alternating p-form on R^7 with constant coefficients, one scalar per
/// increasing multi-index (lexicographic order).
template <class T>
class ConstForm {
public:
  ConstForm() : grade_(0), c_(1, T(0)) {}
  explicit ConstForm(int grade) : grade_(grade), c_(binom7(grade), T(0)) {
    if (grade < 0 || grade > 7) throw std::invalid_argument("ConstForm: grade out of range");
  }

  int grade() const { return grade_; }
  int size() const { return static_cast<int>(c_.size()); }

  T& operator[](int pos) { return c_[pos]; }
  const T& operator[](int pos) const { return c_[pos]; }

  T coeff(MultiIndex I) const {
    if (I.grade() != grade_) throw std::invalid_argument("ConstForm: index grade mismatch");
    return c_[pos_of_mask(I.mask())];
  }
  void set(MultiIndex I, T v) {
    if (I.grade() != grade_) throw std::invalid_argument("ConstForm: index grade mismatch");
    c_[pos_of_mask(I.mask())] = v;
  }

  bool is_zero() const {
    for (const T& v : c_)
      if (!(v == T(0))) return false;
    return true;
  }

  ConstForm& operator+=(const ConstForm& o) {
    check_same_grade(o);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  ConstForm& operator-=(const ConstForm& o) {
    check_same_grade(o);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  ConstForm& operator*=(const T& s) {
    for (T& v : c_) v *= s;
    return *this;
  }
  friend ConstForm operator+(ConstForm a, const ConstForm& b) { return a += b; }
  friend ConstForm operator-(ConstForm a, const ConstForm& b) { return a -= b; }
  friend ConstForm operator*(const T& s, ConstForm a) { return a *= s; }
  ConstForm operator-() const {
    ConstForm r(grade_);
    for (int i = 0; i < size(); ++i) r.c_[i] = -c_[i];
    return r;
  }
  friend bool operator==(const ConstForm& a, const ConstForm& b) {
    return a.grade_ == b.grade_ && a.c_ == b.c_;
  }

private:
  void check_same_grade(const ConstForm& o) const {
    if (grade_ != o.grade_) throw std::invalid_argument("ConstForm: grade mismatch");
  }
  int grade_;
  std::vector<T> c_;
};

using FormD = ConstForm<double>;
using FormQ = ConstForm<Rat>;
using Vec7 = Vec7T<double>;
using Vec7Q = Vec7T<Rat>;

/// a ^ b.  Grades summing past 7 clamp to the zero 7-form.
template <class T>
ConstForm<T> wedge(const ConstForm<T>& a, const ConstForm<T>& b) {
  const int p = a.grade(), q = b.grade();
  if (p + q > 7) return ConstForm<T>(7);
  const GradeTable& ta = grade_table(p);
  const GradeTable& tb = grade_table(q);
  ConstForm<T> out(p + q);
  for (int i = 0; i < binom7(p); ++i) {
    if (a[i] == T(0)) continue;
    for (int j = 0; j < binom7(q); ++j) {
      if (b[j] == T(0)) continue;
      const int s = merge_sign(ta.masks[i], tb.masks[j]);
      if (s == 0) continue;
      const int tgt = pos_of_mask(static_cast<uint8_t>(ta.masks[i] | tb.masks[j]));
      out[tgt] += (s > 0 ? a[i] * b[j] : -(a[i] * b[j]));
    }
  }
  return out;
}

/// v -| a, contraction in the first slot.
template <class T>
ConstForm<T> interior(const Vec7T<T>& v, const ConstForm<T>& a) {
  const int p = a.grade();
  if (p == 0) throw std::domain_error("interior: cannot contract a scalar");
  const GradeTable& ta = grade_table(p);
  ConstForm<T> out(p - 1);
  for (int i = 0; i < binom7(p); ++i) {
    if (a[i] == T(0)) continue;
    const uint8_t m = ta.masks[i];
    for (int axis = 1; axis <= kDim; ++axis) {
      if (!((m >> (axis - 1)) & 1u)) continue;
      if (v[axis - 1] == T(0)) continue;
      const int s = removal_sign(m, axis);
      const int tgt = pos_of_mask(static_cast<uint8_t>(m & ~(1u << (axis - 1))));
      const T term = v[axis - 1] * a[i];
      out[tgt] += (s > 0 ? term : -term);
    }
  }
  return out;
}

template <class T>
T subdet(const Mat7<T>& A, const std::vector<int>& rows, const std::vector<int>& cols);

/// Pullback A^* a, (A^*a)(u_1..u_p) = a(A u_1, .., A u_p).
template <class T>
ConstForm<T> pullback(const Mat7<T>& A, const ConstForm<T>& a) {
  const int p = a.grade();
  if (p == 0) return a;
  const GradeTable& t = grade_table(p);
  ConstForm<T> out(p);
  // (A^*a)_I = sum_J a_J det(A[J rows, I cols])
  for (int jpos = 0; jpos < binom7(p); ++jpos) {
    if (a[jpos] == T(0)) continue;
    std::vector<int> J;
    for (int ax = 1; ax <= kDim; ++ax)
      if ((t.masks[jpos] >> (ax - 1)) & 1u) J.push_back(ax - 1);
    for (int ipos = 0; ipos < binom7(p); ++ipos) {
      std::vector<int> I;
      for (int ax = 1; ax <= kDim; ++ax)
        if ((t.masks[ipos] >> (ax - 1)) & 1u) I.push_back(ax - 1);
      // det of the p x p submatrix A[J, I] by Laplace-free permutation sum for p<=3,
      // Gaussian elimination is awkward for exact T; use recursive expansion.
      T d = subdet<T>(A, J, I);
      if (!(d == T(0))) out[ipos] += a[jpos] * d;
    }
  }
  return out;
}

template <class T>
T subdet(const Mat7<T>& A, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) return T(1);
  if (n == 1) return A[rows[0]][cols[0]];
  T acc(0);
  std::vector<int> subrows(rows.begin() + 1, rows.end());
  for (int k = 0; k < n; ++k) {
    std::vector<int> subcols;
    subcols.reserve(n - 1);
    for (int l = 0; l < n; ++l)
      if (l != k) subcols.push_back(cols[l]);
    const T piv = A[rows[0]][cols[k]];
    if (piv == T(0)) continue;
    T minor = subdet<T>(A, subrows, subcols);
    T term = piv * minor;
    acc += (k % 2 == 0) ? term : -term;
  }
  return acc;
}

/// mu_lambda^* scaling pullback: dx^I picks up lambda^|I|.
template <class T>
ConstForm<T> scale_pullback(const T& lam, const ConstForm<T>& a) {
  ConstForm<T> out = a;
  T f(1);
  for (int k = 0; k < a.grade(); ++k) f *= lam;
  out *= f;
  return out;
}

/// Orientation "raise": p-form -> (7-p)-tuple of coefficients of the dual
/// polyvector, (a~)_K = sign(K, K^c) a_{K^c}.  Metric-free; used by the
/// degree-3 cofactor construction for 4-forms.
template <class T>
ConstForm<T> complement_dual(const ConstForm<T>& a) {
  const int p = a.grade();
  const GradeTable& tk = grade_table(7 - p);
  ConstForm<T> out(7 - p);
  for (int k = 0; k < binom7(7 - p); ++k) {
    const uint8_t mk = tk.masks[k];
    const uint8_t mc = static_cast<uint8_t>(~mk & 0x7f);
    const int s = complement_sign(mk);
    const T v = a[pos_of_mask(mc)];
    out[k] = (s > 0) ? v : -v;
  }
  return out;
}

inline FormD to_double(const FormQ& q) {
  FormD d(q.grade());
  for (int i = 0; i < q.size(); ++i) d[i] = q[i].to_double();
  return d;
}

inline FormD basis_form(std::initializer_list<int> axes) {
  MultiIndex I(axes);
  FormD f(I.grade());
  f.set(I, 1.0);
  return f;
}

inline FormQ basis_form_q(std::initializer_list<int> axes) {
  MultiIndex I(axes);
  FormQ f(I.grade());
  f.set(I, Rat(1));
  return f;
}

}  // namespace g2f
