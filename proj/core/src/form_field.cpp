#include "g2forms/form_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace g2f {

double RadialProfile::operator()(double r) const {
  double v = 1.0;
  if (rpow != 0) v = std::pow(r, rpow);
  if (!factors.empty()) {
    const auto j = bump->jet3(r);
    for (const auto& [d, m] : factors) {
      if (d > 2) throw Error("RadialProfile: derivatives beyond f'' are not evaluable");
      for (int k = 0; k < m; ++k) v *= j[d];
    }
  }
  return v;
}

std::vector<std::pair<RadialProfile, double>> RadialProfile::derivative() const {
  std::vector<std::pair<RadialProfile, double>> out;
  if (rpow != 0) {
    RadialProfile p = *this;
    p.rpow -= 1;
    out.push_back({p, static_cast<double>(rpow)});
  }
  for (size_t i = 0; i < factors.size(); ++i) {
    RadialProfile p = *this;
    auto& [d, m] = p.factors[i];
    if (m == 1) {
      p.factors.erase(p.factors.begin() + static_cast<long>(i));
    } else {
      m -= 1;
    }
    const int dd = factors[i].first + 1;
    bool merged = false;
    for (auto& [fd, fm] : p.factors)
      if (fd == dd) { fm += 1; merged = true; break; }
    if (!merged) p.factors.push_back({dd, 1});
    std::sort(p.factors.begin(), p.factors.end());
    out.push_back({p, static_cast<double>(factors[i].second)});
  }
  return out;
}

RadialProfile RadialProfile::times(const RadialProfile& o) const {
  RadialProfile p;
  if (bump && o.bump && !bump->same_as(*o.bump))
    throw Error("RadialProfile: cannot multiply profiles over different bumps");
  p.bump = bump ? bump : o.bump;
  p.rpow = rpow + o.rpow;
  p.factors = factors;
  for (const auto& f : o.factors) {
    bool merged = false;
    for (auto& g : p.factors)
      if (g.first == f.first) { g.second += f.second; merged = true; break; }
    if (!merged) p.factors.push_back(f);
  }
  std::sort(p.factors.begin(), p.factors.end());
  return p;
}

std::string RadialProfile::key() const {
  std::ostringstream os;
  os << (bump ? bump->eta() : -1.0) << '|' << (bump ? bump->plateau_a() : 0) << '|'
     << (bump ? bump->plateau_b() : 0) << "|r" << rpow;
  for (const auto& [d, m] : factors) os << "|f" << d << '^' << m;
  return os.str();
}

FormField FormField::constant(const FormD& w) {
  FormField F;
  F.grade_ = w.grade();
  F.structured_ = true;
  F.terms_.push_back({RadialProfile::constant(), Monomial{}, w});
  return F;
}

FormField FormField::structured(int grade, std::vector<StructTerm> terms, EVec7 center) {
  FormField F;
  F.grade_ = grade;
  F.center_ = std::move(center);
  F.structured_ = true;
  F.terms_ = std::move(terms);
  for (const auto& t : F.terms_)
    if (t.form.grade() != grade) throw Error("FormField: term grade mismatch");
  return F;
}

FormField FormField::blackbox(int grade, std::function<FormD(const EVec7&)> fn,
                              std::optional<double> support_radius) {
  FormField F;
  F.grade_ = grade;
  F.structured_ = false;
  F.eval_ = std::move(fn);
  F.support_radius_ = support_radius;
  return F;
}

FormD FormField::operator()(const EVec7& x) const {
  if (!structured_) {
    FormD v = eval_(x);
    if (support_radius_ && (x - center_).norm() > *support_radius_) return FormD(grade_);
    return v;
  }
  FormD out(grade_);
  const EVec7 y = x - center_;
  const double r = y.norm();
  for (const auto& t : terms_) {
    double s = t.prof(r);
    if (s == 0.0) continue;
    for (int i = 0; i < 7; ++i)
      for (int k = 0; k < t.mono[i]; ++k) s *= y[i];
    if (s == 0.0) continue;
    for (int c = 0; c < out.size(); ++c) out[c] += s * t.form[c];
  }
  return out;
}

FormField FormField::operator+(const FormField& o) const {
  if (grade_ != o.grade_) throw Error("FormField: grade mismatch in +");
  if (!structured_ || !o.structured_) {
    auto a = *this;
    auto b = o;
    return blackbox(grade_, [a, b](const EVec7& x) { return a(x) + b(x); });
  }
  if ((center_ - o.center_).norm() != 0.0 &&
      !(terms_.empty() || o.terms_.empty() ||
        std::all_of(terms_.begin(), terms_.end(),
                    [](const StructTerm& t) { return t.prof.is_constant() && mono_degree(t.mono) == 0; }) ||
        std::all_of(o.terms_.begin(), o.terms_.end(),
                    [](const StructTerm& t) { return t.prof.is_constant() && mono_degree(t.mono) == 0; })))
    throw Error("FormField: cannot add structured fields with different centers");
  FormField F = *this;
  if (std::all_of(terms_.begin(), terms_.end(),
                  [](const StructTerm& t) { return t.prof.is_constant() && mono_degree(t.mono) == 0; }))
    F.center_ = o.center_;
  for (const auto& t : o.terms_) F.terms_.push_back(t);
  F.support_radius_.reset();
  if (support_radius_ && o.support_radius_)
    F.support_radius_ = std::max(*support_radius_, *o.support_radius_);
  F.collect();
  return F;
}

FormField FormField::operator*(double s) const {
  FormField F = *this;
  if (structured_) {
    for (auto& t : F.terms_) t.form *= s;
  } else {
    auto base = *this;
    F = blackbox(grade_, [base, s](const EVec7& x) {
      FormD v = base(x);
      v *= s;
      return v;
    });
  }
  return F;
}

void FormField::collect(double drop_tol) {
  if (!structured_) return;
  std::map<std::string, StructTerm> merged;
  for (const auto& t : terms_) {
    std::ostringstream os;
    os << t.prof.key() << '#';
    for (int v : t.mono) os << v << ',';
    auto it = merged.find(os.str());
    if (it == merged.end()) merged.emplace(os.str(), t);
    else it->second.form += t.form;
  }
  terms_.clear();
  for (auto& [k, t] : merged) {
    bool zero = true;
    for (int i = 0; i < t.form.size() && zero; ++i)
      if (std::abs(t.form[i]) > drop_tol) zero = false;
    if (!zero) terms_.push_back(std::move(t));
  }
}

FormField exterior_derivative(const FormField& F, std::optional<double> fd_step) {
  if (!F.has_structured()) {
    if (!fd_step)
      throw Error("exterior_derivative: black-box field needs an explicit finite-difference step");
    const double h = *fd_step;
    auto base = F;
    const int p = F.grade();
    auto fn = [base, h, p](const EVec7& x) {
      FormD out(p + 1);
      for (int i = 0; i < 7; ++i) {
        EVec7 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        FormD d = base(xp) - base(xm);
        d *= 1.0 / (2.0 * h);
        FormD dxi(1);
        dxi.set(MultiIndex({i + 1}), 1.0);
        out += wedge(dxi, d);
      }
      return out;
    };
    FormField out = FormField::blackbox(p + 1, fn, F.support_radius());
    return out;
  }
  const int p = F.grade();
  std::vector<StructTerm> terms;
  for (const auto& t : F.terms()) {
    // radial part: prof'(r) dr ^ omega = prof' * (x_i/r) dx^i ^ omega
    const auto dprof = t.prof.derivative();
    for (int i = 0; i < 7; ++i) {
      FormD dxi(1);
      dxi.set(MultiIndex({i + 1}), 1.0);
      const FormD w = wedge(dxi, t.form);
      if (w.is_zero()) continue;
      for (const auto& [dp, scale] : dprof) {
        StructTerm nt;
        nt.prof = dp.shifted_rpow(-1);
        nt.mono = t.mono;
        nt.mono[i] += 1;
        nt.form = w;
        nt.form *= scale;
        terms.push_back(std::move(nt));
      }
      if (t.mono[i] > 0) {
        StructTerm nt;
        nt.prof = t.prof;
        nt.mono = t.mono;
        nt.mono[i] -= 1;
        nt.form = w;
        nt.form *= static_cast<double>(t.mono[i]);
        terms.push_back(std::move(nt));
      }
    }
  }
  FormField out = FormField::structured(p + 1, std::move(terms), F.center());
  if (F.support_radius()) out.set_support_radius(*F.support_radius());
  out.collect();
  auto prim = std::make_shared<FormField>(F);
  out.set_primitive(prim);
  return out;
}

FormField wedge_const(const FormField& F, const FormD& c) {
  if (!F.has_structured()) {
    auto base = F;
    return FormField::blackbox(F.grade() + c.grade(),
                               [base, c](const EVec7& x) { return wedge(base(x), c); },
                               F.support_radius());
  }
  std::vector<StructTerm> terms;
  for (const auto& t : F.terms()) {
    StructTerm nt;
    nt.prof = t.prof;
    nt.mono = t.mono;
    nt.form = wedge(t.form, c);
    if (!nt.form.is_zero()) terms.push_back(std::move(nt));
  }
  FormField out = FormField::structured(F.grade() + c.grade(), std::move(terms), F.center());
  if (F.support_radius()) out.set_support_radius(*F.support_radius());
  return out;
}

FormField apply_matrix(const Eigen::MatrixXd& M, const FormField& F, int out_grade) {
  if (!F.has_structured()) {
    auto base = F;
    return FormField::blackbox(out_grade,
                               [base, M, out_grade](const EVec7& x) {
                                 const FormD v = base(x);
                                 FormD out(out_grade);
                                 for (int i = 0; i < out.size(); ++i) {
                                   double acc = 0;
                                   for (int j = 0; j < v.size(); ++j) acc += M(i, j) * v[j];
                                   out[i] = acc;
                                 }
                                 return out;
                               },
                               F.support_radius());
  }
  std::vector<StructTerm> terms;
  for (const auto& t : F.terms()) {
    StructTerm nt;
    nt.prof = t.prof;
    nt.mono = t.mono;
    nt.form = FormD(out_grade);
    for (int i = 0; i < nt.form.size(); ++i) {
      double acc = 0;
      for (int j = 0; j < t.form.size(); ++j) acc += M(i, j) * t.form[j];
      nt.form[i] = acc;
    }
    if (!nt.form.is_zero()) terms.push_back(std::move(nt));
  }
  FormField out = FormField::structured(out_grade, std::move(terms), F.center());
  if (F.support_radius()) out.set_support_radius(*F.support_radius());
  return out;
}

StructuredScalar structured_inner(const FormField& F1, const FormField& F2,
                                  const Eigen::MatrixXd& gram) {
  if (!F1.has_structured() || !F2.has_structured())
    throw Error("structured_inner: both fields must be structured");
  if ((F1.center() - F2.center()).norm() != 0.0)
    throw Error("structured_inner: fields must share a center");
  StructuredScalar out;
  for (const auto& a : F1.terms()) {
    for (const auto& b : F2.terms()) {
      double g = 0;
      for (int i = 0; i < a.form.size(); ++i) {
        if (a.form[i] == 0.0) continue;
        for (int j = 0; j < b.form.size(); ++j) g += a.form[i] * gram(i, j) * b.form[j];
      }
      if (g == 0.0) continue;
      ScalarTerm st;
      st.prof = a.prof.times(b.prof);
      for (int i = 0; i < 7; ++i) st.mono[i] = a.mono[i] + b.mono[i];
      st.coeff = g;
      out.push_back(std::move(st));
    }
  }
  return out;
}

StructuredScalar structured_top_wedge(const FormField& F, const FormD& c) {
  if (!F.has_structured()) throw Error("structured_top_wedge: structured field required");
  StructuredScalar out;
  for (const auto& t : F.terms()) {
    const FormD top = wedge(t.form, c);
    if (top.grade() != 7) throw Error("structured_top_wedge: grades must sum to 7");
    if (top[0] == 0.0) continue;
    out.push_back({t.prof, t.mono, top[0]});
  }
  return out;
}

double eval_structured_scalar(const StructuredScalar& s, const EVec7& x, const EVec7& center) {
  const EVec7 y = x - center;
  const double r = y.norm();
  double acc = 0;
  for (const auto& t : s) {
    double v = t.prof(r) * t.coeff;
    if (v == 0.0) continue;
    for (int i = 0; i < 7; ++i)
      for (int k = 0; k < t.mono[i]; ++k) v *= y[i];
    acc += v;
  }
  return acc;
}

}  // namespace g2f
