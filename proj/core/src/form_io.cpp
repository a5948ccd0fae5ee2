#include "g2forms/form_io.hpp"

#include <json.hpp>
#include <sstream>

#include "g2forms/error.hpp"

namespace g2f {

namespace {

void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

long long parse_int(const std::string& s, size_t& i) {
  skip_ws(s, i);
  const size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == start) throw std::invalid_argument("parse_form: expected an integer at position " + std::to_string(start));
  return std::stoll(s.substr(start, i - start));
}

}  // namespace

FormQ parse_form(const std::string& text) {
  size_t i = 0;
  std::optional<FormQ> acc;
  bool any = false;
  while (true) {
    skip_ws(text, i);
    if (i >= text.size()) break;
    int sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
    }
    skip_ws(text, i);
    Rat coeff(sign);
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      const long long num = parse_int(text, i);
      long long den = 1;
      skip_ws(text, i);
      if (i < text.size() && text[i] == '/') {
        ++i;
        den = parse_int(text, i);
      }
      coeff = coeff * Rat(num, den);
      skip_ws(text, i);
      if (i < text.size() && text[i] == '*') {
        ++i;
        skip_ws(text, i);
      }
    }
    MultiIndex I;
    if (i + 2 < text.size() && text.compare(i, 2, "dx") == 0) {
      i += 2;
      skip_ws(text, i);
      if (i >= text.size() || text[i] != '[') throw std::invalid_argument("parse_form: expected '[' after dx");
      ++i;
      uint8_t mask = 0;
      while (true) {
        const long long axis = parse_int(text, i);
        if (axis < 1 || axis > 7) throw std::invalid_argument("parse_form: axis out of range 1..7");
        if (mask & (1u << (axis - 1))) throw std::invalid_argument("parse_form: repeated axis in dx[...]");
        mask |= static_cast<uint8_t>(1u << (axis - 1));
        skip_ws(text, i);
        if (i < text.size() && text[i] == ',') {
          ++i;
          continue;
        }
        if (i < text.size() && text[i] == ']') {
          ++i;
          break;
        }
        throw std::invalid_argument("parse_form: expected ',' or ']' in dx[...]");
      }
      I = MultiIndex(mask);
    }
    FormQ term(I.grade());
    term.set(I, coeff);
    if (!acc) {
      acc = term;
    } else {
      if (acc->grade() != term.grade())
        throw std::invalid_argument("parse_form: mixed grades in one literal");
      *acc += term;
    }
    any = true;
  }
  if (!any) throw std::invalid_argument("parse_form: empty literal");
  return *acc;
}

std::string form_str(const FormQ& f) {
  std::ostringstream os;
  bool first = true;
  const GradeTable& t = grade_table(f.grade());
  for (int i = 0; i < f.size(); ++i) {
    if (f[i].is_zero()) continue;
    const Rat c = f[i];
    if (first) {
      if (c.num() < 0) os << "-";
    } else {
      os << (c.num() < 0 ? " - " : " + ");
    }
    const Rat a = abs(c);
    if (!(a == Rat(1)) || f.grade() == 0) os << a.str() << ' ';
    if (f.grade() > 0) os << MultiIndex(t.masks[i]).str();
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::string form_str(const FormD& f, double drop_tol) {
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  const GradeTable& t = grade_table(f.grade());
  for (int i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) <= drop_tol) continue;
    const double c = f[i];
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    os << std::abs(c) << ' ';
    if (f.grade() > 0) os << MultiIndex(t.masks[i]).str();
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

void to_json(nlohmann::json& j, const FormD& f) {
  j = nlohmann::json::object();
  j["grade"] = f.grade();
  nlohmann::json coeffs = nlohmann::json::object();
  const GradeTable& t = grade_table(f.grade());
  for (int i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    std::string key = "[";
    bool first = true;
    for (int a : MultiIndex(t.masks[i]).axes()) {
      if (!first) key += ',';
      key += static_cast<char>('0' + a);
      first = false;
    }
    key += ']';
    coeffs[key] = f[i];
  }
  j["coeffs"] = std::move(coeffs);
}

void to_json(nlohmann::json& j, const Metric7& m) {
  j = nlohmann::json::object();
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 7; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < 7; ++k) row.push_back(m.g(i, k));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  j["signature"] = {m.signature.first, m.signature.second};
  j["voldensity"] = m.voldensity;
}

}  // namespace g2f
