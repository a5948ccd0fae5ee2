#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace g2f {

/// Exact rational scalar on __int128 with overflow-checked arithmetic.
/// Every value is kept normalized (gcd 1, positive denominator); overflow
/// throws instead of wrapping.
class Rat {
public:
  using Int = __int128;

  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }
  static Rat make(Int n, Int d) {
    Rat r;
    r.num_ = n;
    r.den_ = d;
    r.normalize();
    return r;
  }

  Int num() const { return num_; }
  Int den() const { return den_; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                checked_mul(a.den_, b.den_));
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(checked_sub(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                checked_mul(a.den_, b.den_));
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return make(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
  }
  Rat operator-() const { Rat r; r.num_ = -num_; r.den_ = den_; return r; }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
  }

  bool is_zero() const { return num_ == 0; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const {
    return den_ == 1 ? int_str(num_) : int_str(num_) + "/" + int_str(den_);
  }

  static std::string int_str(Int v);

private:
  static Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Rat: overflow");
    return r;
  }
  static Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Rat: overflow");
    return r;
  }
  static Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("Rat: overflow");
    return r;
  }

  void normalize() {
    if (den_ == 0) throw std::domain_error("Rat: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    Int a = num_ < 0 ? -num_ : num_, b = den_;
    while (b) { Int t = a % b; a = b; b = t; }
    if (a > 1) { num_ /= a; den_ /= a; }
  }

  Int num_, den_;
};

inline std::string Rat::int_str(Int v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  while (u) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  return neg ? "-" + s : s;
}

inline Rat abs(const Rat& a) { return a.num() < 0 ? -a : a; }

}  // namespace g2f
