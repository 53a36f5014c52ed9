#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace kpip {

struct arithmetic_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact rational on int64 with normalized sign and gcd-reduced terms.
// Intermediates go through __int128; anything that would leave int64
// range throws instead of wrapping.
class Rat {
 public:
  constexpr Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}
  Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    return from128(n, d);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    return from128(n, d);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw arithmetic_error("rational division by zero");
    return from128((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
  }
  Rat operator-() const { return Rat(-num_, den_); }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  static Rat parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(s));
    return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }

  // Nearest integer, halves away from zero for positives ("half-up").
  long long round_nearest() const {
    long long q = num_ / den_;
    long long r = num_ % den_;
    if (r < 0) { q -= 1; r += den_; }
    return 2 * r >= den_ ? q + 1 : q;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

 private:
  static Rat from128(__int128 n, __int128 d) {
    if (d == 0) throw arithmetic_error("zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw arithmetic_error("rational overflow");
    Rat r;
    r.num_ = (long long)n;
    r.den_ = (long long)d;
    return r;
  }
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b) { __int128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }
  void normalize() {
    if (den_ == 0) throw arithmetic_error("zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  long long num_;
  long long den_;
};

// Extended value: a finite rational or +infinity, with saturating addition.
// +infinity compares above every finite value.
class ExtVal {
 public:
  ExtVal() : inf_(false), r_() {}
  ExtVal(Rat r) : inf_(false), r_(r) {}
  ExtVal(long long n) : inf_(false), r_(n) {}
  static ExtVal infinity() { ExtVal v; v.inf_ = true; return v; }

  bool is_inf() const { return inf_; }
  const Rat& finite() const {
    if (inf_) throw arithmetic_error("infinite value has no finite part");
    return r_;
  }

  friend ExtVal operator+(const ExtVal& a, const ExtVal& b) {
    if (a.inf_ || b.inf_) return infinity();
    return ExtVal(a.r_ + b.r_);
  }
  friend bool operator==(const ExtVal& a, const ExtVal& b) {
    if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
    return a.r_ == b.r_;
  }
  friend bool operator!=(const ExtVal& a, const ExtVal& b) { return !(a == b); }
  friend bool operator<(const ExtVal& a, const ExtVal& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.r_ < b.r_;
  }
  friend bool operator<=(const ExtVal& a, const ExtVal& b) { return !(b < a); }
  friend bool operator>=(const ExtVal& a, const ExtVal& b) { return !(a < b); }
  friend bool operator>(const ExtVal& a, const ExtVal& b) { return b < a; }

  std::string str() const { return inf_ ? "inf" : r_.str(); }

 private:
  bool inf_;
  Rat r_;
};

}  // namespace kpip
