#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpip/rational.hpp"

namespace kpip {

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point of S_k^n = {0,...,k}^n. Label 0 is the "unassigned" bottom of the
// order a <= b iff a in {0,b}; everything here is that order, coordinatewise.
class KVector {
 public:
  KVector() : n_(0), k_(1) {}
  KVector(int n, int k) : n_(n), k_(k), labels_(n, 0) { check_dims(); }
  KVector(std::vector<int> labels, int k)
      : n_((int)labels.size()), k_(k), labels_(std::move(labels)) {
    check_dims();
    for (int v : labels_)
      if (v < 0 || v > k_) throw domain_error("label out of range [0,k]");
  }
  KVector(std::initializer_list<int> labels, int k) : KVector(std::vector<int>(labels), k) {}

  int n() const { return n_; }
  int k() const { return k_; }
  int operator[](int i) const { return labels_[i]; }
  void set(int i, int v) {
    if (v < 0 || v > k_) throw domain_error("label out of range [0,k]");
    labels_[i] = v;
  }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<int> support() const {
    std::vector<int> s;
    for (int i = 0; i < n_; ++i)
      if (labels_[i] != 0) s.push_back(i);
    return s;
  }
  int support_size() const {
    int c = 0;
    for (int v : labels_) c += v != 0;
    return c;
  }
  bool is_zero() const { return support_size() == 0; }

  // Mixed-radix index, base (k+1), coordinate 0 least significant.
  long long index() const {
    long long idx = 0;
    for (int i = n_ - 1; i >= 0; --i) idx = idx * (k_ + 1) + labels_[i];
    return idx;
  }
  static KVector from_index(long long idx, int n, int k) {
    KVector x(n, k);
    for (int i = 0; i < n; ++i) {
      x.labels_[i] = (int)(idx % (k + 1));
      idx /= (k + 1);
    }
    return x;
  }

  friend bool operator==(const KVector& a, const KVector& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.labels_ == b.labels_;
  }
  friend bool operator!=(const KVector& a, const KVector& b) { return !(a == b); }
  friend bool operator<(const KVector& a, const KVector& b) {
    return a.labels_ < b.labels_;  // lexicographic, for ordered containers
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < n_; ++i) {
      if (k_ > 9 && i) s += ",";
      s += std::to_string(labels_[i]);
    }
    return s;
  }
  friend std::ostream& operator<<(std::ostream& os, const KVector& x) { return os << x.str(); }

 private:
  void check_dims() const {
    if (n_ < 0 || k_ < 1) throw domain_error("need n >= 0 and k >= 1");
  }
  int n_;
  int k_;
  std::vector<int> labels_;
};

inline void require_same_space(const KVector& x, const KVector& y) {
  if (x.n() != y.n() || x.k() != y.k())
    throw domain_error("operands live in different S_k^n spaces");
}

// Componentwise meet: min on comparable coordinates, 0 on incomparable ones.
inline KVector sq_meet(const KVector& x, const KVector& y) {
  require_same_space(x, y);
  KVector r(x.n(), x.k());
  for (int i = 0; i < x.n(); ++i) {
    int a = x[i], b = y[i];
    if (a == b || a == 0 || b == 0)
      r.set(i, std::min(a, b));
    // incomparable nonzero pair stays 0
  }
  return r;
}

// Componentwise join: max on comparable coordinates, 0 on incomparable ones.
inline KVector sq_join(const KVector& x, const KVector& y) {
  require_same_space(x, y);
  KVector r(x.n(), x.k());
  for (int i = 0; i < x.n(); ++i) {
    int a = x[i], b = y[i];
    if (a == b || a == 0 || b == 0) r.set(i, std::max(a, b));
  }
  return r;
}

inline bool partial_leq(const KVector& x, const KVector& y) {
  require_same_space(x, y);
  for (int i = 0; i < x.n(); ++i)
    if (x[i] != 0 && x[i] != y[i]) return false;
  return true;
}

// True join in S_k^n exists iff no coordinate holds two distinct nonzero labels.
inline bool join_exists(const KVector& x, const KVector& y) {
  require_same_space(x, y);
  for (int i = 0; i < x.n(); ++i)
    if (x[i] != 0 && y[i] != 0 && x[i] != y[i]) return false;
  return true;
}

// Dense table-backed function f : S_k^n -> R union {+inf}.
class TableFunction {
 public:
  TableFunction(int n, int k, ExtVal fill = ExtVal(Rat(0)))
      : n_(n), k_(k), values_(size_of(n, k), fill) {}

  int n() const { return n_; }
  int k() const { return k_; }
  long long size() const { return (long long)values_.size(); }

  const ExtVal& at(long long idx) const { return values_[idx]; }
  const ExtVal& operator()(const KVector& x) const { return values_[x.index()]; }
  void set(const KVector& x, ExtVal v) { values_[x.index()] = v; }
  void set(long long idx, ExtVal v) { values_[idx] = v; }

  bool has_finite_value() const {
    for (const auto& v : values_)
      if (!v.is_inf()) return true;
    return false;
  }

  ExtVal min_value() const {
    ExtVal m = ExtVal::infinity();
    for (const auto& v : values_)
      if (v < m) m = v;
    return m;
  }

  static long long size_of(int n, int k) {
    long long s = 1;
    for (int i = 0; i < n; ++i) {
      s *= (k + 1);
      if (s > (1LL << 40)) throw domain_error("table too large for dense storage");
    }
    return s;
  }

 private:
  int n_;
  int k_;
  std::vector<ExtVal> values_;
};

// First witness that the k-submodular inequality fails, if any.
struct SubmodViolation {
  KVector x, y;
};

// Exhaustive check of f(x)+f(y) >= f(x meet y)+f(x join y) over all pairs.
// +inf saturates on the left; a finite left against an infinite right fails.
inline std::optional<SubmodViolation> is_k_submodular(const TableFunction& f) {
  const long long sz = f.size();
  const int n = f.n(), k = f.k();
  std::vector<KVector> pts;
  pts.reserve(sz);
  for (long long i = 0; i < sz; ++i) pts.push_back(KVector::from_index(i, n, k));
  for (long long i = 0; i < sz; ++i) {
    if (f.at(i).is_inf()) continue;  // infinite left side always satisfies
    for (long long j = i; j < sz; ++j) {
      if (f.at(j).is_inf()) continue;
      ExtVal lhs = f.at(i) + f.at(j);
      ExtVal rhs = f(sq_meet(pts[i], pts[j])) + f(sq_join(pts[i], pts[j]));
      if (lhs < rhs) return SubmodViolation{pts[i], pts[j]};
    }
  }
  return std::nullopt;
}

inline std::vector<KVector> brute_minimizer_set(const TableFunction& f) {
  if (!f.has_finite_value()) throw domain_error("function is identically +inf");
  ExtVal m = f.min_value();
  std::vector<KVector> out;
  for (long long i = 0; i < f.size(); ++i)
    if (f.at(i) == m) out.push_back(KVector::from_index(i, f.n(), f.k()));
  return out;
}

inline bool is_closed_set(const std::vector<KVector>& m) {
  if (m.empty()) throw domain_error("closedness is defined for nonempty sets");
  std::set<KVector> s(m.begin(), m.end());
  for (const auto& x : m)
    for (const auto& y : m) {
      if (!s.count(sq_meet(x, y))) return false;
      if (!s.count(sq_join(x, y))) return false;
    }
  return true;
}

// Partial assignment: fixing[i] in {-1 (free), 0..k}.
using Fixing = std::vector<int>;

// Minimizing oracle: evaluates f and minimizes it under partial fixings.
// minimize() must return a point consistent with the fixing achieving the
// minimum over all consistent points. Implementations count minimize calls.
class MinimizingOracle {
 public:
  virtual ~MinimizingOracle() = default;
  virtual int n() const = 0;
  virtual int k() const = 0;
  virtual ExtVal evaluate(const KVector& x) = 0;
  virtual KVector minimize(const Fixing& fix) = 0;
  long long minimize_calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

 protected:
  long long calls_ = 0;
};

// Brute-force oracle over a dense table; the ground truth used in tests.
class TableOracle : public MinimizingOracle {
 public:
  explicit TableOracle(TableFunction f) : f_(std::move(f)) {}
  int n() const override { return f_.n(); }
  int k() const override { return f_.k(); }
  ExtVal evaluate(const KVector& x) override { return f_(x); }

  KVector minimize(const Fixing& fix) override {
    ++calls_;
    if ((int)fix.size() != f_.n()) throw domain_error("fixing size mismatch");
    std::vector<long long> pow(f_.n(), 1);
    for (int j = 1; j < f_.n(); ++j) pow[j] = pow[j - 1] * (f_.k() + 1);
    ExtVal best = ExtVal::infinity();
    long long best_idx = -1;
    for (long long i = 0; i < f_.size(); ++i) {
      bool ok = true;
      for (int j = 0; j < f_.n() && ok; ++j)
        if (fix[j] >= 0 && (i / pow[j]) % (f_.k() + 1) != fix[j]) ok = false;
      if (!ok) continue;
      if (best_idx < 0 || f_.at(i) < best) {
        best = f_.at(i);
        best_idx = i;
      }
    }
    if (best_idx < 0) throw domain_error("fixing admits no point");
    return KVector::from_index(best_idx, f_.n(), f_.k());
  }

  const TableFunction& table() const { return f_; }

 private:
  TableFunction f_;
};

}  // namespace kpip
