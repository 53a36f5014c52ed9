#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace kpip {

// Unsigned big integer, base 1e9 limbs. Only what ideal counting needs:
// construction from u64, addition, multiplication, comparison, decimal output.
class BigUint {
 public:
  BigUint() : limbs_{0} {}
  BigUint(unsigned long long v) {
    if (v == 0) limbs_.push_back(0);
    while (v) { limbs_.push_back((uint32_t)(v % kBase)); v /= kBase; }
  }

  friend BigUint operator+(const BigUint& a, const BigUint& b) {
    BigUint r;
    r.limbs_.assign(std::max(a.limbs_.size(), b.limbs_.size()) + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < r.limbs_.size(); ++i) {
      uint64_t s = carry;
      if (i < a.limbs_.size()) s += a.limbs_[i];
      if (i < b.limbs_.size()) s += b.limbs_[i];
      r.limbs_[i] = (uint32_t)(s % kBase);
      carry = s / kBase;
    }
    r.trim();
    return r;
  }

  friend BigUint operator*(const BigUint& a, const BigUint& b) {
    BigUint r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
      uint64_t carry = 0;
      for (size_t j = 0; j < b.limbs_.size() || carry; ++j) {
        uint64_t cur = r.limbs_[i + j] + carry;
        if (j < b.limbs_.size()) cur += (uint64_t)a.limbs_[i] * b.limbs_[j];
        r.limbs_[i + j] = (uint32_t)(cur % kBase);
        carry = cur / kBase;
      }
    }
    r.trim();
    return r;
  }

  BigUint& operator+=(const BigUint& o) { return *this = *this + o; }
  BigUint& operator*=(const BigUint& o) { return *this = *this * o; }

  friend bool operator==(const BigUint& a, const BigUint& b) { return a.limbs_ == b.limbs_; }
  friend bool operator!=(const BigUint& a, const BigUint& b) { return !(a == b); }

  bool fits_u64() const {
    return limbs_.size() <= 3 && (limbs_.size() < 3 || limbs_[2] <= 18ULL);
  }
  unsigned long long as_u64() const {
    unsigned long long v = 0;
    for (size_t i = limbs_.size(); i-- > 0;) v = v * kBase + limbs_[i];
    return v;
  }

  std::string str() const {
    std::string s = std::to_string(limbs_.back());
    for (size_t i = limbs_.size() - 1; i-- > 0;) {
      std::string part = std::to_string(limbs_[i]);
      s += std::string(9 - part.size(), '0') + part;
    }
    return s;
  }

 private:
  static constexpr uint64_t kBase = 1000000000ULL;
  void trim() {
    while (limbs_.size() > 1 && limbs_.back() == 0) limbs_.pop_back();
  }
  std::vector<uint32_t> limbs_;
};

}  // namespace kpip
