#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lfl {

// Fixed-width dynamic bitset with value semantics, total order and hashing.
class Bits {
 public:
  Bits() = default;
  explicit Bits(int n) : n_(n), w_((n + 63) / 64, 0) {}

  static Bits full(int n) {
    Bits b(n);
    for (int i = 0; i < n; ++i) b.set(i);
    return b;
  }

  int width() const { return n_; }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1ULL; }
  void set(int i) { w_[i >> 6] |= (1ULL << (i & 63)); }
  void reset(int i) { w_[i >> 6] &= ~(1ULL << (i & 63)); }

  bool any() const {
    for (auto x : w_)
      if (x) return true;
    return false;
  }
  bool none() const { return !any(); }
  int count() const {
    int c = 0;
    for (auto x : w_) c += std::popcount(x);
    return c;
  }

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < w_.size(); ++k) {
      uint64_t x = w_[k];
      while (x) {
        int b = std::countr_zero(x);
        out.push_back(static_cast<int>(k * 64 + b));
        x &= x - 1;
      }
    }
    return out;
  }

  bool subset_of(const Bits& o) const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & ~o.w_[k]) return false;
    return true;
  }
  bool intersects(const Bits& o) const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & o.w_[k]) return true;
    return false;
  }

  Bits& operator|=(const Bits& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
    return *this;
  }
  Bits& operator&=(const Bits& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
    return *this;
  }
  friend Bits operator|(Bits a, const Bits& b) { return a |= b; }
  friend Bits operator&(Bits a, const Bits& b) { return a &= b; }

  bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const Bits& o) const { return !(*this == o); }
  bool operator<(const Bits& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    return w_ < o.w_;
  }

  std::size_t hash() const {
    std::size_t h = std::hash<int>()(n_);
    for (auto x : w_) h = h * 0x9E3779B97F4A7C15ULL + std::hash<uint64_t>()(x) + (h >> 29);
    return h;
  }

  const std::vector<uint64_t>& words() const { return w_; }

 private:
  int n_ = 0;
  std::vector<uint64_t> w_;
};

struct BitsHash {
  std::size_t operator()(const Bits& b) const { return b.hash(); }
};

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2));
}

}  // namespace lfl
