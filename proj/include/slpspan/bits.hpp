#pragma once

// Word-packed bit rows and square Boolean matrices over automaton states.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace slpspan {

class BitSet {
 public:
  BitSet() = default;
  explicit BitSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const noexcept { return ((words_[i >> 6] >> (i & 63)) & 1U) != 0; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool any() const noexcept {
    for (auto w : words_) {
      if (w != 0) return true;
    }
    return false;
  }
  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool intersects(const BitSet& o) const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if ((words_[w] & o.words_[w]) != 0) return true;
    }
    return false;
  }
  BitSet& operator|=(const BitSet& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }
  BitSet& operator&=(const BitSet& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
  }

  /// Calls f(i) for every set bit, ascending.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (std::uint64_t b = words_[w]; b != 0; b &= b - 1) {
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(b)));
      }
    }
  }
  std::vector<std::size_t> elements() const {
    std::vector<std::size_t> out;
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  std::vector<std::uint64_t>& words() noexcept { return words_; }

  friend bool operator==(const BitSet&, const BitSet&) = default;
  friend auto operator<=>(const BitSet& a, const BitSet& b) { return a.words_ <=> b.words_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// n x n Boolean matrix with word-packed rows.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n) : n_(n), stride_((n + 63) / 64), words_(n * stride_, 0) {}
  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  std::size_t dimension() const noexcept { return n_; }
  bool test(std::size_t i, std::size_t j) const noexcept {
    return ((words_[i * stride_ + (j >> 6)] >> (j & 63)) & 1U) != 0;
  }
  void set(std::size_t i, std::size_t j) noexcept { words_[i * stride_ + (j >> 6)] |= std::uint64_t{1} << (j & 63); }

  const std::uint64_t* row(std::size_t i) const noexcept { return words_.data() + i * stride_; }
  std::uint64_t* row(std::size_t i) noexcept { return words_.data() + i * stride_; }
  std::size_t stride() const noexcept { return stride_; }

  BitSet row_set(std::size_t i) const {
    BitSet s(n_);
    for (std::size_t w = 0; w < stride_; ++w) s.words()[w] = row(i)[w];
    return s;
  }
  bool row_any(std::size_t i) const noexcept {
    for (std::size_t w = 0; w < stride_; ++w) {
      if (row(i)[w] != 0) return true;
    }
    return false;
  }

  BitMatrix& operator|=(const BitMatrix& o) noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }

  BitMatrix transposed() const {
    BitMatrix t(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (test(i, j)) t.set(j, i);
      }
    }
    return t;
  }

  /// Boolean product; `ops` (if given) accumulates row-OR operations.
  static BitMatrix multiply(const BitMatrix& a, const BitMatrix& b, std::uint64_t* ops = nullptr) {
    BitMatrix c(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i) {
      std::uint64_t* out = c.row(i);
      const std::uint64_t* ra = a.row(i);
      for (std::size_t w = 0; w < a.stride_; ++w) {
        for (std::uint64_t bits = ra[w]; bits != 0; bits &= bits - 1) {
          const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
          const std::uint64_t* rb = b.row(k);
          for (std::size_t v = 0; v < a.stride_; ++v) out[v] |= rb[v];
          if (ops) *ops += a.stride_;
        }
      }
    }
    return c;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace slpspan
