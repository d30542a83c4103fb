#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace gtw {

/// Subset of state indices 0..63; bit i set means state i is a member.
using Mask = std::uint64_t;

/// Family of subsets of a carrier with at most 6 states: bit s is set iff the
/// subset whose mask is s belongs to the family.
using Family = std::uint64_t;

inline constexpr int kMaxStates = 64;
inline constexpr int kMaxFamilyStates = 6;

constexpr bool has(Mask m, int i) { return ((m >> i) & 1u) != 0; }
constexpr Mask bit(int i) { return Mask{1} << i; }
constexpr bool subset_of(Mask a, Mask b) { return (a & ~b) == 0; }
constexpr Mask full_mask(int n) { return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1; }
constexpr int count(Mask m) { return std::popcount(m); }

constexpr bool family_has(Family w, Mask s) { return ((w >> s) & 1u) != 0; }
constexpr Family family_bit(Mask s) { return Family{1} << s; }

template <class F>
void for_each_bit(Mask m, F&& f) {
  while (m != 0) {
    const int i = std::countr_zero(m);
    f(i);
    m &= m - 1;
  }
}

/// Inverse image of `target` under a map given by its graph.
inline Mask preimage(const std::vector<int>& graph, Mask target) {
  Mask out = 0;
  for (std::size_t x = 0; x < graph.size(); ++x)
    if (has(target, graph[x])) out |= bit(static_cast<int>(x));
  return out;
}

inline Mask image(const std::vector<int>& graph, Mask source) {
  Mask out = 0;
  for_each_bit(source, [&](int x) { out |= bit(graph[x]); });
  return out;
}

/// Dynamically sized set of element indices, used for subsets of algebra
/// carriers. Ordered as the binary number it spells (highest index most
/// significant), which is the canonical order used throughout.
class ElemSet {
 public:
  ElemSet() = default;
  explicit ElemSet(int universe) : size_(universe), words_((universe + 63) / 64, 0) {}

  static ElemSet full(int universe) {
    ElemSet s(universe);
    for (int i = 0; i < universe; ++i) s.insert(i);
    return s;
  }

  int universe() const { return size_; }
  bool contains(int i) const { return ((words_[i >> 6] >> (i & 63)) & 1u) != 0; }
  void insert(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void erase(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  bool subset_of(const ElemSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if ((words_[i] & ~o.words_[i]) != 0) return false;
    return true;
  }

  ElemSet operator&(const ElemSet& o) const {
    ElemSet r(*this);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }
  ElemSet operator|(const ElemSet& o) const {
    ElemSet r(*this);
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
    return r;
  }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 0; i < size_; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t m = words_[w];
      while (m != 0) {
        f(static_cast<int>(w * 64) + std::countr_zero(m));
        m &= m - 1;
      }
    }
  }

  bool operator==(const ElemSet&) const = default;
  std::strong_ordering operator<=>(const ElemSet& o) const {
    if (auto c = size_ <=> o.size_; c != 0) return c;
    for (std::size_t i = words_.size(); i-- > 0;)
      if (auto c = words_[i] <=> o.words_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  std::size_t hash() const {
    std::size_t h = static_cast<std::size_t>(size_);
    for (auto w : words_) h = h * 0x9E3779B97F4A7C15ull + std::hash<std::uint64_t>{}(w);
    return h;
  }

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ElemSetHash {
  std::size_t operator()(const ElemSet& s) const { return s.hash(); }
};

}  // namespace gtw
