#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "gtw/bits.hpp"
#include "gtw/caps.hpp"
#include "gtw/error.hpp"

namespace gtw {

/// Graph of a total function between index sets; graph[x] is the image of x.
using StateMap = std::vector<int>;

/// Finite partial order on indices 0..size-1, stored as per-element up-sets.
class Poset {
 public:
  Poset() = default;

  /// Reflexive-transitive closure of the generating pairs (x, y) meaning x <= y.
  /// Throws CycleError when the closure is not antisymmetric.
  static Poset from_generators(int n, const std::vector<std::pair<int, int>>& pairs) {
    if (n < 0 || n > kMaxStates) throw SizeGuard("poset size", static_cast<std::uint64_t>(n), kMaxStates);
    Poset p;
    p.size_ = n;
    p.up_.assign(n, 0);
    for (int x = 0; x < n; ++x) p.up_[x] = bit(x);
    for (auto [a, b] : pairs) {
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw Error("order pair (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
      p.up_[a] |= bit(b);
    }
    // Warshall on bit rows.
    for (int k = 0; k < n; ++k)
      for (int x = 0; x < n; ++x)
        if (has(p.up_[x], k)) p.up_[x] |= p.up_[k];
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y)
        if (has(p.up_[x], y) && has(p.up_[y], x)) throw CycleError(x, y);
    p.rebuild_down();
    return p;
  }

  static Poset discrete(int n) { return from_generators(n, {}); }

  static Poset chain(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    return from_generators(n, pairs);
  }

  int size() const { return size_; }
  Mask all() const { return full_mask(size_); }
  bool leq(int x, int y) const { return has(up_[x], y); }
  Mask up(int x) const { return up_[x]; }
  Mask down(int x) const { return down_[x]; }

  Mask up_closure(Mask m) const {
    Mask out = 0;
    for_each_bit(m, [&](int x) { out |= up_[x]; });
    return out;
  }
  Mask down_closure(Mask m) const {
    Mask out = 0;
    for_each_bit(m, [&](int x) { out |= down_[x]; });
    return out;
  }
  bool is_upset(Mask m) const { return subset_of(m, all()) && up_closure(m) == m; }

  /// Covering pairs (x < y with nothing strictly between); a minimal generating set.
  std::vector<std::pair<int, int>> covers() const {
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < size_; ++x)
      for (int y = 0; y < size_; ++y) {
        if (x == y || !leq(x, y)) continue;
        const Mask between = (up_[x] & down_[y]) & ~bit(x) & ~bit(y);
        if (between == 0) out.emplace_back(x, y);
      }
    return out;
  }

  /// Poset with element x renamed to perm[x]; perm must be a bijection.
  Poset relabel(const StateMap& perm) const {
    Poset p;
    p.size_ = size_;
    p.up_.assign(size_, 0);
    for (int x = 0; x < size_; ++x) p.up_[perm[x]] = image(perm, up_[x]);
    p.rebuild_down();
    return p;
  }

  /// Induced suborder on `members`; element i of the result is the i-th
  /// smallest member. `embedding` receives the inclusion map.
  Poset restrict(Mask members, StateMap* embedding = nullptr) const {
    StateMap idx;
    for_each_bit(members, [&](int x) { idx.push_back(x); });
    Poset p;
    p.size_ = static_cast<int>(idx.size());
    p.up_.assign(p.size_, 0);
    for (int i = 0; i < p.size_; ++i)
      for (int j = 0; j < p.size_; ++j)
        if (leq(idx[i], idx[j])) p.up_[i] |= bit(j);
    p.rebuild_down();
    if (embedding) *embedding = idx;
    return p;
  }

  bool operator==(const Poset& o) const { return size_ == o.size_ && up_ == o.up_; }

 private:
  void rebuild_down() {
    down_.assign(size_, 0);
    for (int x = 0; x < size_; ++x)
      for_each_bit(up_[x], [&](int y) { down_[y] |= bit(x); });
  }

  int size_ = 0;
  std::vector<Mask> up_;
  std::vector<Mask> down_;
};

inline Poset validate_poset(int n, const std::vector<std::pair<int, int>>& pairs) {
  return Poset::from_generators(n, pairs);
}

/// Enumerates every subset of elements closed upward in `order`, where a
/// member's strict successors must be members. Output in ascending mask order.
inline std::vector<Mask> upsets(const Poset& p, const Caps& caps = {}) {
  const int n = p.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Larger elements have strictly smaller up-sets, so this visits tops first.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return count(p.up(a)) < count(p.up(b)); });
  std::vector<Mask> out;
  auto rec = [&](auto&& self, int i, Mask current) -> void {
    if (i == n) {
      if (out.size() >= caps.max_upsets) throw SizeGuard("upset enumeration", out.size() + 1, caps.max_upsets);
      out.push_back(current);
      return;
    }
    const int x = order[i];
    self(self, i + 1, current);
    if (subset_of(p.up(x) & ~bit(x), current)) self(self, i + 1, current | bit(x));
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

inline bool is_total_map(const StateMap& f, const Poset& dom, const Poset& cod) {
  if (static_cast<int>(f.size()) != dom.size()) return false;
  return std::all_of(f.begin(), f.end(), [&](int y) { return y >= 0 && y < cod.size(); });
}

inline bool is_monotone(const StateMap& f, const Poset& dom, const Poset& cod) {
  if (!is_total_map(f, dom, cod)) return false;
  for (int x = 0; x < dom.size(); ++x)
    for (int y = 0; y < dom.size(); ++y)
      if (dom.leq(x, y) && !cod.leq(f[x], f[y])) return false;
  return true;
}

/// Monotone and satisfies the back condition: whenever f(x) <= z' there is
/// some z >= x with f(z) = z'. Equivalently f[up(x)] = up(f(x)).
inline bool is_p_morphism(const StateMap& f, const Poset& dom, const Poset& cod) {
  if (!is_monotone(f, dom, cod)) return false;
  for (int x = 0; x < dom.size(); ++x)
    if (image(f, dom.up(x)) != cod.up(f[x])) return false;
  return true;
}

inline bool is_surjective(const StateMap& f, int cod_size) {
  Mask hit = 0;
  for (int y : f) hit |= bit(y);
  return hit == full_mask(cod_size);
}

/// Order embedding: f(x) <= f(y) iff x <= y (injectivity follows).
inline bool is_order_embedding(const StateMap& f, const Poset& dom, const Poset& cod) {
  if (!is_total_map(f, dom, cod)) return false;
  for (int x = 0; x < dom.size(); ++x)
    for (int y = 0; y < dom.size(); ++y)
      if (dom.leq(x, y) != cod.leq(f[x], f[y])) return false;
  return true;
}

inline StateMap compose(const StateMap& g, const StateMap& f) {
  StateMap out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = g[f[x]];
  return out;
}

inline StateMap identity_map(int n) {
  StateMap id(n);
  std::iota(id.begin(), id.end(), 0);
  return id;
}

inline StateMap inverse_permutation(const StateMap& perm) {
  StateMap inv(perm.size());
  for (std::size_t x = 0; x < perm.size(); ++x) inv[perm[x]] = static_cast<int>(x);
  return inv;
}

struct PosetCoproduct {
  Poset poset;
  std::vector<StateMap> injections;
  std::vector<int> offsets;
};

inline PosetCoproduct poset_coproduct(const std::vector<Poset>& parts) {
  if (parts.empty()) throw Error("coproduct of an empty list");
  int total = 0;
  for (const auto& p : parts) total += p.size();
  if (total > kMaxStates) throw SizeGuard("coproduct size", static_cast<std::uint64_t>(total), kMaxStates);
  PosetCoproduct out;
  std::vector<std::pair<int, int>> pairs;
  int offset = 0;
  for (const auto& p : parts) {
    out.offsets.push_back(offset);
    StateMap inj(p.size());
    for (int x = 0; x < p.size(); ++x) {
      inj[x] = offset + x;
      for_each_bit(p.up(x), [&](int y) { pairs.emplace_back(offset + x, offset + y); });
    }
    out.injections.push_back(std::move(inj));
    offset += p.size();
  }
  out.poset = Poset::from_generators(total, pairs);
  return out;
}

/// Order matrix as a bit string under a relabelling: bit (perm[x]*n + perm[y])
/// is set iff x <= y. Defined for n <= 8.
inline std::uint64_t order_code(const Poset& p, const StateMap& perm) {
  const int n = p.size();
  std::uint64_t code = 0;
  for (int x = 0; x < n; ++x)
    for_each_bit(p.up(x), [&](int y) { code |= std::uint64_t{1} << (perm[x] * n + perm[y]); });
  return code;
}

/// All permutations of 0..n-1 in lexicographic order.
inline std::vector<StateMap> all_permutations(int n) {
  std::vector<StateMap> out;
  StateMap perm = identity_map(n);
  do out.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Relabellings that send `p` to its canonical form (the minimal order code).
/// The first entry is the lexicographically smallest such permutation.
inline std::vector<StateMap> canonical_labelings(const Poset& p) {
  if (p.size() > 8) throw SizeGuard("canonical labelling", static_cast<std::uint64_t>(p.size()), 8);
  std::uint64_t best = ~std::uint64_t{0};
  std::vector<StateMap> out;
  for (auto& perm : all_permutations(p.size())) {
    const auto code = order_code(p, perm);
    if (code < best) {
      best = code;
      out.clear();
    }
    if (code == best) out.push_back(perm);
  }
  return out;
}

inline Poset canonical_form(const Poset& p) { return p.relabel(canonical_labelings(p).front()); }

/// Order automorphisms of p.
inline std::vector<StateMap> automorphisms(const Poset& p) {
  std::vector<StateMap> out;
  for (auto& perm : all_permutations(p.size()))
    if (p.relabel(perm) == p) out.push_back(perm);
  return out;
}

/// One poset per isomorphism class on n points, each in canonical labelling,
/// sorted by canonical code.
inline std::vector<Poset> enumerate_posets(int n, const Caps& caps = {}) {
  if (n < 0 || n > caps.max_poset_enum)
    throw SizeGuard("poset enumeration", static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(caps.max_poset_enum));
  // Every poset has a linear extension, so every class has a member whose
  // strict pairs all go from a smaller to a larger index.
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::set<std::uint64_t> seen;
  std::vector<std::pair<std::uint64_t, Poset>> found;
  const std::uint64_t total = std::uint64_t{1} << slots.size();
  for (std::uint64_t choice = 0; choice < total; ++choice) {
    std::vector<Mask> up(n);
    for (int x = 0; x < n; ++x) up[x] = bit(x);
    for (std::size_t s = 0; s < slots.size(); ++s)
      if ((choice >> s) & 1u) up[slots[s].first] |= bit(slots[s].second);
    bool transitive = true;
    for (int x = 0; x < n && transitive; ++x)
      for_each_bit(up[x], [&](int y) {
        if (!subset_of(up[y], up[x])) transitive = false;
      });
    if (!transitive) continue;
    std::vector<std::pair<int, int>> pairs;
    for (int x = 0; x < n; ++x) for_each_bit(up[x], [&](int y) { pairs.emplace_back(x, y); });
    const Poset canon = canonical_form(Poset::from_generators(n, pairs));
    const auto code = order_code(canon, identity_map(n));
    if (seen.insert(code).second) found.emplace_back(code, canon);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Poset> out;
  for (auto& [code, p] : found) out.push_back(std::move(p));
  return out;
}

}  // namespace gtw
