#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "gtw/bits.hpp"
#include "gtw/caps.hpp"
#include "gtw/error.hpp"
#include "gtw/order.hpp"

namespace gtw {

/// Finite distributive lattice given by explicit meet/join tables.
///
/// Elements are indices 0..size-1. Lattices built from a poset additionally
/// carry `labels()`: the upset each element stands for.
class FinDL {
 public:
  FinDL() = default;

  /// Laws (lattice identities, bounds, distributivity) are checked eagerly
  /// when size <= eager_check_limit.
  static FinDL from_tables(int n, std::vector<int> meet, std::vector<int> join, int top, int bottom) {
    FinDL d;
    d.n_ = n;
    d.meet_ = std::move(meet);
    d.join_ = std::move(join);
    d.top_ = top;
    d.bottom_ = bottom;
    d.check_tables();
    return d;
  }

  /// Lattice of sets closed under intersection and union.
  static FinDL from_set_lattice(const std::vector<ElemSet>& elements) {
    const int n = static_cast<int>(elements.size());
    std::unordered_map<ElemSet, int, ElemSetHash> index;
    for (int i = 0; i < n; ++i) index.emplace(elements[i], i);
    std::vector<int> meet(static_cast<std::size_t>(n) * n), join(meet.size());
    int top = -1, bottom = -1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto mi = index.find(elements[i] & elements[j]);
        auto ji = index.find(elements[i] | elements[j]);
        if (mi == index.end() || ji == index.end()) throw AlgebraError("set family not closed under meet and join");
        meet[i * n + j] = mi->second;
        join[i * n + j] = ji->second;
      }
    }
    for (int i = 0; i < n; ++i) {
      bool is_top = true, is_bottom = true;
      for (int j = 0; j < n; ++j) {
        if (!elements[j].subset_of(elements[i])) is_top = false;
        if (!elements[i].subset_of(elements[j])) is_bottom = false;
      }
      if (is_top) top = i;
      if (is_bottom) bottom = i;
    }
    if (top < 0 || bottom < 0) throw AlgebraError("set family has no top or bottom");
    return from_tables(n, std::move(meet), std::move(join), top, bottom);
  }

  int size() const { return n_; }
  int meet(int a, int b) const { return meet_[a * n_ + b]; }
  int join(int a, int b) const { return join_[a * n_ + b]; }
  bool leq(int a, int b) const { return meet(a, b) == a; }
  int top() const { return top_; }
  int bottom() const { return bottom_; }

  const std::vector<int>& meet_table() const { return meet_; }
  const std::vector<int>& join_table() const { return join_; }

  const std::vector<Mask>& labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }
  /// Element standing for upset `m`, or -1.
  int index_of_label(Mask m) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), m);
    if (it == labels_.end() || *it != m) return -1;
    return static_cast<int>(it - labels_.begin());
  }
  void set_labels(std::vector<Mask> labels) { labels_ = std::move(labels); }

  /// Order of the carrier as a Poset (requires size <= 64).
  Poset order() const {
    if (n_ > kMaxStates) throw SizeGuard("lattice order as poset", static_cast<std::uint64_t>(n_), kMaxStates);
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        if (a != b && leq(a, b)) pairs.emplace_back(a, b);
    return Poset::from_generators(n_, pairs);
  }

  static constexpr int eager_check_limit = 256;

 protected:
  void check_tables() const {
    const auto sq = static_cast<std::size_t>(n_) * n_;
    if (n_ <= 0 || meet_.size() != sq || join_.size() != sq) throw AlgebraError("lattice tables have the wrong shape");
    auto in_range = [&](int v) { return v >= 0 && v < n_; };
    if (!in_range(top_) || !in_range(bottom_)) throw AlgebraError("top or bottom out of range");
    for (std::size_t i = 0; i < sq; ++i)
      if (!in_range(meet_[i]) || !in_range(join_[i])) throw AlgebraError("lattice table entry out of range");
    for (int a = 0; a < n_; ++a) {
      if (meet(a, a) != a || join(a, a) != a) throw AlgebraError("idempotence fails at " + std::to_string(a));
      if (meet(a, top_) != a || join(a, bottom_) != a) throw AlgebraError("bounds fail at " + std::to_string(a));
      for (int b = 0; b < n_; ++b) {
        if (meet(a, b) != meet(b, a) || join(a, b) != join(b, a))
          throw AlgebraError("commutativity fails at " + std::to_string(a) + "," + std::to_string(b));
        if (meet(a, join(a, b)) != a || join(a, meet(a, b)) != a)
          throw AlgebraError("absorption fails at " + std::to_string(a) + "," + std::to_string(b));
      }
    }
    if (n_ > eager_check_limit) return;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        for (int c = 0; c < n_; ++c) {
          if (meet(a, meet(b, c)) != meet(meet(a, b), c) || join(a, join(b, c)) != join(join(a, b), c))
            throw AlgebraError("associativity fails");
          if (meet(a, join(b, c)) != join(meet(a, b), meet(a, c)))
            throw AlgebraError("distributivity fails at " + std::to_string(a) + "," + std::to_string(b) + "," +
                               std::to_string(c));
        }
  }

  int n_ = 0;
  std::vector<int> meet_, join_;
  int top_ = 0, bottom_ = 0;
  std::vector<Mask> labels_;
};

/// Finite Heyting algebra: a FinDL with an implication table.
class FinHA : public FinDL {
 public:
  FinHA() = default;

  /// Checks residuation exhaustively below the eager limit.
  static FinHA from_tables(FinDL lattice, std::vector<int> imp) {
    FinHA h;
    static_cast<FinDL&>(h) = std::move(lattice);
    h.imp_ = std::move(imp);
    const int n = h.size();
    if (h.imp_.size() != static_cast<std::size_t>(n) * n) throw AlgebraError("implication table has the wrong shape");
    for (int v : h.imp_)
      if (v < 0 || v >= n) throw AlgebraError("implication table entry out of range");
    if (n <= eager_check_limit) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            if (h.leq(h.meet(a, c), b) != h.leq(c, h.imp(a, b)))
              throw AlgebraError("residuation fails at " + std::to_string(a) + "," + std::to_string(b) + "," +
                                 std::to_string(c));
    }
    return h;
  }

  /// Implication of a finite distributive lattice: a -> b is the join of all
  /// c with a ∧ c <= b.
  static FinHA from_lattice(FinDL lattice) {
    const int n = lattice.size();
    std::vector<int> imp(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        int r = lattice.bottom();
        for (int c = 0; c < n; ++c)
          if (lattice.leq(lattice.meet(a, c), b)) r = lattice.join(r, c);
        imp[a * n + b] = r;
      }
    return from_tables(std::move(lattice), std::move(imp));
  }

  int imp(int a, int b) const { return imp_[a * size() + b]; }
  const std::vector<int>& imp_table() const { return imp_; }

 private:
  std::vector<int> imp_;
};

/// Heyting algebra of upsets of P, elements in ascending mask order.
inline FinHA up_algebra(const Poset& p, const Caps& caps = {}) {
  auto ups = upsets(p, caps);
  if (ups.size() > static_cast<std::size_t>(caps.max_algebra))
    throw SizeGuard("upset algebra", ups.size(), static_cast<std::uint64_t>(caps.max_algebra));
  const int n = static_cast<int>(ups.size());
  auto idx = [&](Mask m) {
    return static_cast<int>(std::lower_bound(ups.begin(), ups.end(), m) - ups.begin());
  };
  std::vector<int> meet(static_cast<std::size_t>(n) * n), join(meet.size()), imp(meet.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      meet[a * n + b] = idx(ups[a] & ups[b]);
      join[a * n + b] = idx(ups[a] | ups[b]);
      Mask r = 0;
      for (int x = 0; x < p.size(); ++x)
        if (subset_of(p.up(x) & ups[a], ups[b])) r |= bit(x);
      imp[a * n + b] = idx(r);
    }
  auto lattice = FinDL::from_tables(n, std::move(meet), std::move(join), n - 1, 0);
  lattice.set_labels(ups);
  return FinHA::from_tables(std::move(lattice), std::move(imp));
}

/// Contains top, up-closed, meet-closed. The improper filter is allowed.
inline bool is_filter(const FinDL& d, const ElemSet& s) {
  if (!s.contains(d.top())) return false;
  for (int a = 0; a < d.size(); ++a) {
    if (!s.contains(a)) continue;
    for (int b = 0; b < d.size(); ++b) {
      if (d.leq(a, b) && !s.contains(b)) return false;
      if (s.contains(b) && !s.contains(d.meet(a, b))) return false;
    }
  }
  return true;
}

inline bool is_prime_filter(const FinDL& d, const ElemSet& s) {
  if (!is_filter(d, s) || s.contains(d.bottom())) return false;
  for (int a = 0; a < d.size(); ++a)
    for (int b = a + 1; b < d.size(); ++b)
      if (s.contains(d.join(a, b)) && !s.contains(a) && !s.contains(b)) return false;
  return true;
}

inline std::vector<int> join_irreducibles(const FinDL& d) {
  std::vector<int> out;
  for (int j = 0; j < d.size(); ++j) {
    if (j == d.bottom()) continue;
    int below = d.bottom();
    for (int a = 0; a < d.size(); ++a)
      if (a != j && d.leq(a, j)) below = d.join(below, a);
    if (below != j) out.push_back(j);
  }
  return out;
}

inline ElemSet principal_filter(const FinDL& d, int a) {
  ElemSet s(d.size());
  for (int b = 0; b < d.size(); ++b)
    if (d.leq(a, b)) s.insert(b);
  return s;
}

/// Prime filters by testing the axioms on every subset of the carrier.
/// Exponential; this is the independent route used to check the
/// join-irreducible route on small lattices.
inline std::vector<ElemSet> prime_filters_by_scan(const FinDL& d, const Caps& caps = {}) {
  if (d.size() > caps.max_algebra_scan)
    throw SizeGuard("prime filter subset scan", static_cast<std::uint64_t>(d.size()),
                    static_cast<std::uint64_t>(caps.max_algebra_scan));
  std::vector<ElemSet> out;
  const std::uint64_t total = std::uint64_t{1} << d.size();
  for (std::uint64_t m = 0; m < total; ++m) {
    ElemSet s(d.size());
    for (int i = 0; i < d.size(); ++i)
      if ((m >> i) & 1u) s.insert(i);
    if (is_prime_filter(d, s)) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Prime filters of a finite distributive lattice ordered by inclusion.
struct PrimeFilterSpace {
  std::vector<ElemSet> filters;  // canonical (ascending) order
  Poset order;                   // inclusion

  int size() const { return static_cast<int>(filters.size()); }

  int index_of(const ElemSet& f) const {
    auto it = std::lower_bound(filters.begin(), filters.end(), f);
    if (it == filters.end() || *it != f) return -1;
    return static_cast<int>(it - filters.begin());
  }

  /// θ(a): the prime filters containing a.
  Mask theta(int a) const {
    Mask m = 0;
    for (int i = 0; i < size(); ++i)
      if (filters[i].contains(a)) m |= bit(i);
    return m;
  }
};

/// Prime filters as the principal filters of join-irreducible elements.
inline PrimeFilterSpace prime_filters(const FinDL& d, const Caps& caps = {}) {
  if (d.size() > caps.max_algebra)
    throw SizeGuard("prime filter enumeration", static_cast<std::uint64_t>(d.size()),
                    static_cast<std::uint64_t>(caps.max_algebra));
  PrimeFilterSpace space;
  for (int j : join_irreducibles(d)) space.filters.push_back(principal_filter(d, j));
  std::sort(space.filters.begin(), space.filters.end());
  const int k = space.size();
  if (k > kMaxStates) throw SizeGuard("prime filter space", static_cast<std::uint64_t>(k), kMaxStates);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && space.filters[i].subset_of(space.filters[j])) pairs.emplace_back(i, j);
  space.order = Poset::from_generators(k, pairs);
  return space;
}

/// θ for every element: element index -> upset of the prime filter space.
inline std::vector<Mask> theta(const FinDL& d, const PrimeFilterSpace& space) {
  std::vector<Mask> out(d.size());
  for (int a = 0; a < d.size(); ++a) out[a] = space.theta(a);
  return out;
}

/// η: x ↦ {a ∈ Up(P) | x ∈ a} as a map into the prime filters of up_algebra(P).
inline StateMap eta(const Poset& p, const FinHA& up, const PrimeFilterSpace& space) {
  if (!up.has_labels()) throw Error("eta needs an upset algebra");
  StateMap out(p.size());
  for (int x = 0; x < p.size(); ++x) {
    ElemSet f(up.size());
    for (int a = 0; a < up.size(); ++a)
      if (has(up.labels()[a], x)) f.insert(a);
    out[x] = space.index_of(f);
    if (out[x] < 0) throw InvariantViolation("eta(" + std::to_string(x) + ") is not a prime filter");
  }
  return out;
}

/// D equals the intersection of all θ(a) containing it.
inline bool is_closed_upset(Mask d, const std::vector<Mask>& theta_of, const PrimeFilterSpace& space) {
  Mask meet = space.order.all();
  for (Mask t : theta_of)
    if (subset_of(d, t)) meet &= t;
  return meet == d;
}

/// D equals the union of all θ(a) it contains.
inline bool is_open_upset(Mask d, const std::vector<Mask>& theta_of) {
  Mask join = 0;
  for (Mask t : theta_of)
    if (subset_of(t, d)) join |= t;
  return join == d;
}

}  // namespace gtw
