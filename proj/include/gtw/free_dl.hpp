#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gtw/duality.hpp"
#include "gtw/error.hpp"
#include "gtw/formula.hpp"
#include "gtw/heyting.hpp"
#include "gtw/parser.hpp"

namespace gtw {

/// The free distributive lattice on the kind's generators (□̇a / ▽̇a / □̇a, ◇̇a
/// for a ∈ A) modulo the kind's stock rank-1 axioms, realised inside the
/// function lattice over its admissible 2-valued valuations.
///
/// Admissibility is decided by instantiating every stock axiom at every
/// assignment of its letters to elements of A and evaluating both sides,
/// so nothing here presupposes the shape of the dual points.
class FreeDLOracle {
 public:
  /// Keeps a reference to `a`, which must outlive the oracle.
  FreeDLOracle(Kind, FinHA&&, const Caps& = {}) = delete;  // keeps a pointer to the algebra
  FreeDLOracle(Kind kind, const FinHA& a, const Caps& caps = {}) : kind_(kind), a_(&a) {
    if (kind == Kind::si) throw KindError("no free lattice oracle for si");
    const int n = a.size();
    generators_ = kind == Kind::cin ? 2 * n : n;
    if (generators_ > 20) throw SizeGuard("free lattice generators", static_cast<std::uint64_t>(generators_), 20);
    axioms_ = stock_axioms(kind);
    const std::uint64_t candidates = std::uint64_t{1} << generators_;
    for (std::uint64_t v = 0; v < candidates; ++v)
      if (admissible(v)) valuations_.push_back(v);
    const int m = static_cast<int>(valuations_.size());
    for (int g = 0; g < generators_; ++g) {
      ElemSet vec(m);
      for (int i = 0; i < m; ++i)
        if ((valuations_[i] >> g) & 1u) vec.insert(i);
      vectors_.push_back(std::move(vec));
    }
    (void)caps;
  }

  Kind kind() const { return kind_; }
  int generator_count() const { return generators_; }
  const std::vector<std::uint64_t>& admissible_valuations() const { return valuations_; }
  const std::vector<ElemSet>& generator_vectors() const { return vectors_; }

  /// Generator index of □̇a (or ▽̇a), and of ◇̇a for cin.
  int first_generator(int a) const { return a; }
  int second_generator(int a) const { return a_->size() + a; }

  /// Prime filters of the lattice, each given by its join-irreducible
  /// generator j (a meet of generators): the filter is ↑j, and its trace is
  /// the set of generators above j. Computed without materialising the
  /// lattice.
  std::vector<LDualPoint> prime_filter_traces() const {
    std::vector<ElemSet> jis = join_irreducible_meets();
    std::vector<LDualPoint> out;
    for (const auto& j : jis) out.push_back(trace_above(j));
    std::sort(out.begin(), out.end());
    return out;
  }

  struct Materialized {
    FinDL lattice;
    std::vector<ElemSet> elements;  // element i of the lattice, ascending
  };

  /// The whole lattice as a set lattice, for small cases only.
  std::optional<Materialized> materialize(int cap = 512) const {
    const int m = static_cast<int>(valuations_.size());
    std::set<ElemSet> elems;
    elems.insert(ElemSet(m));
    elems.insert(ElemSet::full(m));
    for (const auto& g : vectors_) elems.insert(g);
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<ElemSet> cur(elems.begin(), elems.end());
      for (std::size_t i = 0; i < cur.size(); ++i)
        for (std::size_t j = i + 1; j < cur.size(); ++j) {
          for (const auto& e : {cur[i] & cur[j], cur[i] | cur[j]})
            if (elems.insert(e).second) {
              grew = true;
              if (static_cast<int>(elems.size()) > cap) return std::nullopt;
            }
        }
    }
    std::vector<ElemSet> list(elems.begin(), elems.end());
    auto lattice = FinDL::from_set_lattice(list);
    return Materialized{std::move(lattice), std::move(list)};
  }

  /// Traces of the prime filters of a materialised lattice, computed with the
  /// lattice's own prime filter routine.
  std::vector<LDualPoint> traces_via_lattice(const Materialized& mat, bool by_scan) const {
    const FinDL& lattice = mat.lattice;
    const auto& elements = mat.elements;
    std::vector<ElemSet> filters;
    if (by_scan) {
      Caps c;
      c.max_algebra_scan = lattice.size();
      filters = prime_filters_by_scan(lattice, c);
    } else {
      filters = prime_filters(lattice).filters;
    }
    std::vector<int> gen_index;
    for (const auto& g : vectors_)
      gen_index.push_back(static_cast<int>(std::lower_bound(elements.begin(), elements.end(), g) - elements.begin()));
    std::vector<LDualPoint> out;
    const int n = a_->size();
    for (const auto& f : filters) {
      LDualPoint p{kind_, ElemSet(n), ElemSet(n)};
      for (int x = 0; x < n; ++x) {
        if (f.contains(gen_index[first_generator(x)])) p.first.insert(x);
        if (kind_ == Kind::cin && f.contains(gen_index[second_generator(x)])) p.second.insert(x);
      }
      out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  /// Meets of non-empty sets of generators (and the top vector) that are
  /// join-irreducible in the generated lattice.
  std::vector<ElemSet> join_irreducible_meets() const {
    const int m = static_cast<int>(valuations_.size());
    std::set<ElemSet> meets;
    meets.insert(ElemSet::full(m));
    for (const auto& g : vectors_) {
      std::vector<ElemSet> add;
      for (const auto& x : meets) add.push_back(x & g);
      meets.insert(add.begin(), add.end());
    }
    std::vector<ElemSet> out;
    for (const auto& j : meets) {
      if (j.empty()) continue;
      ElemSet below(m);
      for (const auto& x : meets)
        if (x != j && x.subset_of(j)) below = below | x;
      if (below != j) out.push_back(j);
    }
    return out;
  }

  LDualPoint trace_above(const ElemSet& j) const {
    const int n = a_->size();
    LDualPoint p{kind_, ElemSet(n), ElemSet(n)};
    for (int x = 0; x < n; ++x) {
      if (j.subset_of(vectors_[first_generator(x)])) p.first.insert(x);
      if (kind_ == Kind::cin && j.subset_of(vectors_[second_generator(x)])) p.second.insert(x);
    }
    return p;
  }

  /// Element of A denoted by a propositional formula under an assignment.
  int inner(const Formula& f, const std::map<std::string, int>& asg) const {
    const FinHA& a = *a_;
    switch (f.op()) {
      case Op::top: return a.top();
      case Op::bot: return a.bottom();
      case Op::letter: return asg.at(f.name());
      case Op::conj: return a.meet(inner(f.left(), asg), inner(f.right(), asg));
      case Op::disj: return a.join(inner(f.left(), asg), inner(f.right(), asg));
      case Op::imp: return a.imp(inner(f.left(), asg), inner(f.right(), asg));
      default: throw Error("nested modality in a rank-1 axiom");
    }
  }

  /// Two-valued value of a rank-1 term under the generator valuation v.
  bool outer(const Formula& f, const std::map<std::string, int>& asg, std::uint64_t v) const {
    switch (f.op()) {
      case Op::top: return true;
      case Op::bot: return false;
      case Op::conj: return outer(f.left(), asg, v) && outer(f.right(), asg, v);
      case Op::disj: return outer(f.left(), asg, v) || outer(f.right(), asg, v);
      case Op::box:
      case Op::tri: return ((v >> first_generator(inner(f.child(), asg))) & 1u) != 0;
      case Op::dia: return ((v >> second_generator(inner(f.child(), asg))) & 1u) != 0;
      default: throw Error("not a rank-1 term");
    }
  }

  bool admissible(std::uint64_t v) const {
    for (const auto& ax : axioms_) {
      std::vector<std::string> names;
      for (const auto& l : letters(std::vector<Formula>{ax.lhs, ax.rhs})) names.push_back(l);
      std::vector<int> vals(names.size(), 0);
      bool ok = true;
      for_each_assignment(a_->size(), names.size(), [&](const std::vector<int>& vs) {
        std::map<std::string, int> asg;
        for (std::size_t i = 0; i < names.size(); ++i) asg[names[i]] = vs[i];
        if (outer(ax.lhs, asg, v) != outer(ax.rhs, asg, v)) ok = false;
        return ok;
      });
      if (!ok) return false;
    }
    return true;
  }

  Kind kind_;
  const FinHA* a_;
  int generators_ = 0;
  std::vector<AxiomPair> axioms_;
  std::vector<std::uint64_t> valuations_;
  std::vector<ElemSet> vectors_;
};

}  // namespace gtw
