#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gtw/bits.hpp"
#include "gtw/caps.hpp"
#include "gtw/error.hpp"
#include "gtw/formula.hpp"
#include "gtw/formula_table.hpp"
#include "gtw/frame.hpp"
#include "gtw/heyting.hpp"
#include "gtw/kind.hpp"
#include "gtw/morphism.hpp"

namespace gtw {

/// Finite Heyting algebra with operator tables for one signature.
///
/// box: `op1` is □.  im: `op1` is ▽.  cin: `op1` is □, `op2` is ◇.
/// si: `binop[a * n + b]` is a ⊰ b (no equations are enforced for si).
class ModalAlgebra {
 public:
  ModalAlgebra() = default;

  static ModalAlgebra make(Kind kind, FinHA base, std::vector<int> op1, std::vector<int> op2 = {},
                           std::vector<int> binop = {}) {
    ModalAlgebra a;
    a.kind_ = kind;
    a.base_ = std::move(base);
    a.op1_ = std::move(op1);
    a.op2_ = std::move(op2);
    a.binop_ = std::move(binop);
    a.validate();
    return a;
  }

  Kind kind() const { return kind_; }
  const FinHA& base() const { return base_; }
  int size() const { return base_.size(); }
  int op1(int a) const { return op1_[a]; }
  int op2(int a) const { return op2_[a]; }
  int binop(int a, int b) const { return binop_[a * size() + b]; }
  const std::vector<int>& op1_table() const { return op1_; }
  const std::vector<int>& op2_table() const { return op2_; }
  const std::vector<int>& binop_table() const { return binop_; }

  int apply(Op op, int a, int b) const {
    switch (op) {
      case Op::top: return base_.top();
      case Op::bot: return base_.bottom();
      case Op::conj: return base_.meet(a, b);
      case Op::disj: return base_.join(a, b);
      case Op::imp: return base_.imp(a, b);
      case Op::box:
      case Op::tri: return op1_[a];
      case Op::dia: return op2_[a];
      case Op::sto: return binop_[a * size() + b];
      case Op::letter: break;
    }
    throw Error("cannot apply a letter");
  }

  bool operator==(const ModalAlgebra& o) const {
    return kind_ == o.kind_ && base_.meet_table() == o.base_.meet_table() && base_.join_table() == o.base_.join_table() &&
           base_.imp_table() == o.base_.imp_table() && op1_ == o.op1_ && op2_ == o.op2_ && binop_ == o.binop_;
  }

 private:
  void validate() const {
    const int n = size();
    auto in_range = [&](const std::vector<int>& t, std::size_t len, const char* name) {
      if (t.size() != len) throw AlgebraError(std::string(name) + " table has the wrong length");
      for (int v : t)
        if (v < 0 || v >= n) throw AlgebraError(std::string(name) + " table has an out-of-range entry");
    };
    const auto un = static_cast<std::size_t>(n);
    switch (kind_) {
      case Kind::box:
        in_range(op1_, un, "box");
        if (op1_[base_.top()] != base_.top()) throw AlgebraError("box does not preserve top");
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            if (base_.meet(op1_[a], op1_[b]) != op1_[base_.meet(a, b)])
              throw AlgebraError("box does not preserve the meet of elements " + std::to_string(a) + " and " +
                                 std::to_string(b));
        break;
      case Kind::im:
        in_range(op1_, un, "tri");
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            if (base_.leq(a, b) && !base_.leq(op1_[a], op1_[b]))
              throw AlgebraError("tri is not monotone at elements " + std::to_string(a) + " <= " + std::to_string(b));
        break;
      case Kind::cin:
        in_range(op1_, un, "box");
        in_range(op2_, un, "dia");
        break;
      case Kind::si: in_range(binop_, un * un, "strict implication"); break;
    }
  }

  Kind kind_ = Kind::box;
  FinHA base_;
  std::vector<int> op1_, op2_, binop_;
};

/// The complex algebra: upsets of the base with the frame's operators.
inline ModalAlgebra complex_algebra(const Frame& x, const Caps& caps = {}) {
  FinHA up = up_algebra(x.base, caps);
  const int n = up.size();
  FrameEvaluator ev(x);
  const auto& lab = up.labels();
  auto idx = [&](Mask m) {
    const int i = up.index_of_label(m);
    if (i < 0) throw InvariantViolation("operator result " + mask_to_string(m) + " is not an upset");
    return i;
  };
  std::vector<int> op1, op2, binop;
  switch (x.kind) {
    case Kind::box:
    case Kind::im:
      for (int a = 0; a < n; ++a) op1.push_back(idx(ev.modal(x.kind == Kind::box ? Op::box : Op::tri, lab[a])));
      break;
    case Kind::cin:
      for (int a = 0; a < n; ++a) {
        op1.push_back(idx(ev.modal(Op::box, lab[a])));
        op2.push_back(idx(ev.modal(Op::dia, lab[a])));
      }
      break;
    case Kind::si:
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) binop.push_back(idx(ev.modal(Op::sto, lab[a], lab[b])));
      break;
  }
  return ModalAlgebra::make(x.kind, std::move(up), std::move(op1), std::move(op2), std::move(binop));
}

/// Letters to algebra elements.
using Assignment = std::map<std::string, int>;

inline void evaluate_table(const FormulaTable& t, const ModalAlgebra& a, const std::vector<int>& letter_values,
                           std::vector<int>& out) {
  out.resize(t.entries.size());
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    out[i] = e.op == Op::letter ? letter_values[e.letter]
                                : a.apply(e.op, e.left >= 0 ? out[e.left] : 0, e.right >= 0 ? out[e.right] : 0);
  }
}

inline int algebra_eval(const ModalAlgebra& a, const Formula& phi, const Assignment& asg) {
  check_signature(phi, a.kind());
  FormulaTable t;
  const int root = t.add(phi);
  std::vector<int> vals;
  for (const auto& name : t.letter_names) {
    auto it = asg.find(name);
    if (it == asg.end()) throw MissingLetterError(name);
    if (it->second < 0 || it->second >= a.size()) throw Error("assignment of '" + name + "' is out of range");
    vals.push_back(it->second);
  }
  std::vector<int> out;
  evaluate_table(t, a, vals, out);
  return out[root];
}

/// Calls fn(values) for every assignment of k letters; first letter slowest.
template <class Fn>
void for_each_assignment(int n, std::size_t k, Fn&& fn) {
  std::vector<int> vals(k, 0);
  while (true) {
    if (!fn(static_cast<const std::vector<int>&>(vals))) return;
    std::size_t i = k;
    while (true) {
      if (i == 0) return;
      --i;
      if (++vals[i] < n) break;
      vals[i] = 0;
    }
  }
}

struct AlgebraValidity {
  bool valid = true;
  std::optional<Assignment> counterexample;
  std::uint64_t assignments_checked = 0;
};

inline AlgebraValidity algebra_validates(const ModalAlgebra& a, const Formula& phi, const Caps& caps = {}) {
  check_signature(phi, a.kind());
  FormulaTable t;
  const int root = t.add(phi);
  valuation_count(static_cast<std::size_t>(a.size()), t.letter_names.size(), caps, caps.max_assignments);
  AlgebraValidity res;
  std::vector<int> out;
  for_each_assignment(a.size(), t.letter_names.size(), [&](const std::vector<int>& vals) {
    ++res.assignments_checked;
    evaluate_table(t, a, vals, out);
    if (out[root] == a.base().top()) return true;
    res.valid = false;
    Assignment asg;
    for (std::size_t i = 0; i < vals.size(); ++i) asg[t.letter_names[i]] = vals[i];
    res.counterexample = std::move(asg);
    return false;
  });
  return res;
}

/// Validity of every table entry in one pass over all assignments.
inline std::vector<bool> algebra_validity_vector(const ModalAlgebra& a, const FormulaTable& t, const Caps& caps = {}) {
  valuation_count(static_cast<std::size_t>(a.size()), t.letter_names.size(), caps, caps.max_assignments);
  std::vector<bool> valid(t.entries.size(), true);
  std::vector<int> out;
  for_each_assignment(a.size(), t.letter_names.size(), [&](const std::vector<int>& vals) {
    evaluate_table(t, a, vals, out);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i] != a.base().top()) valid[i] = false;
    return true;
  });
  return valid;
}

/// Restriction of an algebra to a subset closed under every operation;
/// `members` lists the chosen elements in increasing order.
inline ModalAlgebra restrict_algebra(const ModalAlgebra& a, const std::vector<int>& members) {
  const int m = static_cast<int>(members.size());
  std::vector<int> local(a.size(), -1);
  for (int i = 0; i < m; ++i) local[members[i]] = i;
  auto at = [&](int v) {
    if (local[v] < 0) throw AlgebraError("subset is not closed under the operations");
    return local[v];
  };
  std::vector<int> meet(static_cast<std::size_t>(m) * m), join(meet.size()), imp(meet.size()), binop;
  std::vector<int> op1, op2;
  const auto& b = a.base();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      meet[i * m + j] = at(b.meet(members[i], members[j]));
      join[i * m + j] = at(b.join(members[i], members[j]));
      imp[i * m + j] = at(b.imp(members[i], members[j]));
      if (a.kind() == Kind::si) binop.push_back(at(a.binop(members[i], members[j])));
    }
  for (int i = 0; i < m; ++i) {
    if (a.kind() != Kind::si) op1.push_back(at(a.op1(members[i])));
    if (a.kind() == Kind::cin) op2.push_back(at(a.op2(members[i])));
  }
  auto lattice = FinDL::from_tables(m, std::move(meet), std::move(join), at(b.top()), at(b.bottom()));
  return ModalAlgebra::make(a.kind(), FinHA::from_tables(std::move(lattice), std::move(imp)), std::move(op1),
                            std::move(op2), std::move(binop));
}

inline bool is_closed_subset(const ModalAlgebra& a, const std::vector<bool>& in) {
  const auto& b = a.base();
  if (!in[b.top()] || !in[b.bottom()]) return false;
  for (int x = 0; x < a.size(); ++x) {
    if (!in[x]) continue;
    if (a.kind() == Kind::box || a.kind() == Kind::im || a.kind() == Kind::cin)
      if (!in[a.op1(x)]) return false;
    if (a.kind() == Kind::cin && !in[a.op2(x)]) return false;
    for (int y = 0; y < a.size(); ++y) {
      if (!in[y]) continue;
      if (!in[b.meet(x, y)] || !in[b.join(x, y)] || !in[b.imp(x, y)]) return false;
      if (a.kind() == Kind::si && !in[a.binop(x, y)]) return false;
    }
  }
  return true;
}

struct SubAlgebra {
  ModalAlgebra algebra;
  std::vector<int> embedding;  // element i of the subalgebra is embedding[i] in the parent
};

/// Every subset closed under ⊤, ⊥, ∧, ∨, → and the operators.
inline std::vector<SubAlgebra> subalgebras(const ModalAlgebra& a, const Caps& caps = {}) {
  if (a.size() > caps.max_subalgebra_scan)
    throw SizeGuard("subalgebra scan", static_cast<std::uint64_t>(a.size()),
                    static_cast<std::uint64_t>(caps.max_subalgebra_scan));
  std::vector<SubAlgebra> out;
  const std::uint64_t total = std::uint64_t{1} << a.size();
  std::vector<bool> in(a.size());
  for (std::uint64_t m = 0; m < total; ++m) {
    std::vector<int> members;
    for (int i = 0; i < a.size(); ++i) {
      in[i] = ((m >> i) & 1u) != 0;
      if (in[i]) members.push_back(i);
    }
    if (!is_closed_subset(a, in)) continue;
    out.push_back({restrict_algebra(a, members), members});
  }
  return out;
}

/// Componentwise product; element (x, y) has index x * |B| + y.
inline ModalAlgebra product(const ModalAlgebra& a, const ModalAlgebra& b) {
  if (a.kind() != b.kind()) throw KindMismatch("product of " + to_string(a.kind()) + " and " + to_string(b.kind()) + " algebras");
  const int na = a.size(), nb = b.size(), n = na * nb;
  auto pair = [&](int x, int y) { return x * nb + y; };
  std::vector<int> meet(static_cast<std::size_t>(n) * n), join(meet.size()), imp(meet.size()), binop;
  std::vector<int> op1, op2;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      const int ux = u / nb, uy = u % nb, vx = v / nb, vy = v % nb;
      meet[u * n + v] = pair(a.base().meet(ux, vx), b.base().meet(uy, vy));
      join[u * n + v] = pair(a.base().join(ux, vx), b.base().join(uy, vy));
      imp[u * n + v] = pair(a.base().imp(ux, vx), b.base().imp(uy, vy));
      if (a.kind() == Kind::si) binop.push_back(pair(a.binop(ux, vx), b.binop(uy, vy)));
    }
  for (int u = 0; u < n; ++u) {
    if (a.kind() != Kind::si) op1.push_back(pair(a.op1(u / nb), b.op1(u % nb)));
    if (a.kind() == Kind::cin) op2.push_back(pair(a.op2(u / nb), b.op2(u % nb)));
  }
  auto lattice = FinDL::from_tables(n, std::move(meet), std::move(join), pair(a.base().top(), b.base().top()),
                                    pair(a.base().bottom(), b.base().bottom()));
  return ModalAlgebra::make(a.kind(), FinHA::from_tables(std::move(lattice), std::move(imp)), std::move(op1),
                            std::move(op2), std::move(binop));
}

/// h preserves ⊤, ⊥, ∧, ∨, → and every operator table.
inline MorphismCheck check_modal_homomorphism(const std::vector<int>& h, const ModalAlgebra& a, const ModalAlgebra& b) {
  auto fail = [](std::string w) { return MorphismCheck{false, std::move(w)}; };
  if (a.kind() != b.kind()) throw KindMismatch("homomorphism between different signatures");
  if (static_cast<int>(h.size()) != a.size()) return fail("map is not total");
  for (int v : h)
    if (v < 0 || v >= b.size()) return fail("map leaves the codomain");
  const auto &ab = a.base(), &bb = b.base();
  if (h[ab.top()] != bb.top()) return fail("top is not preserved");
  if (h[ab.bottom()] != bb.bottom()) return fail("bottom is not preserved");
  const std::string e = "element ";
  for (int x = 0; x < a.size(); ++x) {
    if (a.kind() != Kind::si && h[a.op1(x)] != b.op1(h[x]))
      return fail(e + std::to_string(x) + ": first operator is not preserved");
    if (a.kind() == Kind::cin && h[a.op2(x)] != b.op2(h[x]))
      return fail(e + std::to_string(x) + ": diamond is not preserved");
    for (int y = 0; y < a.size(); ++y) {
      const std::string at = "elements " + std::to_string(x) + "," + std::to_string(y);
      if (h[ab.meet(x, y)] != bb.meet(h[x], h[y])) return fail(at + ": meet is not preserved");
      if (h[ab.join(x, y)] != bb.join(h[x], h[y])) return fail(at + ": join is not preserved");
      if (h[ab.imp(x, y)] != bb.imp(h[x], h[y])) return fail(at + ": implication is not preserved");
      if (a.kind() == Kind::si && h[a.binop(x, y)] != b.binop(h[x], h[y]))
        return fail(at + ": strict implication is not preserved");
    }
  }
  return {};
}

namespace detail {
/// Backtracking search over maps A -> B that are modal homomorphisms. Every
/// constraint is checked as soon as all elements it mentions are assigned.
template <class Fn>
void search_homomorphisms(const ModalAlgebra& a, const ModalAlgebra& b, bool surjective, Budget& budget, Fn&& on_found) {
  const int n = a.size(), m = b.size();
  const auto &ab = a.base(), &bb = b.base();
  std::vector<int> h(n, -1);
  bool stop = false;
  // Checks each constraint whose elements are all assigned and one of which is k.
  auto consistent = [&](int k) {
    auto check = [&](int x, int y, int r, int img) { return r > k || (x != k && y != k && r != k) || h[r] == img; };
    for (int x = 0; x <= k; ++x) {
      if (a.kind() != Kind::si && !check(x, x, a.op1(x), b.op1(h[x]))) return false;
      if (a.kind() == Kind::cin && !check(x, x, a.op2(x), b.op2(h[x]))) return false;
      for (int y = 0; y <= k; ++y) {
        if (!check(x, y, ab.meet(x, y), bb.meet(h[x], h[y]))) return false;
        if (!check(x, y, ab.join(x, y), bb.join(h[x], h[y]))) return false;
        if (!check(x, y, ab.imp(x, y), bb.imp(h[x], h[y]))) return false;
        if (a.kind() == Kind::si && !check(x, y, a.binop(x, y), b.binop(h[x], h[y]))) return false;
      }
    }
    return true;
  };
  auto rec = [&](auto& self, int k) -> void {
    if (stop) return;
    if (k == n) {
      if (surjective) {
        std::vector<bool> hit(m, false);
        for (int v : h) hit[v] = true;
        for (bool t : hit)
          if (!t) return;
      }
      if (!on_found(static_cast<const std::vector<int>&>(h))) stop = true;
      return;
    }
    int lo = 0, hi = m - 1;
    if (k == ab.top()) lo = hi = bb.top();
    if (k == ab.bottom()) lo = hi = bb.bottom();
    for (int v = lo; v <= hi && !stop; ++v) {
      if (!budget.spend()) {
        stop = true;
        return;
      }
      h[k] = v;
      if (consistent(k)) self(self, k + 1);
      h[k] = -1;
    }
  };
  rec(rec, 0);
}
}  // namespace detail

/// All modal homomorphisms A -> B (surjective ones if asked), lexicographic.
inline std::vector<std::vector<int>> modal_homomorphisms(const ModalAlgebra& a, const ModalAlgebra& b, bool surjective,
                                                         Budget& budget) {
  if (a.kind() != b.kind()) throw KindMismatch("homomorphisms between different signatures");
  std::vector<std::vector<int>> out;
  detail::search_homomorphisms(a, b, surjective, budget, [&](const std::vector<int>& h) {
    out.push_back(h);
    return true;
  });
  return out;
}

struct HomImageResult {
  bool found = false;
  std::vector<int> witness;
  bool complete = true;  // false if the budget ran out first
};

/// Is B a homomorphic image of A? Searches surjective maps with pruning.
inline HomImageResult is_homomorphic_image(const ModalAlgebra& a, const ModalAlgebra& b, const Caps& caps = {}) {
  if (a.kind() != b.kind()) throw KindMismatch("homomorphic image across signatures");
  HomImageResult res;
  Budget budget{caps.max_maps};
  detail::search_homomorphisms(a, b, true, budget, [&](const std::vector<int>& h) {
    res.found = true;
    res.witness = h;
    return false;
  });
  res.complete = res.found || !budget.exhausted;
  return res;
}

struct Quotient {
  ModalAlgebra algebra;
  std::vector<int> projection;  // A -> quotient
};

/// Homomorphic images of A, one per congruence: the Heyting congruences are
/// those of the filters ↑c; each is kept when it is compatible with the
/// operators.
inline std::vector<Quotient> homomorphic_images(const ModalAlgebra& a) {
  const auto& b = a.base();
  const int n = a.size();
  std::vector<Quotient> out;
  for (int c = 0; c < n; ++c) {
    // x ~ y iff c <= (x <-> y)
    std::vector<int> cls(n, -1);
    std::vector<int> reps;
    for (int x = 0; x < n; ++x) {
      if (cls[x] >= 0) continue;
      cls[x] = static_cast<int>(reps.size());
      for (int y = x + 1; y < n; ++y)
        if (b.leq(c, b.meet(b.imp(x, y), b.imp(y, x)))) cls[y] = cls[x];
      reps.push_back(x);
    }
    bool compatible = true;
    for (int x = 0; x < n && compatible; ++x)
      for (int y = 0; y < n && compatible; ++y) {
        if (cls[x] != cls[y]) continue;
        if (a.kind() != Kind::si && cls[a.op1(x)] != cls[a.op1(y)]) compatible = false;
        if (a.kind() == Kind::cin && cls[a.op2(x)] != cls[a.op2(y)]) compatible = false;
        if (a.kind() == Kind::si)
          for (int z = 0; z < n && compatible; ++z)
            if (cls[a.binop(x, z)] != cls[a.binop(y, z)] || cls[a.binop(z, x)] != cls[a.binop(z, y)]) compatible = false;
      }
    if (!compatible) continue;
    const int m = static_cast<int>(reps.size());
    std::vector<int> meet(static_cast<std::size_t>(m) * m), join(meet.size()), imp(meet.size()), binop, op1, op2;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        meet[i * m + j] = cls[b.meet(reps[i], reps[j])];
        join[i * m + j] = cls[b.join(reps[i], reps[j])];
        imp[i * m + j] = cls[b.imp(reps[i], reps[j])];
        if (a.kind() == Kind::si) binop.push_back(cls[a.binop(reps[i], reps[j])]);
      }
    for (int i = 0; i < m; ++i) {
      if (a.kind() != Kind::si) op1.push_back(cls[a.op1(reps[i])]);
      if (a.kind() == Kind::cin) op2.push_back(cls[a.op2(reps[i])]);
    }
    auto lattice = FinDL::from_tables(m, std::move(meet), std::move(join), cls[b.top()], cls[b.bottom()]);
    out.push_back({ModalAlgebra::make(a.kind(), FinHA::from_tables(std::move(lattice), std::move(imp)), std::move(op1),
                                      std::move(op2), std::move(binop)),
                   cls});
  }
  return out;
}

}  // namespace gtw
