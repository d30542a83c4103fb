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
#include "gtw/kind.hpp"
#include "gtw/order.hpp"

namespace gtw {

/// A finite frame of one of the four kinds over a poset.
///
/// box, si: `rel[x]` is the successor set R[x].
/// im: `nbhd[x]` is the neighbourhood family N(x), a Family over upset masks.
/// cin: `nbox[x]`, `ndia[x]` are the two families over arbitrary subsets.
/// Families need at most kMaxFamilyStates states.
struct Frame {
  Kind kind = Kind::box;
  Poset base;
  std::vector<Mask> rel;
  std::vector<Family> nbhd;
  std::vector<Family> nbox, ndia;

  Frame() = default;
  Frame(Kind k, Poset p) : kind(k), base(std::move(p)) {}

  int size() const { return base.size(); }
  bool operator==(const Frame&) const = default;

  static Frame box(Poset p, std::vector<Mask> r) {
    Frame f{Kind::box, std::move(p)};
    f.rel = std::move(r);
    return f;
  }
  static Frame si(Poset p, std::vector<Mask> r) {
    Frame f{Kind::si, std::move(p)};
    f.rel = std::move(r);
    return f;
  }
  static Frame im(Poset p, std::vector<Family> n) {
    Frame f{Kind::im, std::move(p)};
    f.nbhd = std::move(n);
    return f;
  }
  static Frame cin(Poset p, std::vector<Family> nb, std::vector<Family> nd) {
    Frame f{Kind::cin, std::move(p)};
    f.nbox = std::move(nb);
    f.ndia = std::move(nd);
    return f;
  }
};

inline std::string mask_to_string(Mask m) {
  std::string s = "{";
  bool first = true;
  for_each_bit(m, [&](int i) {
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  });
  return s + "}";
}

inline Mask relation_from_pairs_row(const std::vector<std::pair<int, int>>& pairs, int x) {
  Mask m = 0;
  for (auto [a, b] : pairs)
    if (a == x) m |= bit(b);
  return m;
}

namespace detail {
inline std::string triple(int a, int b, int c) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
}

inline void check_family_shape(const std::vector<Family>& fam, int n, const char* name) {
  if (static_cast<int>(fam.size()) != n)
    throw FrameConditionError(std::string(name) + " shape", "expected one family per state");
  if (n > kMaxFamilyStates)
    throw SizeGuard(std::string(name) + " families", static_cast<std::uint64_t>(n), kMaxFamilyStates);
  const int subsets = 1 << n;
  for (int x = 0; x < n; ++x)
    if (subsets < 64 && (fam[x] >> subsets) != 0)
      throw FrameConditionError(std::string(name) + " shape",
                                "state " + std::to_string(x) + " has a member outside the carrier");
}
}  // namespace detail

/// Checks the kind's structural condition; returns the frame unchanged or
/// throws FrameConditionError naming the condition and a witness.
inline const Frame& validate_frame(const Frame& f) {
  const Poset& p = f.base;
  const int n = p.size();
  switch (f.kind) {
    case Kind::box:
    case Kind::si: {
      if (static_cast<int>(f.rel.size()) != n)
        throw FrameConditionError("relation shape", "expected one successor set per state");
      for (int x = 0; x < n; ++x)
        if (!subset_of(f.rel[x], p.all()))
          throw FrameConditionError("relation shape", "state " + std::to_string(x) + " has an out-of-range successor");
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < n; ++z) {
            if (p.leq(x, y) && has(f.rel[y], z) && !has(f.rel[x], z))
              throw FrameConditionError(f.kind == Kind::box ? "(<= o R o <=) = R" : "x <= y R z implies x R z",
                                        detail::triple(x, y, z) + ": " + std::to_string(x) + "<=" + std::to_string(y) +
                                            " R " + std::to_string(z) + " requires " + std::to_string(x) + " R " +
                                            std::to_string(z));
            if (f.kind == Kind::box && has(f.rel[x], y) && p.leq(y, z) && !has(f.rel[x], z))
              throw FrameConditionError("(<= o R o <=) = R",
                                        detail::triple(x, y, z) + ": " + std::to_string(x) + " R " + std::to_string(y) +
                                            "<=" + std::to_string(z) + " requires " + std::to_string(x) + " R " +
                                            std::to_string(z));
          }
      return f;
    }
    case Kind::im: {
      detail::check_family_shape(f.nbhd, n, "nbhd");
      const int subsets = 1 << n;
      for (int x = 0; x < n; ++x)
        for (int s = 0; s < subsets; ++s) {
          if (!family_has(f.nbhd[x], static_cast<Mask>(s))) continue;
          if (!p.is_upset(static_cast<Mask>(s)))
            throw FrameConditionError("N(x) contains only upsets",
                                      "state " + std::to_string(x) + ", member " + mask_to_string(static_cast<Mask>(s)));
          for (int t = 0; t < subsets; ++t)
            if (subset_of(static_cast<Mask>(s), static_cast<Mask>(t)) && p.is_upset(static_cast<Mask>(t)) &&
                !family_has(f.nbhd[x], static_cast<Mask>(t)))
              throw FrameConditionError("N(x) closed under upset supersets",
                                        "state " + std::to_string(x) + ": " + mask_to_string(static_cast<Mask>(s)) +
                                            " in N(x) but " + mask_to_string(static_cast<Mask>(t)) + " is not");
        }
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (p.leq(x, y) && !subset_of(f.nbhd[x], f.nbhd[y]))
            throw FrameConditionError("x <= y implies N(x) subset of N(y)",
                                      "(" + std::to_string(x) + "," + std::to_string(y) + "): " +
                                          mask_to_string(static_cast<Mask>(std::countr_zero(f.nbhd[x] & ~f.nbhd[y]))) +
                                          " is missing at " + std::to_string(y));
      return f;
    }
    case Kind::cin: {
      detail::check_family_shape(f.nbox, n, "nbox");
      detail::check_family_shape(f.ndia, n, "ndia");
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          if (!p.leq(x, y)) continue;
          const std::string pair = "(" + std::to_string(x) + "," + std::to_string(y) + "): ";
          if (!subset_of(f.nbox[x], f.nbox[y]))
            throw FrameConditionError(
                "x <= y implies Nbox(x) subset of Nbox(y)",
                pair + mask_to_string(static_cast<Mask>(std::countr_zero(f.nbox[x] & ~f.nbox[y]))) + " is missing at " +
                    std::to_string(y));
          if (!subset_of(f.ndia[y], f.ndia[x]))
            throw FrameConditionError(
                "x <= y implies Ndia(x) superset of Ndia(y)",
                pair + mask_to_string(static_cast<Mask>(std::countr_zero(f.ndia[y] & ~f.ndia[x]))) + " is missing at " +
                    std::to_string(x));
        }
      return f;
    }
  }
  return f;
}

inline bool is_valid_frame(const Frame& f) {
  try {
    validate_frame(f);
    return true;
  } catch (const FrameConditionError&) {
    return false;
  }
}

/// The value of the structure map at a state, an element of T(base).
struct TValue {
  Mask set = 0;       // box, si
  Family first = 0;   // im: N(x); cin: Nbox(x)
  Family second = 0;  // cin: Ndia(x)
  auto operator<=>(const TValue&) const = default;
};

inline TValue structure_at(const Frame& f, int x) {
  switch (f.kind) {
    case Kind::box:
    case Kind::si: return {f.rel[x], 0, 0};
    case Kind::im: return {0, f.nbhd[x], 0};
    case Kind::cin: return {0, f.nbox[x], f.ndia[x]};
  }
  return {};
}

/// Membership of a structure value in the predicate lifting of `op` at
/// arguments a (and b for the binary modality); `carrier` is the full state set.
inline bool lifting_contains(Kind kind, Op op, Mask carrier, const TValue& v, Mask a, Mask b = 0) {
  switch (op) {
    case Op::box: return kind == Kind::box ? subset_of(v.set, a) : family_has(v.first, a);
    case Op::tri: return family_has(v.first, a);
    case Op::dia: return !family_has(v.second, carrier & ~a);
    case Op::sto: return subset_of(v.set & a, b);
    default: throw Error("not a modal operator");
  }
}

/// Bulk evaluator for one frame: modal and implication operators on upsets.
class FrameEvaluator {
 public:
  explicit FrameEvaluator(const Frame& f) : f_(&f), all_(f.base.all()) {}

  const Frame& frame() const { return *f_; }

  Mask imp(Mask a, Mask b) const {
    Mask r = 0;
    for (int x = 0; x < f_->size(); ++x)
      if (subset_of(f_->base.up(x) & a, b)) r |= bit(x);
    return r;
  }

  Mask modal(Op op, Mask a, Mask b = 0) const {
    Mask r = 0;
    const int n = f_->size();
    switch (op) {
      case Op::box:
        if (f_->kind == Kind::box) {
          for (int x = 0; x < n; ++x)
            if (subset_of(f_->rel[x], a)) r |= bit(x);
        } else {
          for (int x = 0; x < n; ++x)
            if (family_has(f_->nbox[x], a)) r |= bit(x);
        }
        return r;
      case Op::dia:
        for (int x = 0; x < n; ++x)
          if (!family_has(f_->ndia[x], all_ & ~a)) r |= bit(x);
        return r;
      case Op::tri:
        for (int x = 0; x < n; ++x)
          if (family_has(f_->nbhd[x], a)) r |= bit(x);
        return r;
      case Op::sto:
        for (int x = 0; x < n; ++x)
          if (subset_of(f_->rel[x] & a, b)) r |= bit(x);
        return r;
      default: throw Error("not a modal operator");
    }
  }

  Mask apply(Op op, Mask a, Mask b) const {
    switch (op) {
      case Op::top: return all_;
      case Op::bot: return 0;
      case Op::conj: return a & b;
      case Op::disj: return a | b;
      case Op::imp: return imp(a, b);
      default: return modal(op, a, b);
    }
  }

  /// Truth sets of every table entry under the given letter values
  /// (indexed like table.letter_names).
  void evaluate(const FormulaTable& t, const std::vector<Mask>& letter_values, std::vector<Mask>& out) const {
    out.resize(t.entries.size());
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
      const auto& e = t.entries[i];
      if (e.op == Op::letter) {
        out[i] = letter_values[e.letter];
      } else {
        out[i] = apply(e.op, e.left >= 0 ? out[e.left] : 0, e.right >= 0 ? out[e.right] : 0);
      }
    }
  }

 private:
  const Frame* f_;
  Mask all_;
};

/// Letters to upsets of the base poset.
using Valuation = std::map<std::string, Mask>;

struct Model {
  Frame frame;
  Valuation valuation;
};

inline void validate_valuation(const Poset& p, const Valuation& v) {
  for (const auto& [name, m] : v)
    if (!p.is_upset(m)) throw Error("valuation of '" + name + "' is not an upset: " + mask_to_string(m));
}

inline std::vector<Mask> letter_values(const FormulaTable& t, const Valuation& v) {
  std::vector<Mask> vals(t.letter_names.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    auto it = v.find(t.letter_names[i]);
    if (it == v.end()) throw MissingLetterError(t.letter_names[i]);
    vals[i] = it->second;
  }
  return vals;
}

/// ⟦φ⟧ in the model.
inline Mask truth_set(const Model& m, const Formula& phi) {
  check_signature(phi, m.frame.kind);
  FormulaTable t;
  const int root = t.add(phi);
  std::vector<Mask> out;
  FrameEvaluator(m.frame).evaluate(t, letter_values(t, m.valuation), out);
  return out[root];
}

inline bool satisfies(const Model& m, int x, const Formula& phi) { return has(truth_set(m, phi), x); }

/// Calls fn(values) for every assignment of upsets to k letters; the first
/// letter varies slowest, upsets in ascending order. Stops when fn returns false.
template <class Fn>
void for_each_valuation(const std::vector<Mask>& ups, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k, 0);
  std::vector<Mask> vals(k, ups.front());
  while (true) {
    if (!fn(static_cast<const std::vector<Mask>&>(vals))) return;
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (++idx[i] < ups.size()) {
        vals[i] = ups[idx[i]];
        break;
      }
      idx[i] = 0;
      vals[i] = ups[0];
      if (i == 0) return;
    }
    if (k == 0) return;
  }
}

inline std::uint64_t valuation_count(std::size_t upset_count, std::size_t letters, const Caps& caps,
                                     std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < letters; ++i) {
    total *= upset_count;
    if (total > cap) throw SizeGuard("valuations", total, cap);
  }
  (void)caps;
  return total;
}

struct ValidityResult {
  bool valid = true;
  std::optional<Valuation> counterexample;  // first failing valuation in canonical order
  int state = -1;                           // least state refuting φ under it
  std::uint64_t valuations_checked = 0;
};

inline ValidityResult frame_validates(const Frame& f, const Formula& phi, const Caps& caps = {}) {
  check_signature(phi, f.kind);
  FormulaTable t;
  const int root = t.add(phi);
  const auto ups = upsets(f.base, caps);
  valuation_count(ups.size(), t.letter_names.size(), caps, caps.max_valuations);
  FrameEvaluator ev(f);
  ValidityResult res;
  std::vector<Mask> out;
  for_each_valuation(ups, t.letter_names.size(), [&](const std::vector<Mask>& vals) {
    ++res.valuations_checked;
    ev.evaluate(t, vals, out);
    if (out[root] == f.base.all()) return true;
    res.valid = false;
    Valuation v;
    for (std::size_t i = 0; i < vals.size(); ++i) v[t.letter_names[i]] = vals[i];
    res.counterexample = std::move(v);
    res.state = std::countr_zero(f.base.all() & ~out[root]);
    return false;
  });
  return res;
}

/// For every entry of the table: is it valid on the frame? One pass over all
/// valuations of the table's letters.
inline std::vector<bool> frame_validity_vector(const Frame& f, const FormulaTable& t, const Caps& caps = {}) {
  const auto ups = upsets(f.base, caps);
  valuation_count(ups.size(), t.letter_names.size(), caps, caps.max_valuations);
  FrameEvaluator ev(f);
  std::vector<bool> valid(t.entries.size(), true);
  std::vector<Mask> out;
  const Mask all = f.base.all();
  for_each_valuation(ups, t.letter_names.size(), [&](const std::vector<Mask>& vals) {
    ev.evaluate(t, vals, out);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i] != all) valid[i] = false;
    return true;
  });
  return valid;
}

inline bool frame_validates_all(const Frame& f, const std::vector<Formula>& phis, const Caps& caps = {}) {
  for (const auto& phi : phis) check_signature(phi, f.kind);
  auto t = table_of(phis);
  const auto ups = upsets(f.base, caps);
  valuation_count(ups.size(), t.letter_names.size(), caps, caps.max_valuations);
  std::vector<int> roots;
  for (const auto& phi : phis) roots.push_back(t.add(phi));
  FrameEvaluator ev(f);
  std::vector<Mask> out;
  bool ok = true;
  for_each_valuation(ups, t.letter_names.size(), [&](const std::vector<Mask>& vals) {
    ev.evaluate(t, vals, out);
    for (int r : roots)
      if (out[r] != f.base.all()) return ok = false;
    return true;
  });
  return ok;
}

}  // namespace gtw
