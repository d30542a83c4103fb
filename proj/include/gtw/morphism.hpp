#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "gtw/bits.hpp"
#include "gtw/caps.hpp"
#include "gtw/error.hpp"
#include "gtw/frame.hpp"
#include "gtw/order.hpp"

namespace gtw {

/// Relabel every member of a family of subsets through a bijection.
inline Family relabel_family(Family w, const StateMap& perm) {
  Family out = 0;
  for_each_bit(w, [&](int s) { out |= family_bit(image(perm, static_cast<Mask>(s))); });
  return out;
}

/// T f applied to a structure value over dom f.
///   box:  a ↦ f[a]            si:  ℘f, a ↦ f[a]
///   im:   W ↦ {a' ∈ Up(cod) | f⁻¹(a') ∈ W}
///   cin:  the same formula over all subsets, on both families
inline TValue functor_action(Kind kind, const StateMap& f, const Poset& cod, const TValue& v) {
  TValue out;
  switch (kind) {
    case Kind::box:
    case Kind::si: out.set = image(f, v.set); return out;
    case Kind::im:
    case Kind::cin: {
      if (cod.size() > kMaxFamilyStates)
        throw SizeGuard("neighbourhood functor", static_cast<std::uint64_t>(cod.size()), kMaxFamilyStates);
      const Mask subsets = Mask{1} << cod.size();
      for (Mask a = 0; a < subsets; ++a) {
        if (kind == Kind::im && !cod.is_upset(a)) continue;
        const Mask pre = preimage(f, a);
        if (family_has(v.first, pre)) out.first |= family_bit(a);
        if (kind == Kind::cin && family_has(v.second, pre)) out.second |= family_bit(a);
      }
      return out;
    }
  }
  return out;
}

struct MorphismCheck {
  bool ok = true;
  std::string witness;  // empty when ok
  explicit operator bool() const { return ok; }
};

namespace detail {
inline MorphismCheck fail(std::string w) { return {false, std::move(w)}; }

/// The kind's own morphism conditions, stated pointwise.
inline MorphismCheck kind_morphism_conditions(const StateMap& f, const Frame& x, const Frame& y) {
  const int n = x.size();
  if (!is_total_map(f, x.base, y.base)) return fail("map is not total on the domain");
  if (!is_monotone(f, x.base, y.base)) return fail("map is not monotone");
  if (!is_p_morphism(f, x.base, y.base)) return fail("map fails the back condition for the order");
  switch (x.kind) {
    case Kind::box:
    case Kind::si:
      for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t)
          if (has(x.rel[s], t) && !has(y.rel[f[s]], f[t]))
            return fail("forth fails: " + std::to_string(s) + " R " + std::to_string(t) + " but not f(" +
                        std::to_string(s) + ") R f(" + std::to_string(t) + ")");
        const Mask img = image(f, x.rel[s]);
        if (!subset_of(y.rel[f[s]], img))
          return fail("back fails at state " + std::to_string(s) + ": f(" + std::to_string(s) + ") R " +
                      std::to_string(std::countr_zero(y.rel[f[s]] & ~img)) + " has no preimage successor");
      }
      return {};
    case Kind::im:
    case Kind::cin: {
      const Mask subsets = Mask{1} << y.size();
      for (int s = 0; s < n; ++s)
        for (Mask a = 0; a < subsets; ++a) {
          if (x.kind == Kind::im && !y.base.is_upset(a)) continue;
          const Mask pre = preimage(f, a);
          const Family lhs1 = x.kind == Kind::im ? x.nbhd[s] : x.nbox[s];
          const Family rhs1 = x.kind == Kind::im ? y.nbhd[f[s]] : y.nbox[f[s]];
          if (family_has(lhs1, pre) != family_has(rhs1, a))
            return fail("state " + std::to_string(s) + ", set " + mask_to_string(a) + ": preimage " +
                        mask_to_string(pre) + (family_has(lhs1, pre) ? " in" : " not in") + " N(" +
                        std::to_string(s) + ") but set" + (family_has(rhs1, a) ? " in" : " not in") + " N(f(" +
                        std::to_string(s) + "))");
          if (x.kind == Kind::cin && family_has(x.ndia[s], pre) != family_has(y.ndia[f[s]], a))
            return fail("state " + std::to_string(s) + ", set " + mask_to_string(a) +
                        ": diamond neighbourhoods disagree on the preimage " + mask_to_string(pre));
        }
      return {};
    }
  }
  return {};
}
}  // namespace detail

/// f: x -> y is a morphism of frames. The pointwise conditions are
/// cross-checked against the square T f ∘ γ = γ' ∘ f.
inline MorphismCheck is_frame_morphism(const StateMap& f, const Frame& x, const Frame& y) {
  if (x.kind != y.kind) throw KindMismatch("morphism between " + to_string(x.kind) + " and " + to_string(y.kind) + " frames");
  auto res = detail::kind_morphism_conditions(f, x, y);
  if (is_total_map(f, x.base, y.base) && is_p_morphism(f, x.base, y.base)) {
    bool square = true;
    for (int s = 0; s < x.size() && square; ++s)
      square = functor_action(x.kind, f, y.base, structure_at(x, s)) == structure_at(y, f[s]);
    if (square != res.ok)
      throw InvariantViolation("morphism conditions and the dialgebra square disagree: " + res.witness);
  }
  return res;
}

inline bool is_frame_isomorphism(const StateMap& f, const Frame& x, const Frame& y) {
  return x.size() == y.size() && is_surjective(f, y.size()) && is_frame_morphism(f, x, y).ok;
}

/// The frame with state s renamed to perm[s].
inline Frame relabel_frame(const Frame& f, const StateMap& perm) {
  Frame out{f.kind, f.base.relabel(perm)};
  const int n = f.size();
  auto move_sets = [&](const std::vector<Mask>& in) {
    std::vector<Mask> r(n);
    for (int s = 0; s < n; ++s) r[perm[s]] = image(perm, in[s]);
    return r;
  };
  auto move_families = [&](const std::vector<Family>& in) {
    std::vector<Family> r(n);
    for (int s = 0; s < n; ++s) r[perm[s]] = relabel_family(in[s], perm);
    return r;
  };
  switch (f.kind) {
    case Kind::box:
    case Kind::si: out.rel = move_sets(f.rel); break;
    case Kind::im: out.nbhd = move_families(f.nbhd); break;
    case Kind::cin:
      out.nbox = move_families(f.nbox);
      out.ndia = move_families(f.ndia);
      break;
  }
  return out;
}

/// Structure words of a frame in state order; with the order code this
/// determines the frame.
inline std::vector<std::uint64_t> structure_code(const Frame& f) {
  std::vector<std::uint64_t> code;
  switch (f.kind) {
    case Kind::box:
    case Kind::si: code.assign(f.rel.begin(), f.rel.end()); break;
    case Kind::im: code.assign(f.nbhd.begin(), f.nbhd.end()); break;
    case Kind::cin:
      code.assign(f.nbox.begin(), f.nbox.end());
      code.insert(code.end(), f.ndia.begin(), f.ndia.end());
      break;
  }
  return code;
}

/// Isomorphism invariant that is complete: two frames are isomorphic iff
/// their certificates are equal.
struct Certificate {
  Kind kind = Kind::box;
  int size = 0;
  std::uint64_t order = 0;
  std::vector<std::uint64_t> structure;
  auto operator<=>(const Certificate&) const = default;
  bool operator==(const Certificate&) const = default;
};

/// Minimal order code, then the minimal structure code among the labellings
/// achieving it.
inline Certificate frame_certificate(const Frame& f) {
  Certificate c;
  c.kind = f.kind;
  c.size = f.size();
  const auto perms = canonical_labelings(f.base);
  c.order = order_code(f.base, perms.front());
  bool first = true;
  for (const auto& perm : perms) {
    auto code = structure_code(relabel_frame(f, perm));
    if (first || code < c.structure) c.structure = std::move(code);
    first = false;
  }
  return c;
}

/// Canonical representative of the isomorphism class.
inline Frame canonical_frame(const Frame& f) {
  const auto perms = canonical_labelings(f.base);
  std::optional<Frame> best;
  std::vector<std::uint64_t> best_code;
  for (const auto& perm : perms) {
    Frame g = relabel_frame(f, perm);
    auto code = structure_code(g);
    if (!best || code < best_code) {
      best_code = std::move(code);
      best = std::move(g);
    }
  }
  return *best;
}

inline bool are_isomorphic(const Frame& a, const Frame& b) {
  return a.kind == b.kind && a.size() == b.size() && frame_certificate(a) == frame_certificate(b);
}

struct FrameCoproduct {
  Frame frame;
  std::vector<StateMap> injections;
};

/// Coproduct of frames of one kind. Neighbourhoods follow the trace
/// condition: a ∈ N(x) iff a ∩ X_k ∈ N_k(x) for x in component k.
inline FrameCoproduct disjoint_union(const std::vector<Frame>& parts) {
  if (parts.empty()) throw Error("disjoint union of an empty list");
  const Kind kind = parts.front().kind;
  std::vector<Poset> bases;
  for (const auto& p : parts) {
    if (p.kind != kind) throw KindMismatch("disjoint union mixes " + to_string(kind) + " and " + to_string(p.kind));
    bases.push_back(p.base);
  }
  auto co = poset_coproduct(bases);
  const int n = co.poset.size();
  FrameCoproduct out{Frame{kind, co.poset}, co.injections};
  if (kind == Kind::box || kind == Kind::si) {
    out.frame.rel.assign(n, 0);
    for (std::size_t k = 0; k < parts.size(); ++k)
      for (int s = 0; s < parts[k].size(); ++s) out.frame.rel[co.injections[k][s]] = image(co.injections[k], parts[k].rel[s]);
    return out;
  }
  if (n > kMaxFamilyStates) throw SizeGuard("disjoint union of neighbourhood frames", static_cast<std::uint64_t>(n), kMaxFamilyStates);
  auto trace = [&](Family local, std::size_t k) {
    Family w = 0;
    for (Mask a = 0; a < (Mask{1} << n); ++a) {
      if (kind == Kind::im && !co.poset.is_upset(a)) continue;
      if (family_has(local, preimage(co.injections[k], a))) w |= family_bit(a);
    }
    return w;
  };
  std::vector<Family>& first = kind == Kind::im ? out.frame.nbhd : out.frame.nbox;
  first.assign(n, 0);
  if (kind == Kind::cin) out.frame.ndia.assign(n, 0);
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (int s = 0; s < parts[k].size(); ++s) {
      const int t = co.injections[k][s];
      if (kind == Kind::im) {
        first[t] = trace(parts[k].nbhd[s], k);
      } else {
        first[t] = trace(parts[k].nbox[s], k);
        out.frame.ndia[t] = trace(parts[k].ndia[s], k);
      }
    }
  return out;
}

/// Smallest set containing `seed` closed under the order and the relation,
/// with the induced structure (box and si frames).
inline std::pair<Frame, StateMap> generate_subframe(const Frame& x, Mask seed) {
  if (x.kind != Kind::box && x.kind != Kind::si)
    throw KindError("generated subframe closure is defined for box and si frames only");
  if (!subset_of(seed, x.base.all())) throw Error("seed states out of range");
  Mask closed = seed;
  while (true) {
    Mask next = x.base.up_closure(closed);
    for_each_bit(closed, [&](int s) { next |= x.rel[s]; });
    if (next == closed) break;
    closed = next;
  }
  StateMap emb;
  Frame sub{x.kind, x.base.restrict(closed, &emb)};
  for (int s : emb) sub.rel.push_back(preimage(emb, x.rel[s]));
  return {sub, emb};
}

/// The structure on an upset S making the inclusion a frame morphism, if
/// there is one (it is unique when it exists).
inline std::optional<std::pair<Frame, StateMap>> induced_subframe(const Frame& x, Mask s) {
  if (s == 0 || !x.base.is_upset(s)) return std::nullopt;
  StateMap emb;
  Frame sub{x.kind, x.base.restrict(s, &emb)};
  const int m = sub.size();
  switch (x.kind) {
    case Kind::box:
    case Kind::si:
      for (int t : emb) {
        if (!subset_of(x.rel[t], s)) return std::nullopt;
        sub.rel.push_back(preimage(emb, x.rel[t]));
      }
      break;
    case Kind::im:
    case Kind::cin: {
      // b ∈ N_S(t) iff a ∈ N(t) for the sets a with a ∩ S = b; all such a must agree.
      auto restrict_family = [&](Family w) -> std::optional<Family> {
        Family in = 0, out = 0;
        for (Mask a = 0; a < (Mask{1} << x.size()); ++a) {
          if (x.kind == Kind::im && !x.base.is_upset(a)) continue;
          const Mask b = preimage(emb, a);
          (family_has(w, a) ? in : out) |= family_bit(b);
        }
        if ((in & out) != 0) return std::nullopt;
        return in;
      };
      for (int t : emb) {
        if (x.kind == Kind::im) {
          auto w = restrict_family(x.nbhd[t]);
          if (!w) return std::nullopt;
          sub.nbhd.push_back(*w);
        } else {
          auto w1 = restrict_family(x.nbox[t]);
          auto w2 = restrict_family(x.ndia[t]);
          if (!w1 || !w2) return std::nullopt;
          sub.nbox.push_back(*w1);
          sub.ndia.push_back(*w2);
        }
      }
      (void)m;
      break;
    }
  }
  if (!is_valid_frame(sub) || !is_frame_morphism(emb, sub, x).ok) return std::nullopt;
  return std::make_pair(std::move(sub), std::move(emb));
}

/// Every generated subframe, found by scanning all non-empty upsets.
inline std::vector<std::pair<Frame, StateMap>> generated_subframes(const Frame& x, const Caps& caps = {}) {
  std::vector<std::pair<Frame, StateMap>> out;
  for (Mask s : upsets(x.base, caps))
    if (auto sub = induced_subframe(x, s)) out.push_back(std::move(*sub));
  return out;
}

/// f: sub -> x is a frame morphism and an order embedding.
inline bool generated_subframe_check(const StateMap& f, const Frame& sub, const Frame& x) {
  return is_frame_morphism(f, sub, x).ok && is_order_embedding(f, sub.base, x.base);
}

inline bool p_morphic_image_check(const StateMap& f, const Frame& x, const Frame& image_frame) {
  return is_surjective(f, image_frame.size()) && is_frame_morphism(f, x, image_frame).ok;
}

/// Deterministic spending limit for searches; partial results are flagged.
struct Budget {
  std::uint64_t remaining = ~std::uint64_t{0};
  bool exhausted = false;
  bool spend(std::uint64_t k = 1) {
    if (remaining < k) {
      exhausted = true;
      remaining = 0;
      return false;
    }
    remaining -= k;
    return true;
  }
};

/// All (optionally surjective) p-morphisms between two posets, as graphs in
/// lexicographic order.
inline std::vector<StateMap> poset_p_morphisms(const Poset& dom, const Poset& cod, bool surjective, Budget& budget) {
  std::vector<StateMap> out;
  const int n = dom.size(), m = cod.size();
  if (m == 0 || (surjective && m > n)) return out;
  StateMap f(n, 0);
  while (true) {
    if (!budget.spend()) return out;
    if ((!surjective || is_surjective(f, m)) && is_p_morphism(f, dom, cod)) out.push_back(f);
    int i = n - 1;
    while (i >= 0 && ++f[i] == m) f[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

/// Caches p-morphisms between base posets, keyed by the posets themselves.
class PMorphismCache {
 public:
  const std::vector<StateMap>& get(const Poset& dom, const Poset& cod, bool surjective, Budget& budget) {
    Key k{up_rows(dom), up_rows(cod), surjective};
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    Budget local = budget;
    auto maps = poset_p_morphisms(dom, cod, surjective, local);
    if (local.exhausted) {
      budget = local;
      scratch_ = std::move(maps);
      return scratch_;
    }
    budget = local;
    return cache_.emplace(std::move(k), std::move(maps)).first->second;
  }

 private:
  static std::vector<Mask> up_rows(const Poset& p) {
    std::vector<Mask> r;
    for (int x = 0; x < p.size(); ++x) r.push_back(p.up(x));
    return r;
  }
  using Key = std::tuple<std::vector<Mask>, std::vector<Mask>, bool>;
  std::map<Key, std::vector<StateMap>> cache_;
  std::vector<StateMap> scratch_;
};

/// All frame morphisms x -> y (surjective ones if asked).
inline std::vector<StateMap> frame_morphisms(const Frame& x, const Frame& y, bool surjective, Budget& budget,
                                             PMorphismCache* cache = nullptr) {
  std::vector<StateMap> out;
  if (x.kind != y.kind) return out;
  PMorphismCache local;
  PMorphismCache& c = cache ? *cache : local;
  for (const auto& f : c.get(x.base, y.base, surjective, budget)) {
    if (!budget.spend()) break;
    if (is_frame_morphism(f, x, y).ok) out.push_back(f);
  }
  return out;
}

struct PMorphicImage {
  int target = -1;  // index into the candidate list
  StateMap map;     // first surjective morphism found
};

/// Candidates that are p-morphic images of x, each with a witnessing map.
inline std::vector<PMorphicImage> find_p_morphic_images(const Frame& x, const std::vector<Frame>& candidates,
                                                        Budget& budget, PMorphismCache* cache = nullptr) {
  std::vector<PMorphicImage> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Frame& y = candidates[i];
    if (y.kind != x.kind || y.size() > x.size()) continue;
    PMorphismCache local;
    PMorphismCache& c = cache ? *cache : local;
    for (const auto& f : c.get(x.base, y.base, true, budget)) {
      if (!budget.spend()) return out;
      if (is_frame_morphism(f, x, y).ok) {
        out.push_back({static_cast<int>(i), f});
        break;
      }
    }
    if (budget.exhausted) break;
  }
  return out;
}

}  // namespace gtw
