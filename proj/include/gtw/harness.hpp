#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtw/caps.hpp"
#include "gtw/duality.hpp"
#include "gtw/error.hpp"
#include "gtw/formula_table.hpp"
#include "gtw/frame.hpp"
#include "gtw/morphism.hpp"
#include "gtw/order.hpp"

namespace gtw {

/// Upward-closed families of upsets of p (the values of M(p)), ascending.
inline std::vector<Family> monotone_families(const Poset& p, const Caps& caps = {}) {
  if (p.size() > kMaxFamilyStates)
    throw SizeGuard("neighbourhood families", static_cast<std::uint64_t>(p.size()), kMaxFamilyStates);
  const auto ups = upsets(p, caps);
  const int k = static_cast<int>(ups.size());
  if (k > 20) throw SizeGuard("families of upsets", std::uint64_t{1} << std::min(k, 63), std::uint64_t{1} << 20);
  std::vector<Family> out;
  for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << k); ++choice) {
    bool closed = true;
    for (int i = 0; i < k && closed; ++i) {
      if (!((choice >> i) & 1u)) continue;
      for (int j = 0; j < k && closed; ++j)
        if (subset_of(ups[i], ups[j]) && !((choice >> j) & 1u)) closed = false;
    }
    if (!closed) continue;
    Family w = 0;
    for (int i = 0; i < k; ++i)
      if ((choice >> i) & 1u) w |= family_bit(ups[i]);
    out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

/// Per-state candidate values for a kind over p; for cin a value packs the
/// two families as (first, second).
struct StructureChoices {
  std::vector<TValue> values;
};

inline StructureChoices structure_choices(Kind kind, const Poset& p, const Caps& caps) {
  StructureChoices c;
  const int n = p.size();
  switch (kind) {
    case Kind::box:
      for (Mask u : upsets(p, caps)) c.values.push_back({u, 0, 0});
      break;
    case Kind::si:
      for (Mask s = 0; s <= p.all(); ++s) c.values.push_back({s, 0, 0});
      break;
    case Kind::im:
      for (Family w : monotone_families(p, caps)) c.values.push_back({0, w, 0});
      break;
    case Kind::cin: {
      if (n > 2) {
        // 2^(2^n) families per component; only the count is needed for the guard above n = 2.
        break;
      }
      const Family fams = Family{1} << (1 << n);
      for (Family w1 = 0; w1 < fams; ++w1)
        for (Family w2 = 0; w2 < fams; ++w2) c.values.push_back({0, w1, w2});
      break;
    }
  }
  return c;
}

inline long double choice_count(Kind kind, const Poset& p, const Caps& caps) {
  if (kind == Kind::cin && p.size() > 2) {
    const long double fams = std::pow(2.0L, static_cast<long double>(1 << p.size()));
    return fams * fams;
  }
  return static_cast<long double>(structure_choices(kind, p, caps).values.size());
}

/// x <= y constraint between two state values.
inline bool compatible(Kind kind, const TValue& lo, const TValue& hi) {
  switch (kind) {
    case Kind::box:
    case Kind::si: return subset_of(hi.set, lo.set);
    case Kind::im: return subset_of(lo.first, hi.first);
    case Kind::cin: return subset_of(lo.first, hi.first) && subset_of(hi.second, lo.second);
  }
  return false;
}

inline Frame frame_from_values(Kind kind, const Poset& p, const std::vector<TValue>& vals) {
  Frame f{kind, p};
  for (const auto& v : vals) switch (kind) {
      case Kind::box:
      case Kind::si: f.rel.push_back(v.set); break;
      case Kind::im: f.nbhd.push_back(v.first); break;
      case Kind::cin:
        f.nbox.push_back(v.first);
        f.ndia.push_back(v.second);
        break;
    }
  return f;
}

}  // namespace detail

/// One frame per isomorphism class with carrier sizes 1..max_size.
struct Universe {
  Kind kind = Kind::box;
  int max_size = 0;
  std::vector<Frame> frames;
  std::vector<Certificate> certificates;  // parallel to frames
  std::map<Certificate, int> index;       // certificate -> frame index

  int size() const { return static_cast<int>(frames.size()); }

  void add(Frame f, Certificate c) {
    if (index.emplace(c, size()).second) {
      frames.push_back(std::move(f));
      certificates.push_back(std::move(c));
    }
  }

  int find(const Certificate& c) const {
    auto it = index.find(c);
    return it == index.end() ? -1 : it->second;
  }
};

/// Estimated number of candidate structures over all posets of size <= n.
inline long double universe_candidates(Kind kind, int n, const Caps& caps = {}) {
  long double total = 0;
  for (int k = 1; k <= n; ++k)
    for (const auto& p : enumerate_posets(k, caps)) total += std::pow(detail::choice_count(kind, p, caps), k);
  return total;
}

/// Every frame of the kind with at most n states, one per isomorphism class.
/// Posets come in canonical order; structures in lexicographic order of
/// per-state values; a structure is kept iff it is minimal in its orbit
/// under the poset's automorphisms.
inline Universe build_universe(Kind kind, int n, const Caps& caps = {}) {
  const long double estimate = universe_candidates(kind, n, caps);
  if (estimate > static_cast<long double>(caps.max_universe))
    throw SizeGuard(to_string(kind) + " universe candidates",
                    estimate > 1.8e19L ? ~std::uint64_t{0} : static_cast<std::uint64_t>(estimate), caps.max_universe);
  Universe u;
  u.kind = kind;
  u.max_size = n;
  for (int k = 1; k <= n; ++k) {
    for (const auto& p : enumerate_posets(k, caps)) {
      const auto choices = detail::structure_choices(kind, p, caps).values;
      std::vector<StateMap> auts;
      for (auto& a : automorphisms(p))
        if (a != identity_map(k)) auts.push_back(a);
      std::vector<TValue> vals(k);
      auto rec = [&](auto& self, int s) -> void {
        if (s == k) {
          Frame f = detail::frame_from_values(kind, p, vals);
          const auto code = structure_code(f);
          for (const auto& a : auts)
            if (structure_code(relabel_frame(f, a)) < code) return;
          Certificate c = frame_certificate(f);
          u.add(std::move(f), std::move(c));
          return;
        }
        for (const auto& v : choices) {
          bool ok = true;
          for (int t = 0; t < s && ok; ++t) {
            if (p.leq(t, s) && !detail::compatible(kind, vals[t], v)) ok = false;
            if (p.leq(s, t) && !detail::compatible(kind, v, vals[t])) ok = false;
          }
          if (!ok) continue;
          vals[s] = v;
          self(self, s + 1);
        }
      };
      rec(rec, 0);
    }
  }
  return u;
}

namespace detail {
inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }
}  // namespace detail

/// Up to `count` pairwise non-isomorphic random frames on exactly n states,
/// in canonical labelling, reproducible from the seed. Random structures
/// are repaired into valid ones by closing along the order.
inline std::vector<Frame> sample_frames(Kind kind, int n, int count, std::uint64_t seed, const Caps& caps = {}) {
  std::mt19937_64 rng(seed);
  const auto posets = enumerate_posets(n, caps);
  std::set<Certificate> seen;
  std::vector<Frame> out;
  std::vector<Mask> ups_cache;
  const int attempts = count * 50;
  for (int attempt = 0; attempt < attempts && static_cast<int>(out.size()) < count; ++attempt) {
    const Poset& p = posets[detail::pick(rng, posets.size())];
    const auto ups = upsets(p, caps);
    std::vector<TValue> vals(n);
    const Family fam_mask = (n >= 6) ? ~Family{0} : (Family{1} << (1 << n)) - 1;
    std::vector<Family> im_choices;
    if (kind == Kind::im) im_choices = monotone_families(p, caps);
    for (int s = 0; s < n; ++s) switch (kind) {
        case Kind::box: vals[s].set = ups[detail::pick(rng, ups.size())]; break;
        case Kind::si: vals[s].set = rng() & p.all(); break;
        case Kind::im: vals[s].first = im_choices[detail::pick(rng, im_choices.size())]; break;
        case Kind::cin:
          vals[s].first = rng() & fam_mask;
          vals[s].second = rng() & fam_mask;
          break;
      }
    std::vector<TValue> fixed(n);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        // box, si: R'[s] = ∪ R[t] over t >= s.  im, cin first: union over t <= s.  cin second: union over t >= s.
        if (p.leq(s, t)) {
          fixed[s].set |= vals[t].set;
          fixed[s].second |= vals[t].second;
        }
        if (p.leq(t, s)) fixed[s].first |= vals[t].first;
      }
    Frame f = detail::frame_from_values(kind, p, fixed);
    validate_frame(f);
    Certificate c = frame_certificate(f);
    if (!seen.insert(c).second) continue;
    out.push_back(canonical_frame(f));
  }
  return out;
}

/// Indices of the universe frames validating every formula.
inline std::vector<int> fr_class(const std::vector<Formula>& phis, const Universe& u, const Caps& caps = {}) {
  std::vector<int> out;
  for (int i = 0; i < u.size(); ++i)
    if (frame_validates_all(u.frames[i], phis, caps)) out.push_back(i);
  return out;
}

/// A class of frames: the listed universe members, and beyond the universe
/// either the defining axioms (if any) or nothing.
struct FrameClass {
  const Universe* universe = nullptr;
  std::set<int> members;
  std::optional<std::vector<Formula>> axioms;

  bool contains(const Frame& f, const Caps& caps = {}) const {
    if (f.size() <= universe->max_size) {
      const int i = universe->find(frame_certificate(f));
      if (i < 0) throw InvariantViolation("frame missing from its universe");
      return members.count(i) > 0;
    }
    if (axioms) return frame_validates_all(f, *axioms, caps);
    return false;
  }
};

struct AuditOptions {
  int union_size_limit = -1;  // largest disjoint union checked; default max_size + 1
  std::uint64_t budget = std::uint64_t{1} << 32;
};

/// Closure audit for a frame class over a universe.
///   (a) disjoint unions of pairs of members are members
///   (b) generated subframes of members are members
///   (c) p-morphic images (within the universe) of members are members
///   (d) pfe(X) is a member iff X is, for every X of the universe; and eta
///       is an isomorphism X ≅ pfe(X)
/// Each check records its first failure witness. `complete` is false when
/// the budget ran out before all cases were examined.
inline nlohmann::ordered_json audit_closure(const FrameClass& k, const AuditOptions& opt = {}, const Caps& caps = {}) {
  const Universe& u = *k.universe;
  const int union_limit = opt.union_size_limit < 0 ? u.max_size + 1 : opt.union_size_limit;
  Budget budget{opt.budget};
  using json = nlohmann::ordered_json;
  json report;
  report["kind"] = to_string(u.kind);
  report["universe_max_size"] = u.max_size;
  report["universe_frames"] = u.size();
  report["class_size"] = k.members.size();
  report["class_members"] = std::vector<int>(k.members.begin(), k.members.end());
  report["union_size_limit"] = union_limit;
  bool all_passed = true;

  auto finish = [&](json& entry, std::uint64_t checked, const std::optional<json>& witness) {
    entry["checked"] = checked;
    entry["passed"] = !witness.has_value();
    entry["witness"] = witness ? *witness : json(nullptr);
    if (witness) all_passed = false;
  };

  {  // (a)
    json entry;
    std::optional<json> witness;
    std::uint64_t checked = 0;
    for (auto i = k.members.begin(); i != k.members.end() && !witness; ++i)
      for (auto j = i; j != k.members.end() && !witness; ++j) {
        const Frame &x = u.frames[*i], &y = u.frames[*j];
        if (x.size() + y.size() > union_limit) continue;
        if (!budget.spend()) break;
        ++checked;
        const Frame z = disjoint_union({x, y}).frame;
        if (!k.contains(z, caps)) witness = json{{"left", *i}, {"right", *j}};
      }
    finish(entry, checked, witness);
    report["disjoint_unions"] = entry;
  }
  {  // (b)
    json entry;
    std::optional<json> witness;
    std::uint64_t checked = 0;
    for (int i : k.members) {
      if (witness || !budget.spend()) break;
      for (auto& [sub, emb] : generated_subframes(u.frames[i], caps)) {
        ++checked;
        if (!generated_subframe_check(emb, sub, u.frames[i]))
          throw InvariantViolation("generated subframe fails its own check");
        if (!k.contains(sub, caps)) {
          witness = json{{"frame", i}, {"states", emb}};
          break;
        }
      }
    }
    finish(entry, checked, witness);
    report["generated_subframes"] = entry;
  }
  {  // (c)
    json entry;
    std::optional<json> witness;
    std::uint64_t checked = 0;
    PMorphismCache cache;
    for (int i : k.members) {
      if (witness) break;
      const Frame& x = u.frames[i];
      for (int j = 0; j < u.size() && !witness; ++j) {
        const Frame& y = u.frames[j];
        if (y.size() > x.size()) continue;
        // A surjection between equal finite carriers is a bijection, and a
        // bijective frame morphism is an isomorphism; the universe holds one
        // frame per class, so only y == x can qualify.
        if (y.size() == x.size() && j != i) continue;
        for (const auto& f : cache.get(x.base, y.base, true, budget)) {
          if (!budget.spend()) break;
          ++checked;
          if (!is_frame_morphism(f, x, y).ok) continue;
          if (!k.members.count(j)) witness = json{{"frame", i}, {"image", j}, {"map", f}};
          break;
        }
      }
    }
    finish(entry, checked, witness);
    report["p_morphic_images"] = entry;
  }
  {  // (d)
    json entry;
    std::optional<json> witness;
    std::uint64_t checked = 0;
    for (int i = 0; i < u.size() && !witness; ++i) {
      if (!budget.spend()) break;
      ++checked;
      const Frame& x = u.frames[i];
      const auto pe = pfe(x, Variant::tau, caps);
      if (!is_frame_isomorphism(pe.eta, x, pe.frame)) {
        witness = json{{"frame", i}, {"reason", "eta is not an isomorphism"}};
        break;
      }
      if (k.contains(pe.frame, caps) != (k.members.count(i) > 0))
        witness = json{{"frame", i}, {"reason", "membership of pfe differs"}};
    }
    finish(entry, checked, witness);
    report["prime_filter_extensions"] = entry;
  }
  report["complete"] = !budget.exhausted;
  report["passed"] = all_passed;
  return report;
}

/// Frames used by the property suites for one kind.
struct CorpusConfig {
  int full_size = 3;      // every frame up to this size
  int sample_size = 0;    // additionally sample frames of this size (0: none)
  int sample_count = 0;
  int formula_depth = 2;
  std::vector<std::string> letters = {"p", "q"};
};

inline CorpusConfig default_corpus_config(Kind kind) {
  switch (kind) {
    case Kind::box:
    case Kind::si:
    case Kind::im: return {3, 0, 0, 2, {"p", "q"}};
    case Kind::cin: return {2, 3, 60, 2, {"p", "q"}};
  }
  return {};
}

struct Corpus {
  Kind kind = Kind::box;
  std::vector<Frame> frames;
  FormulaTable formulas;
};

/// Deterministic given the seed (which only affects sampled frames).
inline Corpus corpus(Kind kind, std::uint64_t seed, const CorpusConfig& cfg, const Caps& caps = {}) {
  Corpus c;
  c.kind = kind;
  c.frames = build_universe(kind, cfg.full_size, caps).frames;
  if (cfg.sample_size > 0 && cfg.sample_count > 0) {
    auto extra = sample_frames(kind, cfg.sample_size, cfg.sample_count, seed, caps);
    c.frames.insert(c.frames.end(), extra.begin(), extra.end());
  }
  c.formulas = enumerate_formulas(kind, cfg.formula_depth, cfg.letters);
  return c;
}

inline Corpus corpus(Kind kind, std::uint64_t seed = 0) { return corpus(kind, seed, default_corpus_config(kind)); }

}  // namespace gtw
