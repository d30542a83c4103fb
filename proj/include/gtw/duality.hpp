#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "gtw/algebra.hpp"
#include "gtw/bits.hpp"
#include "gtw/caps.hpp"
#include "gtw/error.hpp"
#include "gtw/frame.hpp"
#include "gtw/heyting.hpp"
#include "gtw/morphism.hpp"

namespace gtw {

/// A prime filter Q of the free lattice L A, stored as its generator trace:
///   box: F = {a | □̇a ∈ Q}, a filter of A
///   im:  G = {a | ▽̇a ∈ Q}, an upset of A
///   cin: (S□, S◇) = ({a | □̇a ∈ Q}, {a | ◇̇a ∈ Q})
struct LDualPoint {
  Kind kind = Kind::box;
  ElemSet first;
  ElemSet second;  // cin only
  auto operator<=>(const LDualPoint&) const = default;
  bool operator==(const LDualPoint&) const = default;
};

/// Inclusion of prime filters, i.e. componentwise inclusion of traces.
inline bool dual_leq(const LDualPoint& p, const LDualPoint& q) {
  return p.first.subset_of(q.first) && (p.kind != Kind::cin || p.second.subset_of(q.second));
}

/// The algebra's prime filters with θ for every element.
struct DualSpace {
  PrimeFilterSpace space;
  std::vector<Mask> theta;  // element -> upset of the prime filter space

  int size() const { return space.size(); }
  Mask all() const { return space.order.all(); }

  /// θ is injective on a finite distributive lattice.
  int element_with_theta(Mask d) const {
    for (std::size_t a = 0; a < theta.size(); ++a)
      if (theta[a] == d) return static_cast<int>(a);
    return -1;
  }
};

inline DualSpace dual_space(const FinDL& d, const Caps& caps = {}) {
  DualSpace s{prime_filters(d, caps), {}};
  s.theta = theta(d, s.space);
  return s;
}

inline ElemSet elemset_of_mask(int universe, Mask m) {
  ElemSet s(universe);
  for_each_bit(m, [&](int i) { s.insert(i); });
  return s;
}

/// All generator traces for the kind, in ascending canonical order.
inline std::vector<LDualPoint> l_dual_points(Kind kind, const FinHA& a, const Caps& caps = {}) {
  const int n = a.size();
  std::vector<LDualPoint> out;
  switch (kind) {
    case Kind::box:
      for (int c = 0; c < n; ++c) out.push_back({kind, principal_filter(a, c), ElemSet(n)});
      break;
    case Kind::im: {
      if (n > kMaxStates) throw SizeGuard("upsets of the algebra", static_cast<std::uint64_t>(n), kMaxStates);
      Caps local = caps;
      local.max_upsets = caps.max_dual_points;
      for (Mask m : upsets(a.order(), local)) out.push_back({kind, elemset_of_mask(n, m), ElemSet(n)});
      break;
    }
    case Kind::cin: {
      if (2 * n >= 63 || (std::uint64_t{1} << (2 * n)) > caps.max_dual_points)
        throw SizeGuard("pairs of subsets of the algebra", n >= 32 ? ~std::uint64_t{0} : std::uint64_t{1} << (2 * n),
                        caps.max_dual_points);
      const Mask subsets = Mask{1} << n;
      for (Mask s1 = 0; s1 < subsets; ++s1)
        for (Mask s2 = 0; s2 < subsets; ++s2) out.push_back({kind, elemset_of_mask(n, s1), elemset_of_mask(n, s2)});
      break;
    }
    case Kind::si: throw KindError("the si signature has no dual points here");
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Which family the ◇-clause of ρ♭ consults for cin. The second family is
/// the one consistent with τ; the first is kept so tests can tell them apart.
enum class CinReading { second_family, first_family };

/// ρ♭: a structure value over the prime filters to a generator trace.
inline LDualPoint rho_flat(Kind kind, const FinHA& a, const DualSpace& ds, const TValue& t,
                           CinReading reading = CinReading::second_family) {
  const int n = a.size();
  LDualPoint p{kind, ElemSet(n), ElemSet(n)};
  switch (kind) {
    case Kind::box:
      for (int x = 0; x < n; ++x)
        if (subset_of(t.set, ds.theta[x])) p.first.insert(x);
      break;
    case Kind::im:
      for (int x = 0; x < n; ++x)
        if (family_has(t.first, ds.theta[x])) p.first.insert(x);
      break;
    case Kind::cin: {
      const Family dia_family = reading == CinReading::second_family ? t.second : t.first;
      for (int x = 0; x < n; ++x) {
        if (family_has(t.first, ds.theta[x])) p.first.insert(x);
        if (!family_has(dia_family, ds.all() & ~ds.theta[x])) p.second.insert(x);
      }
      break;
    }
    case Kind::si: throw KindError("rho_flat is not defined for si");
  }
  return p;
}

namespace detail {
inline void require_family_space(const DualSpace& ds) {
  if (ds.size() > kMaxFamilyStates)
    throw SizeGuard("neighbourhoods over the prime filter space", static_cast<std::uint64_t>(ds.size()), kMaxFamilyStates);
}

/// Every upset of the prime filter space, ascending.
inline std::vector<Mask> dual_upsets(const DualSpace& ds) { return upsets(ds.space.order); }
}  // namespace detail

/// τ for the box signature: {p | F ⊆ p}.
inline Mask tau_box(const DualSpace& ds, const ElemSet& f) {
  Mask out = 0;
  for (int i = 0; i < ds.size(); ++i)
    if (f.subset_of(ds.space.filters[i])) out |= bit(i);
  return out;
}

/// τ for im, clause by clause: θ-images, then closed upsets, then the rest.
/// Where several clauses apply they must agree.
inline Family tau_im(const FinHA& a, const DualSpace& ds, const ElemSet& g) {
  detail::require_family_space(ds);
  const auto ups = detail::dual_upsets(ds);
  Family w = 0;
  auto closed_clause = [&](Mask d) {
    for (int x = 0; x < a.size(); ++x)
      if (subset_of(d, ds.theta[x]) && !g.contains(x)) return false;
    return true;
  };
  // Closed upsets first, since the general clause refers to them.
  for (Mask d : ups) {
    std::optional<bool> verdict;
    const int x = ds.element_with_theta(d);
    if (x >= 0) verdict = g.contains(x);
    if (is_closed_upset(d, ds.theta, ds.space)) {
      const bool c = closed_clause(d);
      if (verdict && *verdict != c)
        throw InvariantViolation("tau clauses disagree at " + mask_to_string(d) + " (image vs closed)");
      verdict = c;
    }
    if (verdict && *verdict) w |= family_bit(d);
  }
  for (Mask d : ups) {
    bool general = false;
    for (Mask c : ups)
      if (subset_of(c, d) && is_closed_upset(c, ds.theta, ds.space) && family_has(w, c)) general = true;
    const bool decided = ds.element_with_theta(d) >= 0 || is_closed_upset(d, ds.theta, ds.space);
    if (decided) {
      if (general != family_has(w, d))
        throw InvariantViolation("tau clauses disagree at " + mask_to_string(d) + " (general clause)");
    } else if (general) {
      w |= family_bit(d);
    }
  }
  return w;
}

/// σ for im: open upsets by the existential clause, the rest by their open supersets.
inline Family sigma_im(const FinHA& a, const DualSpace& ds, const ElemSet& g) {
  detail::require_family_space(ds);
  const auto ups = detail::dual_upsets(ds);
  Family w = 0;
  for (Mask d : ups) {
    if (!is_open_upset(d, ds.theta)) continue;
    for (int x = 0; x < a.size(); ++x)
      if (g.contains(x) && subset_of(ds.theta[x], d)) {
        w |= family_bit(d);
        break;
      }
  }
  for (Mask d : ups) {
    if (is_open_upset(d, ds.theta)) continue;
    bool all_in = true;
    for (Mask e : ups)
      if (subset_of(d, e) && is_open_upset(e, ds.theta) && !family_has(w, e)) all_in = false;
    if (all_in) w |= family_bit(d);
  }
  return w;
}

/// τ for cin: ({θ(a) | a ∈ S□}, {pf ∖ θ(a) | a ∉ S◇}).
inline std::pair<Family, Family> tau_cin(const FinHA& a, const DualSpace& ds, const ElemSet& sbox, const ElemSet& sdia) {
  detail::require_family_space(ds);
  Family w1 = 0, w2 = 0;
  for (int x = 0; x < a.size(); ++x) {
    if (sbox.contains(x)) w1 |= family_bit(ds.theta[x]);
    if (!sdia.contains(x)) w2 |= family_bit(ds.all() & ~ds.theta[x]);
  }
  return {w1, w2};
}

enum class Variant { tau, sigma };

inline TValue tau(const FinHA& a, const DualSpace& ds, const LDualPoint& q, Variant variant = Variant::tau) {
  switch (q.kind) {
    case Kind::box: return {tau_box(ds, q.first), 0, 0};
    case Kind::im: return {0, variant == Variant::sigma ? sigma_im(a, ds, q.first) : tau_im(a, ds, q.first), 0};
    case Kind::cin: {
      auto [w1, w2] = tau_cin(a, ds, q.first, q.second);
      return {0, w1, w2};
    }
    case Kind::si: break;
  }
  throw KindError("tau is not defined for si");
}

inline TValue sigma(const FinHA& a, const DualSpace& ds, const LDualPoint& q) {
  if (q.kind != Kind::im) throw KindError("sigma is defined for im only");
  return tau(a, ds, q, Variant::sigma);
}

/// Generator trace of α⁻¹(q) for a prime filter q of the algebra.
inline LDualPoint trace_of_prime(const ModalAlgebra& a, const ElemSet& q) {
  const int n = a.size();
  LDualPoint p{a.kind(), ElemSet(n), ElemSet(n)};
  for (int x = 0; x < n; ++x) {
    if (q.contains(a.op1(x))) p.first.insert(x);
    if (a.kind() == Kind::cin && q.contains(a.op2(x))) p.second.insert(x);
  }
  return p;
}

/// The frame A_τ on the prime filters of the algebra.
inline Frame dual_frame(const ModalAlgebra& a, const DualSpace& ds, Variant variant = Variant::tau) {
  if (a.kind() == Kind::si) throw KindError("dual frames are not constructed for si algebras");
  if (variant == Variant::sigma && a.kind() != Kind::im) throw KindError("the sigma variant exists for im only");
  Frame f{a.kind(), ds.space.order};
  for (const auto& q : ds.space.filters) {
    const TValue t = tau(a.base(), ds, trace_of_prime(a, q), variant);
    switch (a.kind()) {
      case Kind::box: f.rel.push_back(t.set); break;
      case Kind::im: f.nbhd.push_back(t.first); break;
      case Kind::cin:
        f.nbox.push_back(t.first);
        f.ndia.push_back(t.second);
        break;
      case Kind::si: break;
    }
  }
  try {
    validate_frame(f);
  } catch (const FrameConditionError& e) {
    throw InvariantViolation(std::string("dual frame is not a frame: ") + e.what());
  }
  return f;
}

inline Frame dual_frame(const ModalAlgebra& a, Variant variant = Variant::tau, const Caps& caps = {}) {
  return dual_frame(a, dual_space(a.base(), caps), variant);
}

struct PrimeFilterExtension {
  Frame frame;
  ModalAlgebra algebra;  // the complex algebra of the original frame
  DualSpace dual;
  StateMap eta;  // original state -> prime filter
};

/// The prime filter extension: the dual frame of the complex algebra, and
/// for si the relation p R q iff (a ⊰ b ∈ p and a ∈ q imply b ∈ q).
inline PrimeFilterExtension pfe(const Frame& x, Variant variant = Variant::tau, const Caps& caps = {}) {
  ModalAlgebra alg = complex_algebra(x, caps);
  DualSpace ds = dual_space(alg.base(), caps);
  Frame f;
  if (x.kind == Kind::si) {
    f = Frame{Kind::si, ds.space.order};
    const int n = alg.size();
    for (const auto& p : ds.space.filters) {
      Mask row = 0;
      for (int j = 0; j < ds.size(); ++j) {
        const auto& q = ds.space.filters[j];
        bool ok = true;
        for (int a = 0; a < n && ok; ++a)
          for (int b = 0; b < n && ok; ++b)
            if (p.contains(alg.binop(a, b)) && q.contains(a) && !q.contains(b)) ok = false;
        if (ok) row |= bit(j);
      }
      f.rel.push_back(row);
    }
    validate_frame(f);
  } else {
    f = dual_frame(alg, ds, variant);
  }
  StateMap e = eta(x.base, alg.base(), ds.space);
  return {std::move(f), std::move(alg), std::move(ds), std::move(e)};
}

/// The extension model: V^pe(p) = {q | V(p) ∈ q} = θ(V(p)).
inline Model pfe_model(const Model& m, const PrimeFilterExtension& pe) {
  Model out{pe.frame, {}};
  for (const auto& [name, set] : m.valuation) {
    const int a = pe.algebra.base().index_of_label(set);
    if (a < 0) throw Error("valuation of '" + name + "' is not an upset");
    out.valuation[name] = pe.dual.theta[a];
  }
  return out;
}

inline Model pfe_model(const Model& m, Variant variant = Variant::tau, const Caps& caps = {}) {
  return pfe_model(m, pfe(m.frame, variant, caps));
}

/// θ as a map A -> complex algebra of the dual frame is a modal homomorphism.
inline MorphismCheck check_theta_prime_morphism(const ModalAlgebra& a, const Caps& caps = {}) {
  if (a.kind() == Kind::si) throw KindError("theta check is not defined for si");
  const DualSpace ds = dual_space(a.base(), caps);
  const Frame d = dual_frame(a, ds);
  const ModalAlgebra b = complex_algebra(d, caps);
  std::vector<int> h(a.size());
  for (int x = 0; x < a.size(); ++x) {
    h[x] = b.base().index_of_label(ds.theta[x]);
    if (h[x] < 0) return {false, "theta(" + std::to_string(x) + ") is not an upset of the dual"};
  }
  return check_modal_homomorphism(h, a, b);
}

/// h preserves ⊤, ⊥, ∧, ∨ and →.
inline bool is_heyting_homomorphism(const std::vector<int>& h, const FinHA& a, const FinHA& b) {
  if (static_cast<int>(h.size()) != a.size()) return false;
  if (h[a.top()] != b.top() || h[a.bottom()] != b.bottom()) return false;
  for (int x = 0; x < a.size(); ++x)
    for (int y = 0; y < a.size(); ++y)
      if (h[a.meet(x, y)] != b.meet(h[x], h[y]) || h[a.join(x, y)] != b.join(h[x], h[y]) ||
          h[a.imp(x, y)] != b.imp(h[x], h[y]))
        return false;
  return true;
}

/// The map pf'B -> pf'A, p ↦ h⁻¹(p).
inline StateMap dual_map(const std::vector<int>& h, const DualSpace& da, const DualSpace& db) {
  StateMap f;
  const int na = static_cast<int>(h.size());
  for (const auto& p : db.space.filters) {
    ElemSet pre(na);
    for (int x = 0; x < na; ++x)
      if (p.contains(h[x])) pre.insert(x);
    const int i = da.space.index_of(pre);
    if (i < 0) throw InvariantViolation("preimage of a prime filter is not prime");
    f.push_back(i);
  }
  return f;
}

/// Trace of pf(L h)(Q) = (L h)⁻¹(Q): the h-preimage of each component.
inline LDualPoint pull_back_trace(const std::vector<int>& h, const LDualPoint& q) {
  const int na = static_cast<int>(h.size());
  LDualPoint p{q.kind, ElemSet(na), ElemSet(na)};
  for (int x = 0; x < na; ++x) {
    if (q.first.contains(h[x])) p.first.insert(x);
    if (q.kind == Kind::cin && q.second.contains(h[x])) p.second.insert(x);
  }
  return p;
}

/// Naturality of τ at a Heyting homomorphism h: A -> B, pointwise on the
/// generator traces of B:  τ_A(pf(L h)(Q)) = T(pf' h)(τ_B(Q)).
inline MorphismCheck check_tau_naturality(Kind kind, const std::vector<int>& h, const FinHA& a, const FinHA& b,
                                          Variant variant = Variant::tau, const Caps& caps = {}) {
  if (!is_heyting_homomorphism(h, a, b)) return {false, "map is not a Heyting homomorphism"};
  const DualSpace da = dual_space(a, caps), db = dual_space(b, caps);
  const StateMap f = dual_map(h, da, db);
  for (const auto& q : l_dual_points(kind, b, caps)) {
    const TValue lhs = tau(a, da, pull_back_trace(h, q), variant);
    const TValue rhs = functor_action(kind, f, da.space.order, tau(b, db, q, variant));
    if (lhs != rhs) return {false, "square fails at a dual point of the codomain"};
  }
  return {};
}

/// ρ♭ ∘ τ = id (or ∘ σ) on every generator trace.
inline MorphismCheck check_right_inverse(Kind kind, const FinHA& a, Variant variant = Variant::tau,
                                         CinReading reading = CinReading::second_family, const Caps& caps = {}) {
  const DualSpace ds = dual_space(a, caps);
  for (const auto& q : l_dual_points(kind, a, caps))
    if (rho_flat(kind, a, ds, tau(a, ds, q, variant), reading) != q)
      return {false, "rho_flat does not undo tau at some dual point"};
  return {};
}

}  // namespace gtw
