#pragma once

#include <set>
#include <sstream>
#include <string>

#include "gtw/frame.hpp"

namespace gtw {

namespace detail {
/// Members of a family with no proper subset in the family.
inline std::vector<Mask> minimal_members(Family w, int n) {
  std::vector<Mask> out;
  for (Mask s = 0; s < (Mask{1} << n); ++s) {
    if (!family_has(w, s)) continue;
    bool minimal = true;
    for (Mask t = 0; t < (Mask{1} << n) && minimal; ++t)
      if (t != s && family_has(w, t) && subset_of(t, s)) minimal = false;
    if (minimal) out.push_back(s);
  }
  return out;
}
}  // namespace detail

/// Graphviz rendering: order covers as solid edges, the modal structure as
/// dashed labelled edges. Neighbourhood members become box-shaped set nodes;
/// for im frames only the minimal members are drawn.
inline std::string to_dot(const Frame& f) {
  std::ostringstream out;
  out << "digraph frame {\n  rankdir=BT;\n  node [shape=circle];\n";
  for (int x = 0; x < f.size(); ++x) out << "  " << x << ";\n";
  for (auto [a, b] : f.base.covers()) out << "  " << a << " -> " << b << ";\n";
  std::set<Mask> set_nodes;
  auto set_edge = [&](int x, Mask s, const char* label) {
    set_nodes.insert(s);
    out << "  " << x << " -> s" << s << " [style=dashed, label=\"" << label << "\"];\n";
  };
  switch (f.kind) {
    case Kind::box:
    case Kind::si:
      for (int x = 0; x < f.size(); ++x)
        for_each_bit(f.rel[x], [&](int y) {
          out << "  " << x << " -> " << y << " [style=dashed, label=\"" << (f.kind == Kind::box ? "R" : "Rs") << "\"];\n";
        });
      break;
    case Kind::im:
      for (int x = 0; x < f.size(); ++x)
        for (Mask s : detail::minimal_members(f.nbhd[x], f.size())) set_edge(x, s, "N");
      break;
    case Kind::cin:
      for (int x = 0; x < f.size(); ++x)
        for (Mask s = 0; s < (Mask{1} << f.size()); ++s) {
          if (family_has(f.nbox[x], s)) set_edge(x, s, "Nbox");
          if (family_has(f.ndia[x], s)) set_edge(x, s, "Ndia");
        }
      break;
  }
  for (Mask s : set_nodes) out << "  s" << s << " [shape=box, label=\"" << mask_to_string(s) << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace gtw
