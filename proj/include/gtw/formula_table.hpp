#pragma once

#include <map>
#include <string>
#include <vector>

#include "gtw/formula.hpp"
#include "gtw/kind.hpp"

namespace gtw {

/// Formulas stored as a DAG in dependency order: every entry's children come
/// before it, so one forward pass evaluates the whole table.
struct FormulaTable {
  struct Entry {
    Op op;
    int left = -1;
    int right = -1;
    int letter = -1;  // index into letter_names for Op::letter
  };

  std::vector<std::string> letter_names;
  std::vector<Entry> entries;
  std::vector<Formula> formulas;

  int size() const { return static_cast<int>(entries.size()); }

  int letter_index(const std::string& name) const {
    for (std::size_t i = 0; i < letter_names.size(); ++i)
      if (letter_names[i] == name) return static_cast<int>(i);
    return -1;
  }

  /// Adds f (and its subformulas) if new; returns its entry index.
  int add(const Formula& f) {
    if (auto it = index_.find(f); it != index_.end()) return it->second;
    Entry e{f.op()};
    switch (f.op()) {
      case Op::top: case Op::bot: break;
      case Op::letter: {
        e.letter = letter_index(f.name());
        if (e.letter < 0) {
          e.letter = static_cast<int>(letter_names.size());
          letter_names.push_back(f.name());
        }
        break;
      }
      default:
        e.left = add(f.left());
        if (is_binary(f.op())) e.right = add(f.right());
    }
    entries.push_back(e);
    formulas.push_back(f);
    const int id = size() - 1;
    index_.emplace(f, id);
    return id;
  }

 private:
  std::map<Formula, int> index_;
};

inline FormulaTable table_of(const std::vector<Formula>& fs) {
  FormulaTable t;
  for (const auto& f : fs) t.add(f);
  return t;
}

/// Every formula of modal/propositional depth <= max_depth over `letter_names`
/// in the kind's signature. Deterministic order: by depth, then operator
/// (&, |, ->, then modalities), then operands in table order.
inline FormulaTable enumerate_formulas(Kind kind, int max_depth, const std::vector<std::string>& letter_names) {
  FormulaTable t;
  t.letter_names = letter_names;
  std::vector<int> depth;
  auto push = [&](const Formula& f, int d) {
    const int before = t.size();
    t.add(f);
    if (t.size() > before) depth.push_back(d);
  };
  push(Formula::top(), 0);
  push(Formula::bot(), 0);
  for (const auto& l : letter_names) push(Formula::letter(l), 0);

  std::vector<Op> binary = {Op::conj, Op::disj, Op::imp};
  std::vector<Op> unary;
  switch (kind) {
    case Kind::box: unary = {Op::box}; break;
    case Kind::im: unary = {Op::tri}; break;
    case Kind::cin: unary = {Op::box, Op::dia}; break;
    case Kind::si: binary.push_back(Op::sto); break;
  }
  for (int d = 1; d <= max_depth; ++d) {
    const int prev = t.size();
    for (Op op : binary)
      for (int a = 0; a < prev; ++a)
        for (int b = 0; b < prev; ++b)
          if (std::max(depth[a], depth[b]) == d - 1) push(Formula::make(op, t.formulas[a], t.formulas[b]), d);
    for (Op op : unary)
      for (int a = 0; a < prev; ++a)
        if (depth[a] == d - 1) push(Formula::make(op, t.formulas[a]), d);
  }
  return t;
}

}  // namespace gtw
