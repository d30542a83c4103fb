#pragma once

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "gtw/error.hpp"
#include "gtw/kind.hpp"

namespace gtw {

enum class Op { top, bot, letter, conj, disj, imp, box, dia, tri, sto };

inline bool is_modal(Op op) { return op == Op::box || op == Op::dia || op == Op::tri || op == Op::sto; }
inline bool is_binary(Op op) { return op == Op::conj || op == Op::disj || op == Op::imp || op == Op::sto; }
inline bool is_unary(Op op) { return op == Op::box || op == Op::dia || op == Op::tri; }

/// Modalities allowed in each kind's language.
inline bool in_signature(Op op, Kind kind) {
  switch (op) {
    case Op::box: return kind == Kind::box || kind == Kind::cin;
    case Op::dia: return kind == Kind::cin;
    case Op::tri: return kind == Kind::im;
    case Op::sto: return kind == Kind::si;
    default: return true;
  }
}

inline std::string op_keyword(Op op) {
  switch (op) {
    case Op::box: return "box";
    case Op::dia: return "dia";
    case Op::tri: return "tri";
    case Op::conj: return "&";
    case Op::disj: return "|";
    case Op::imp: return "->";
    case Op::sto: return "~>";
    case Op::top: return "T";
    case Op::bot: return "F";
    case Op::letter: return "letter";
  }
  return "?";
}

/// Immutable formula tree with shared subterms.
class Formula {
 public:
  Formula() : Formula(Op::top) {}

  static Formula top() { return Formula(Op::top); }
  static Formula bot() { return Formula(Op::bot); }
  static Formula letter(std::string name) { return Formula(std::move(name)); }
  static Formula conj(Formula a, Formula b) { return Formula(Op::conj, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return Formula(Op::disj, std::move(a), std::move(b)); }
  static Formula imp(Formula a, Formula b) { return Formula(Op::imp, std::move(a), std::move(b)); }
  static Formula box(Formula a) { return Formula(Op::box, std::move(a)); }
  static Formula dia(Formula a) { return Formula(Op::dia, std::move(a)); }
  static Formula tri(Formula a) { return Formula(Op::tri, std::move(a)); }
  static Formula sto(Formula a, Formula b) { return Formula(Op::sto, std::move(a), std::move(b)); }
  static Formula iff(const Formula& a, const Formula& b) { return conj(imp(a, b), imp(b, a)); }

  static Formula make(Op op, Formula a = {}, Formula b = {}) {
    if (op == Op::top || op == Op::bot) return Formula(op);
    if (is_unary(op)) return Formula(op, std::move(a));
    return Formula(op, std::move(a), std::move(b));
  }

  Op op() const { return node_->op; }
  const std::string& name() const { return node_->name; }
  const Formula& left() const { return *node_->left; }
  const Formula& right() const { return *node_->right; }
  const Formula& child() const { return *node_->left; }

  int depth() const {
    switch (op()) {
      case Op::top: case Op::bot: case Op::letter: return 0;
      default: break;
    }
    int d = left().depth();
    if (is_binary(op())) d = std::max(d, right().depth());
    return d + 1;
  }

  friend bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = static_cast<int>(a.op()) <=> static_cast<int>(b.op()); c != 0) return c;
    switch (a.op()) {
      case Op::top: case Op::bot: return std::strong_ordering::equal;
      case Op::letter: return a.name() <=> b.name();
      default: break;
    }
    if (auto c = a.left() <=> b.left(); c != 0) return c;
    if (is_binary(a.op())) return a.right() <=> b.right();
    return std::strong_ordering::equal;
  }

 private:
  struct Node {
    Op op;
    std::string name;
    std::shared_ptr<const Formula> left, right;
  };

  explicit Formula(std::string name)
      : node_(std::make_shared<Node>(Node{Op::letter, std::move(name), nullptr, nullptr})) {}
  explicit Formula(Op op) : node_(std::make_shared<Node>(Node{op, {}, nullptr, nullptr})) {}
  Formula(Op op, Formula a)
      : node_(std::make_shared<Node>(Node{op, {}, std::make_shared<const Formula>(std::move(a)), nullptr})) {}
  Formula(Op op, Formula a, Formula b)
      : node_(std::make_shared<Node>(Node{op, {}, std::make_shared<const Formula>(std::move(a)),
                                          std::make_shared<const Formula>(std::move(b))})) {}

  std::shared_ptr<const Node> node_;
};

/// A rank-1 axiom candidate lhs <-> rhs.
struct AxiomPair {
  Formula lhs, rhs;
  Formula as_formula() const { return Formula::iff(lhs, rhs); }
  bool operator==(const AxiomPair&) const = default;
};

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::imp: case Op::sto: return 1;
    case Op::disj: return 2;
    case Op::conj: return 3;
    default: return 4;
  }
}

inline void print(const Formula& f, std::string& out) {
  auto sub = [&](const Formula& g, bool wrap) {
    if (wrap) out += '(';
    print(g, out);
    if (wrap) out += ')';
  };
  switch (f.op()) {
    case Op::top: out += 'T'; return;
    case Op::bot: out += 'F'; return;
    case Op::letter: out += f.name(); return;
    case Op::box: case Op::dia: case Op::tri:
      out += op_keyword(f.op());
      out += ' ';
      sub(f.child(), precedence(f.child().op()) < 4);
      return;
    case Op::conj: case Op::disj: {
      const int p = precedence(f.op());
      sub(f.left(), precedence(f.left().op()) < p);
      out += ' ';
      out += op_keyword(f.op());
      out += ' ';
      sub(f.right(), precedence(f.right().op()) <= p);
      return;
    }
    case Op::imp: case Op::sto:
      // Right-associative; -> and ~> never share an unparenthesised chain.
      sub(f.left(), precedence(f.left().op()) <= 1);
      out += ' ';
      out += op_keyword(f.op());
      out += ' ';
      sub(f.right(), precedence(f.right().op()) < 1 ||
                         (precedence(f.right().op()) == 1 && f.right().op() != f.op()));
      return;
  }
}

}  // namespace detail

/// ASCII rendering accepted back by `parse`.
inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print(f, out);
  return out;
}

inline std::string to_string(const AxiomPair& ax) { return to_string(ax.lhs) + " <-> " + to_string(ax.rhs); }

/// Indented tree dump, one node per line.
inline std::string ast_dump(const Formula& f, int indent = 0) {
  std::string pad(indent * 2, ' ');
  std::string name;
  switch (f.op()) {
    case Op::top: return pad + "Top\n";
    case Op::bot: return pad + "Bot\n";
    case Op::letter: return pad + "Letter(" + f.name() + ")\n";
    case Op::conj: name = "And"; break;
    case Op::disj: name = "Or"; break;
    case Op::imp: name = "Imp"; break;
    case Op::box: name = "Box"; break;
    case Op::dia: name = "Dia"; break;
    case Op::tri: name = "Tri"; break;
    case Op::sto: name = "Sto"; break;
  }
  std::string out = pad + name + "\n" + ast_dump(f.left(), indent + 1);
  if (is_binary(f.op())) out += ast_dump(f.right(), indent + 1);
  return out;
}

inline void collect_letters(const Formula& f, std::set<std::string>& out) {
  switch (f.op()) {
    case Op::top: case Op::bot: return;
    case Op::letter: out.insert(f.name()); return;
    default: break;
  }
  collect_letters(f.left(), out);
  if (is_binary(f.op())) collect_letters(f.right(), out);
}

inline std::set<std::string> letters(const Formula& f) {
  std::set<std::string> out;
  collect_letters(f, out);
  return out;
}

inline std::set<std::string> letters(const std::vector<Formula>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) collect_letters(f, out);
  return out;
}

/// Simultaneous replacement of letters; letters outside the map stay.
inline Formula substitute(const Formula& f, const std::map<std::string, Formula>& sigma) {
  switch (f.op()) {
    case Op::top: case Op::bot: return f;
    case Op::letter: {
      auto it = sigma.find(f.name());
      return it == sigma.end() ? f : it->second;
    }
    default: break;
  }
  if (is_unary(f.op())) return Formula::make(f.op(), substitute(f.child(), sigma));
  return Formula::make(f.op(), substitute(f.left(), sigma), substitute(f.right(), sigma));
}

inline void check_signature(const Formula& f, Kind kind) {
  if (!in_signature(f.op(), kind))
    throw SignatureError("modality '" + op_keyword(f.op()) + "' is not in the " + to_string(kind) + " signature");
  if (f.op() == Op::top || f.op() == Op::bot || f.op() == Op::letter) return;
  check_signature(f.left(), kind);
  if (is_binary(f.op())) check_signature(f.right(), kind);
}

namespace detail {
inline bool rank1(const Formula& f, int modal_depth) {
  switch (f.op()) {
    case Op::top: case Op::bot: return true;
    case Op::letter: return modal_depth == 1;
    case Op::imp: return false;
    default: break;
  }
  const int d = modal_depth + (is_modal(f.op()) ? 1 : 0);
  if (!rank1(f.left(), d)) return false;
  return !is_binary(f.op()) || rank1(f.right(), d);
}
}  // namespace detail

/// No implication, and every letter occurrence sits under exactly one modality.
inline bool is_rank1(const Formula& f) { return detail::rank1(f, 0); }
inline bool is_rank1_axiom(const AxiomPair& ax) { return is_rank1(ax.lhs) && is_rank1(ax.rhs); }

}  // namespace gtw
