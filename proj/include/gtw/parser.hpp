#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtw/error.hpp"
#include "gtw/formula.hpp"

namespace gtw {

namespace detail {

enum class Tok { end, lparen, rparen, conj, disj, imp, sto, iff, top, bot, ident, box, dia, tri };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto starts = [&](std::string_view t) { return s.substr(i, t.size()) == t; };
    if (c == '(') { out.push_back({Tok::lparen, "(", start}); ++i; }
    else if (c == ')') { out.push_back({Tok::rparen, ")", start}); ++i; }
    else if (c == '&') { out.push_back({Tok::conj, "&", start}); ++i; }
    else if (c == '|') { out.push_back({Tok::disj, "|", start}); ++i; }
    else if (starts("<->")) { out.push_back({Tok::iff, "<->", start}); i += 3; }
    else if (starts("->")) { out.push_back({Tok::imp, "->", start}); i += 2; }
    else if (starts("~>")) { out.push_back({Tok::sto, "~>", start}); i += 2; }
    else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '\'')) ++i;
      std::string word(s.substr(start, i - start));
      Tok k = Tok::ident;
      if (word == "T") k = Tok::top;
      else if (word == "F") k = Tok::bot;
      else if (word == "box") k = Tok::box;
      else if (word == "dia") k = Tok::dia;
      else if (word == "tri") k = Tok::tri;
      out.push_back({k, std::move(word), start});
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, Kind kind) : toks_(tokenize(text)), kind_(kind) {}

  /// statement := arrow ['<->' arrow]
  std::pair<Formula, std::optional<Formula>> statement() {
    Formula lhs = arrow().first;
    std::optional<Formula> rhs;
    if (peek().kind == Tok::iff) {
      next();
      rhs = arrow().first;
      if (peek().kind == Tok::iff) throw ParseError("'<->' does not chain; add parentheses", peek().pos);
    }
    expect(Tok::end, "end of input");
    return {lhs, rhs};
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(std::string("expected ") + what + ", found '" + peek().text + "'", peek().pos);
    next();
  }

  Formula modality(Op op, Formula a, Formula b, std::size_t pos) {
    if (!in_signature(op, kind_))
      throw SignatureError("modality '" + op_keyword(op) + "' at " + std::to_string(pos) + " is not in the " +
                           to_string(kind_) + " signature");
    return Formula::make(op, std::move(a), std::move(b));
  }

  /// arrow := disj [('->' | '~>') arrow], right-associative. The second
  /// component reports the operator of an unparenthesised chain so that
  /// mixed chains can be rejected.
  std::pair<Formula, std::optional<Op>> arrow() {
    Formula lhs = disj();
    const Tok k = peek().kind;
    if (k != Tok::imp && k != Tok::sto) return {lhs, std::nullopt};
    const std::size_t pos = next().pos;
    const Op op = k == Tok::imp ? Op::imp : Op::sto;
    auto [rhs, rhs_chain] = arrow();
    if (rhs_chain && *rhs_chain != op)
      throw ParseError("'->' and '~>' mixed without parentheses", pos);
    if (op == Op::sto) return {modality(Op::sto, lhs, rhs, pos), op};
    return {Formula::imp(lhs, rhs), op};
  }

  Formula disj() {
    Formula f = conj();
    while (peek().kind == Tok::disj) {
      next();
      f = Formula::disj(f, conj());
    }
    return f;
  }

  Formula conj() {
    Formula f = unary();
    while (peek().kind == Tok::conj) {
      next();
      f = Formula::conj(f, unary());
    }
    return f;
  }

  Formula unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::box: case Tok::dia: case Tok::tri: {
        const std::size_t pos = next().pos;
        const Op op = t.kind == Tok::box ? Op::box : t.kind == Tok::dia ? Op::dia : Op::tri;
        return modality(op, unary(), {}, pos);
      }
      default: return atom();
    }
  }

  Formula atom() {
    const Token t = next();
    switch (t.kind) {
      case Tok::top: return Formula::top();
      case Tok::bot: return Formula::bot();
      case Tok::ident: return Formula::letter(t.text);
      case Tok::lparen: {
        Formula f = arrow().first;
        if (peek().kind == Tok::iff) {
          next();
          f = Formula::iff(f, arrow().first);
        }
        expect(Tok::rparen, "')'");
        return f;
      }
      default:
        throw ParseError(t.kind == Tok::end ? "unexpected end of input" : "unexpected '" + t.text + "'", t.pos);
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  Kind kind_;
};

}  // namespace detail

/// Parses ASCII formula syntax: atoms `T`, `F`, identifiers; prefix `box`,
/// `dia`, `tri`; `&` binds tighter than `|`, which binds tighter than the
/// right-associative `->` and `~>`; `a <-> b` abbreviates (a -> b) & (b -> a).
inline Formula parse(std::string_view text, Kind kind) {
  auto [lhs, rhs] = detail::Parser(text, kind).statement();
  return rhs ? Formula::iff(lhs, *rhs) : lhs;
}

/// Splits a top-level `<->`; nullopt when the text has none.
inline std::optional<AxiomPair> parse_axiom(std::string_view text, Kind kind) {
  auto [lhs, rhs] = detail::Parser(text, kind).statement();
  if (!rhs) return std::nullopt;
  return AxiomPair{lhs, *rhs};
}

/// Rank-1 axioms assumed sound for each kind's language.
inline std::vector<AxiomPair> stock_axioms(Kind kind) {
  std::vector<std::string> texts;
  switch (kind) {
    case Kind::box: texts = {"box T <-> T", "box p & box q <-> box (p & q)"}; break;
    case Kind::im: texts = {"tri (p & q) & tri p <-> tri (p & q)"}; break;
    case Kind::cin: case Kind::si: break;
  }
  std::vector<AxiomPair> out;
  for (const auto& t : texts) out.push_back(*parse_axiom(t, kind));
  return out;
}

}  // namespace gtw
