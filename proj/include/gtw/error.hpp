#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gtw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The reflexive-transitive closure of the generating pairs has a cycle.
class CycleError : public Error {
 public:
  CycleError(int a, int b)
      : Error("order has a cycle through " + std::to_string(a) + " and " + std::to_string(b)),
        first(a),
        second(b) {}
  int first, second;
};

/// A computation would exceed a configured size cap.
class SizeGuard : public Error {
 public:
  SizeGuard(const std::string& what, std::uint64_t required, std::uint64_t cap)
      : Error(what + ": requires " + std::to_string(required) + ", cap is " + std::to_string(cap)),
        required(required),
        cap(cap) {}
  std::uint64_t required, cap;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : Error("parse error at " + std::to_string(pos) + ": " + msg), position(pos) {}
  std::size_t position;
};

class SignatureError : public Error {
 public:
  using Error::Error;
};

class MissingLetterError : public Error {
 public:
  explicit MissingLetterError(const std::string& letter)
      : Error("valuation does not cover letter '" + letter + "'"), letter(letter) {}
  std::string letter;
};

/// A frame violates one of its kind's structural conditions.
class FrameConditionError : public Error {
 public:
  FrameConditionError(std::string condition, std::string witness)
      : Error(condition + " violated: " + witness),
        condition(std::move(condition)),
        witness(std::move(witness)) {}
  std::string condition, witness;
};

class KindMismatch : public Error {
 public:
  using Error::Error;
};

/// Operation is not available for this frame or algebra kind.
class KindError : public Error {
 public:
  using Error::Error;
};

/// Malformed algebra tables or a violated operator equation.
class AlgebraError : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree did not; indicates a bug, not bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gtw
