#pragma once

#include <string>
#include <string_view>

#include "gtw/error.hpp"

namespace gtw {

/// The four frame/logic kinds: normal box, monotone (IM), coupled
/// neighbourhood (CIN), strict implication (SI).
enum class Kind { box, im, cin, si };

inline constexpr Kind kAllKinds[] = {Kind::box, Kind::im, Kind::cin, Kind::si};

inline std::string to_string(Kind k) {
  switch (k) {
    case Kind::box: return "box";
    case Kind::im: return "im";
    case Kind::cin: return "cin";
    case Kind::si: return "si";
  }
  return "?";
}

inline Kind parse_kind(std::string_view s) {
  if (s == "box") return Kind::box;
  if (s == "im") return Kind::im;
  if (s == "cin") return Kind::cin;
  if (s == "si") return Kind::si;
  throw Error("unknown kind '" + std::string(s) + "' (expected box, im, cin or si)");
}

}  // namespace gtw
