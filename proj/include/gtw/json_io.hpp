#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gtw/algebra.hpp"
#include "gtw/error.hpp"
#include "gtw/frame.hpp"
#include "gtw/kind.hpp"
#include "gtw/order.hpp"

namespace gtw {

using json = nlohmann::ordered_json;

/// Malformed JSON input; `path` locates the offending value.
class JsonInputError : public Error {
 public:
  JsonInputError(const std::string& path, const std::string& msg) : Error(path + ": " + msg), path(path) {}
  std::string path;
};

namespace detail {

inline const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw JsonInputError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw JsonInputError(path + "." + key, "missing");
  return *it;
}

inline int index_at(const json& j, const std::string& path, int bound) {
  if (!j.is_number_integer()) throw JsonInputError(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < 0 || v >= bound) throw JsonInputError(path, "index " + std::to_string(v) + " out of range");
  return static_cast<int>(v);
}

inline std::vector<std::pair<int, int>> pairs_at(const json& j, const std::string& path, int n) {
  if (!j.is_array()) throw JsonInputError(path, "expected an array of pairs");
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw JsonInputError(p, "expected a pair");
    out.emplace_back(index_at(j[i][0], p + "[0]", n), index_at(j[i][1], p + "[1]", n));
  }
  return out;
}

inline Mask set_at(const json& j, const std::string& path, int n) {
  if (!j.is_array()) throw JsonInputError(path, "expected an array of states");
  Mask m = 0;
  for (std::size_t i = 0; i < j.size(); ++i) m |= bit(index_at(j[i], path + "[" + std::to_string(i) + "]", n));
  return m;
}

inline std::vector<Family> families_at(const json& j, const std::string& path, int n, const Poset* upsets_of) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw JsonInputError(path, "expected one family per state");
  if (n > kMaxFamilyStates) throw SizeGuard("neighbourhood frame size", static_cast<std::uint64_t>(n), kMaxFamilyStates);
  std::vector<Family> out;
  for (int x = 0; x < n; ++x) {
    const std::string px = path + "[" + std::to_string(x) + "]";
    if (!j[x].is_array()) throw JsonInputError(px, "expected a list of sets");
    Family w = 0;
    for (std::size_t i = 0; i < j[x].size(); ++i) {
      const std::string pi = px + "[" + std::to_string(i) + "]";
      const Mask s = set_at(j[x][i], pi, n);
      if (upsets_of && !upsets_of->is_upset(s)) throw JsonInputError(pi, mask_to_string(s) + " is not an upset");
      w |= family_bit(s);
    }
    out.push_back(w);
  }
  return out;
}

inline json set_json(Mask m) {
  json a = json::array();
  for_each_bit(m, [&](int i) { a.push_back(i); });
  return a;
}

inline json families_json(const std::vector<Family>& fams, int n) {
  json out = json::array();
  for (Family w : fams) {
    json list = json::array();
    for (Mask s = 0; s < (Mask{1} << n); ++s)
      if (family_has(w, s)) list.push_back(set_json(s));
    out.push_back(list);
  }
  return out;
}

}  // namespace detail

/// Reads a frame. `leq` lists generating pairs; the structural conditions
/// are not checked here (see validate_frame).
inline Frame frame_from_json(const json& j) {
  const std::string root = "$";
  const json& kind_j = detail::member(j, root, "kind");
  if (!kind_j.is_string()) throw JsonInputError("$.kind", "expected a string");
  Kind kind;
  try {
    kind = parse_kind(kind_j.get<std::string>());
  } catch (const Error& e) {
    throw JsonInputError("$.kind", e.what());
  }
  const json& size_j = detail::member(j, root, "size");
  if (!size_j.is_number_integer() || size_j.get<long long>() < 1 || size_j.get<long long>() > kMaxStates)
    throw JsonInputError("$.size", "expected an integer between 1 and 64");
  const int n = size_j.get<int>();
  std::vector<std::pair<int, int>> leq;
  if (j.contains("leq")) leq = detail::pairs_at(j["leq"], "$.leq", n);
  Poset p;
  try {
    p = Poset::from_generators(n, leq);
  } catch (const CycleError& e) {
    throw JsonInputError("$.leq", e.what());
  }
  Frame f{kind, p};
  switch (kind) {
    case Kind::box:
    case Kind::si: {
      f.rel.assign(n, 0);
      if (j.contains("rel"))
        for (auto [a, b] : detail::pairs_at(j["rel"], "$.rel", n)) f.rel[a] |= bit(b);
      break;
    }
    case Kind::im: f.nbhd = detail::families_at(detail::member(j, root, "nbhd"), "$.nbhd", n, &f.base); break;
    case Kind::cin:
      f.nbox = detail::families_at(detail::member(j, root, "nbox"), "$.nbox", n, nullptr);
      f.ndia = detail::families_at(detail::member(j, root, "ndia"), "$.ndia", n, nullptr);
      break;
  }
  return f;
}

inline json frame_to_json(const Frame& f) {
  json j;
  j["kind"] = to_string(f.kind);
  j["size"] = f.size();
  json leq = json::array();
  for (auto [a, b] : f.base.covers()) leq.push_back({a, b});
  j["leq"] = leq;
  switch (f.kind) {
    case Kind::box:
    case Kind::si: {
      json rel = json::array();
      for (int x = 0; x < f.size(); ++x) for_each_bit(f.rel[x], [&](int y) { rel.push_back({x, y}); });
      j["rel"] = rel;
      break;
    }
    case Kind::im: j["nbhd"] = detail::families_json(f.nbhd, f.size()); break;
    case Kind::cin:
      j["nbox"] = detail::families_json(f.nbox, f.size());
      j["ndia"] = detail::families_json(f.ndia, f.size());
      break;
  }
  return j;
}

/// `{"p":[0,2],...}`; every set must be an upset of the poset.
inline Valuation valuation_from_json(const json& j, const Poset& p) {
  if (!j.is_object()) throw JsonInputError("$", "expected an object mapping letters to state lists");
  Valuation v;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = "$." + it.key();
    const Mask m = detail::set_at(it.value(), path, p.size());
    if (!p.is_upset(m)) throw JsonInputError(path, mask_to_string(m) + " is not an upset");
    v[it.key()] = m;
  }
  return v;
}

inline json valuation_to_json(const Valuation& v) {
  json j = json::object();
  for (const auto& [name, m] : v) j[name] = detail::set_json(m);
  return j;
}

/// A map as a bare array `[0,1,1]` or as `{"map":[...]}`.
inline StateMap map_from_json(const json& j, int dom_size, int cod_size) {
  const json& arr = j.is_object() ? detail::member(j, "$", "map") : j;
  const std::string path = j.is_object() ? "$.map" : "$";
  if (!arr.is_array() || static_cast<int>(arr.size()) != dom_size)
    throw JsonInputError(path, "expected " + std::to_string(dom_size) + " target states");
  StateMap f;
  for (std::size_t i = 0; i < arr.size(); ++i)
    f.push_back(detail::index_at(arr[i], path + "[" + std::to_string(i) + "]", cod_size));
  return f;
}

inline json table_json(const std::vector<int>& t, int n) {
  json rows = json::array();
  for (int a = 0; a < n; ++a) rows.push_back(std::vector<int>(t.begin() + a * n, t.begin() + (a + 1) * n));
  return rows;
}

/// Tables by element index. Complex algebras also list the upset each
/// element stands for.
inline json algebra_to_json(const ModalAlgebra& a) {
  const int n = a.size();
  json j;
  j["kind"] = to_string(a.kind());
  j["size"] = n;
  if (a.base().has_labels()) {
    json el = json::array();
    for (Mask m : a.base().labels()) el.push_back(detail::set_json(m));
    j["elements"] = el;
  }
  j["top"] = a.base().top();
  j["bottom"] = a.base().bottom();
  j["meet"] = table_json(a.base().meet_table(), n);
  j["join"] = table_json(a.base().join_table(), n);
  j["imp"] = table_json(a.base().imp_table(), n);
  switch (a.kind()) {
    case Kind::box: j["box"] = a.op1_table(); break;
    case Kind::im: j["tri"] = a.op1_table(); break;
    case Kind::cin:
      j["box"] = a.op1_table();
      j["dia"] = a.op2_table();
      break;
    case Kind::si: j["sto"] = table_json(a.binop_table(), n); break;
  }
  return j;
}

inline ModalAlgebra algebra_from_json(const json& j) {
  const std::string root = "$";
  Kind kind;
  try {
    kind = parse_kind(detail::member(j, root, "kind").get<std::string>());
  } catch (const Error& e) {
    throw JsonInputError("$.kind", e.what());
  }
  const json& size_j = detail::member(j, root, "size");
  if (!size_j.is_number_integer() || size_j.get<int>() < 1) throw JsonInputError("$.size", "expected a positive integer");
  const int n = size_j.get<int>();
  auto vec = [&](const char* key) {
    const json& t = detail::member(j, root, key);
    const std::string path = std::string("$.") + key;
    if (!t.is_array() || static_cast<int>(t.size()) != n) throw JsonInputError(path, "expected " + std::to_string(n) + " entries");
    std::vector<int> out;
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(detail::index_at(t[i], path + "[" + std::to_string(i) + "]", n));
    return out;
  };
  auto table = [&](const char* key) {
    const json& t = detail::member(j, root, key);
    const std::string path = std::string("$.") + key;
    if (!t.is_array() || static_cast<int>(t.size()) != n) throw JsonInputError(path, "expected " + std::to_string(n) + " rows");
    std::vector<int> out;
    for (int a = 0; a < n; ++a) {
      const std::string pa = path + "[" + std::to_string(a) + "]";
      if (!t[a].is_array() || static_cast<int>(t[a].size()) != n) throw JsonInputError(pa, "expected " + std::to_string(n) + " entries");
      for (int b = 0; b < n; ++b) out.push_back(detail::index_at(t[a][b], pa + "[" + std::to_string(b) + "]", n));
    }
    return out;
  };
  const int top = detail::index_at(detail::member(j, root, "top"), "$.top", n);
  const int bottom = detail::index_at(detail::member(j, root, "bottom"), "$.bottom", n);
  auto lattice = FinDL::from_tables(n, table("meet"), table("join"), top, bottom);
  if (j.contains("elements")) {
    std::vector<Mask> labels;
    const json& el = j["elements"];
    if (!el.is_array() || static_cast<int>(el.size()) != n) throw JsonInputError("$.elements", "expected one set per element");
    for (int a = 0; a < n; ++a) labels.push_back(detail::set_at(el[a], "$.elements[" + std::to_string(a) + "]", kMaxStates));
    if (std::is_sorted(labels.begin(), labels.end())) lattice.set_labels(labels);
  }
  FinHA base = FinHA::from_tables(std::move(lattice), table("imp"));
  switch (kind) {
    case Kind::box: return ModalAlgebra::make(kind, std::move(base), vec("box"));
    case Kind::im: return ModalAlgebra::make(kind, std::move(base), vec("tri"));
    case Kind::cin: return ModalAlgebra::make(kind, std::move(base), vec("box"), vec("dia"));
    case Kind::si: return ModalAlgebra::make(kind, std::move(base), {}, {}, table("sto"));
  }
  throw Error("unreachable");
}

}  // namespace gtw
