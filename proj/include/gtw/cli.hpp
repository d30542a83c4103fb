#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtw/algebra.hpp"
#include "gtw/dot.hpp"
#include "gtw/duality.hpp"
#include "gtw/harness.hpp"
#include "gtw/json_io.hpp"
#include "gtw/parser.hpp"

namespace gtw::cli {

enum ExitCode { kOk = 0, kPropertyFailure = 1, kUsage = 2, kSizeGuard = 3 };

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw JsonInputError(path, e.what());
  }
}

inline Frame read_frame(const std::string& path) { return validate_frame(frame_from_json(read_json(path))); }

/// One formula per line; blank lines and lines starting with '#' are skipped.
inline std::vector<Formula> read_axioms(const std::string& path, Kind kind) {
  std::vector<Formula> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse(line, kind));
  }
  return out;
}

/// GTW_MAX_MEM (MiB) tightens the caps on the structures that grow with
/// memory; it never loosens them.
inline void apply_memory_budget(Caps& caps) {
  const char* env = std::getenv("GTW_MAX_MEM");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long mib = std::strtoull(env, &end, 10);
  if (end == env || mib == 0) return;
  caps.max_universe = std::min<std::uint64_t>(caps.max_universe, mib * 4000);
  caps.max_dual_points = std::min<std::uint64_t>(caps.max_dual_points, mib * 8000);
  caps.max_upsets = std::min<std::uint64_t>(caps.max_upsets, mib * 16000);
}

inline std::vector<int> parse_state_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error("bad state '" + item + "' in --seed-states");
    }
  }
  return out;
}

inline json eta_json(const StateMap& eta) {
  json out = json::array();
  for (std::size_t x = 0; x < eta.size(); ++x) out.push_back({static_cast<int>(x), eta[x]});
  return out;
}

/// Runs one command. Exit codes: 0 ok, 1 property failure, 2 usage or
/// input error, 3 size guard.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workbench for finite intuitionistic modal frames and algebras", "gtw"};
  app.require_subcommand(1);
  app.fallthrough();  // global caps may follow the subcommand
  std::uint64_t seed = 0;
  Caps caps;
  app.add_option("--seed", seed, "Seed for sampled frames")->capture_default_str();
  app.add_option("--max-upsets", caps.max_upsets, "Cap on upsets of a poset")->capture_default_str();
  app.add_option("--max-valuations", caps.max_valuations, "Cap on valuations per validity check")->capture_default_str();
  app.add_option("--max-universe", caps.max_universe, "Cap on candidate structures per universe")->capture_default_str();
  app.add_option("--max-maps", caps.max_maps, "Cap on maps scanned by searches")->capture_default_str();
  app.add_option("--max-algebra", caps.max_algebra, "Cap on algebra size")->capture_default_str();

  std::string sig = "box", formula, frame_path, valuation_path, variant = "tau", seed_states, map_path, from_path,
              to_path, axioms_path, kind_name = "box";
  std::vector<std::string> frame_paths;
  int n = 3;
  int union_limit = -1;
  std::uint64_t budget = std::uint64_t{1} << 32;

  auto* parse_cmd = app.add_subcommand("parse", "Parse a formula; print its AST and rank-1 status");
  parse_cmd->add_option("--sig", sig, "Signature: box, im, cin or si")->required();
  parse_cmd->add_option("--formula", formula)->required();

  auto* check_cmd = app.add_subcommand("check-frame", "Validate a frame file");
  check_cmd->add_option("--frame", frame_path)->required();

  auto* mc_cmd = app.add_subcommand("mc", "Truth set of a formula in a model");
  mc_cmd->add_option("--frame", frame_path)->required();
  mc_cmd->add_option("--valuation", valuation_path)->required();
  mc_cmd->add_option("--formula", formula)->required();

  auto* valid_cmd = app.add_subcommand("valid", "Frame validity of a formula");
  valid_cmd->add_option("--frame", frame_path)->required();
  valid_cmd->add_option("--formula", formula)->required();

  auto* ca_cmd = app.add_subcommand("ca", "Complex algebra of a frame as JSON");
  ca_cmd->add_option("--frame", frame_path)->required();

  auto* pe_cmd = app.add_subcommand("pe", "Prime filter extension of a frame");
  pe_cmd->add_option("--frame", frame_path)->required();
  pe_cmd->add_option("--variant", variant, "tau or sigma (sigma: im only)")->check(CLI::IsMember({"tau", "sigma"}));

  auto* du_cmd = app.add_subcommand("du", "Disjoint union of frames");
  du_cmd->add_option("--frames", frame_paths)->required()->expected(1, -1);

  auto* gensub_cmd = app.add_subcommand("gensub", "Subframe generated by states (box, si)");
  gensub_cmd->add_option("--frame", frame_path)->required();
  gensub_cmd->add_option("--seed-states", seed_states, "Comma-separated states")->required();

  auto* morph_cmd = app.add_subcommand("morph", "Check a map between frames");
  morph_cmd->add_option("--map", map_path)->required();
  morph_cmd->add_option("--from", from_path)->required();
  morph_cmd->add_option("--to", to_path)->required();

  auto* enum_cmd = app.add_subcommand("enum", "All frames up to isomorphism with at most n states");
  enum_cmd->add_option("--kind", kind_name)->required();
  enum_cmd->add_option("--n", n)->required();

  auto* fr_cmd = app.add_subcommand("fr", "Frames of a universe validating the axioms");
  fr_cmd->add_option("--kind", kind_name)->required();
  fr_cmd->add_option("--n", n)->required();
  fr_cmd->add_option("--axioms", axioms_path, "One formula per line")->required();

  auto* audit_cmd = app.add_subcommand("audit", "Closure audit of Fr(axioms) over a universe");
  audit_cmd->add_option("--kind", kind_name)->required();
  audit_cmd->add_option("--n", n)->required();
  audit_cmd->add_option("--axioms", axioms_path, "One formula per line")->required();
  audit_cmd->add_option("--union-limit", union_limit, "Largest disjoint union checked (default n+1)");
  audit_cmd->add_option("--budget", budget, "Search budget")->capture_default_str();

  auto* dot_cmd = app.add_subcommand("dot", "Graphviz rendering of a frame");
  dot_cmd->add_option("--frame", frame_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  apply_memory_budget(caps);

  try {
    if (parse_cmd->parsed()) {
      const Kind kind = parse_kind(sig);
      const Formula f = parse(formula, kind);
      out << ast_dump(f);
      out << "printed: " << to_string(f) << "\n";
      if (auto ax = parse_axiom(formula, kind))
        out << "rank-1 axiom: " << (is_rank1_axiom(*ax) ? "yes" : "no") << "\n";
      else
        out << "rank-1: " << (is_rank1(f) ? "yes" : "no") << "\n";
      return kOk;
    }
    if (check_cmd->parsed()) {
      const Frame f = frame_from_json(read_json(frame_path));
      try {
        validate_frame(f);
      } catch (const FrameConditionError& e) {
        out << "invalid " << to_string(f.kind) << " frame: " << e.what() << "\n";
        return kPropertyFailure;
      }
      out << "valid " << to_string(f.kind) << " frame with " << f.size() << " states\n";
      return kOk;
    }
    if (mc_cmd->parsed()) {
      const Frame f = read_frame(frame_path);
      const Valuation v = valuation_from_json(read_json(valuation_path), f.base);
      const Formula phi = parse(formula, f.kind);
      json j;
      j["formula"] = to_string(phi);
      j["truth_set"] = detail::set_json(truth_set(Model{f, v}, phi));
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (valid_cmd->parsed()) {
      const Frame f = read_frame(frame_path);
      const Formula phi = parse(formula, f.kind);
      const auto res = frame_validates(f, phi, caps);
      if (res.valid) {
        out << "valid\n";
        return kOk;
      }
      json j;
      j["counterexample"] = valuation_to_json(*res.counterexample);
      j["state"] = res.state;
      out << "not valid\n" << j.dump(2) << "\n";
      return kPropertyFailure;
    }
    if (ca_cmd->parsed()) {
      out << algebra_to_json(complex_algebra(read_frame(frame_path), caps)).dump(2) << "\n";
      return kOk;
    }
    if (pe_cmd->parsed()) {
      const Frame f = read_frame(frame_path);
      const Variant v = variant == "sigma" ? Variant::sigma : Variant::tau;
      const auto pe = pfe(f, v, caps);
      json j;
      j["variant"] = variant;
      j["frame"] = frame_to_json(pe.frame);
      j["eta"] = eta_json(pe.eta);
      json filters = json::array();
      for (const auto& q : pe.dual.space.filters) filters.push_back(q.members());
      j["prime_filters"] = filters;
      j["isomorphic"] = is_frame_isomorphism(pe.eta, f, pe.frame);
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (du_cmd->parsed()) {
      std::vector<Frame> parts;
      for (const auto& p : frame_paths) parts.push_back(read_frame(p));
      const auto co = disjoint_union(parts);
      json j;
      j["frame"] = frame_to_json(co.frame);
      j["injections"] = co.injections;
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (gensub_cmd->parsed()) {
      const Frame f = read_frame(frame_path);
      Mask seed_mask = 0;
      for (int s : parse_state_list(seed_states)) {
        if (s < 0 || s >= f.size()) throw Error("seed state " + std::to_string(s) + " out of range");
        seed_mask |= bit(s);
      }
      const auto [sub, emb] = generate_subframe(f, seed_mask);
      json j;
      j["frame"] = frame_to_json(sub);
      j["embedding"] = emb;
      j["generated_subframe"] = generated_subframe_check(emb, sub, f);
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (morph_cmd->parsed()) {
      const Frame x = read_frame(from_path), y = read_frame(to_path);
      const StateMap m = map_from_json(read_json(map_path), x.size(), y.size());
      const auto res = is_frame_morphism(m, x, y);
      json j;
      j["morphism"] = res.ok;
      j["witness"] = res.ok ? json(nullptr) : json(res.witness);
      j["surjective"] = is_surjective(m, y.size());
      j["order_embedding"] = is_order_embedding(m, x.base, y.base);
      j["p_morphic_image"] = res.ok && is_surjective(m, y.size());
      j["generated_subframe"] = res.ok && is_order_embedding(m, x.base, y.base);
      out << j.dump(2) << "\n";
      return res.ok ? kOk : kPropertyFailure;
    }
    if (enum_cmd->parsed()) {
      const Kind kind = parse_kind(kind_name);
      const auto u = build_universe(kind, n, caps);
      json j;
      j["kind"] = to_string(kind);
      j["n"] = n;
      j["count"] = u.size();
      json frames = json::array();
      for (const auto& f : u.frames) frames.push_back(frame_to_json(f));
      j["frames"] = frames;
      out << j.dump(2) << "\n";
      return kOk;
    }
    if (fr_cmd->parsed() || audit_cmd->parsed()) {
      const Kind kind = parse_kind(kind_name);
      const auto phis = read_axioms(axioms_path, kind);
      const auto u = build_universe(kind, n, caps);
      const auto members = fr_class(phis, u, caps);
      json axioms = json::array();
      for (const auto& phi : phis) axioms.push_back(to_string(phi));
      if (fr_cmd->parsed()) {
        json j;
        j["kind"] = to_string(kind);
        j["n"] = n;
        j["axioms"] = axioms;
        j["universe_frames"] = u.size();
        j["count"] = members.size();
        j["members"] = members;
        out << j.dump(2) << "\n";
        return kOk;
      }
      FrameClass k{&u, {members.begin(), members.end()}, phis};
      AuditOptions opt;
      opt.union_size_limit = union_limit;
      opt.budget = budget;
      json report;
      report["axioms"] = axioms;
      report["audit"] = audit_closure(k, opt, caps);
      out << report.dump(2) << "\n";
      return report["audit"]["passed"].get<bool>() ? kOk : kPropertyFailure;
    }
    if (dot_cmd->parsed()) {
      out << to_dot(read_frame(frame_path));
      return kOk;
    }
  } catch (const SizeGuard& e) {
    err << "size guard: " << e.what() << "\n";
    return kSizeGuard;
  } catch (const FrameConditionError& e) {
    err << "invalid frame: " << e.what() << "\n";
    return kPropertyFailure;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return kPropertyFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace gtw::cli
