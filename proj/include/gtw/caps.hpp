#pragma once

#include <cstdint>

namespace gtw {

/// Size caps for exhaustive computations. Every loop that can blow up checks
/// its predicted size against one of these and throws SizeGuard instead.
struct Caps {
  std::uint64_t max_upsets = 1u << 20;
  std::uint64_t max_valuations = 1u << 22;
  std::uint64_t max_assignments = 1u << 22;
  int max_algebra = 4096;           // prime-filter enumeration
  int max_algebra_scan = 16;        // literal subset-scan route for prime filters
  int max_subalgebra_scan = 8;
  std::uint64_t max_maps = 1u << 24;
  int max_poset_enum = 5;
  std::uint64_t max_universe = 4'000'000;  // candidate structures per universe
  std::uint64_t max_dual_points = 1u << 20;
};

}  // namespace gtw
