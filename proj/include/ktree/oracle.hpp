#pragma once

// Brute-force breadth-first oracles. They walk an explicit truncated tree whose
// vertices are digit vectors, sharing no code with the closed forms or the
// code-arithmetic enumeration in tree.hpp. Used for cross-checking only.

#include <cstddef>
#include <vector>

#include "ktree/tree.hpp"

namespace ktree::oracle {

inline constexpr std::size_t kDefaultGuard = 100000;

/// Vertices at exact distance 0..r_max from v, one layer per distance, each
/// sorted canonically. Only vertices of depth <= depth_cap are kept; the walk
/// itself may pass through depth max(depth(v), depth_cap). Throws
/// Error(Errc::oracle_guard) if more than `guard` vertices would be visited.
std::vector<std::vector<VertexId>> bfs_layers(int k, VertexId v, int r_max, int depth_cap,
                                              std::size_t guard = kDefaultGuard);

/// All y with d(v, y) = r and depth(y) <= depth_cap, canonical order.
std::vector<VertexId> sphere_bfs(int k, VertexId v, int r, int depth_cap, std::size_t guard = kDefaultGuard);

/// Distance by breadth-first search from u until v is reached.
int bfs_distance(int k, VertexId u, VertexId v, std::size_t guard = kDefaultGuard);

}  // namespace ktree::oracle
