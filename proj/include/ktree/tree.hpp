#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ktree/error.hpp"

namespace ktree {

/// Largest branching factor accepted. Paths are written one decimal digit per
/// level, so k is capped at 10.
inline constexpr int kMaxBranching = 10;

/// Branching factor plus the two truncation depths used throughout: functions
/// are supported on depth <= support_depth, operators and norms are evaluated on
/// depth <= eval_depth.
struct TreeParams {
  int k = 2;
  int support_depth = 0;
  int eval_depth = 0;

  void validate() const;
};

/// A vertex of the implicit k-ary tree. The child-digit path is packed into
/// `code` as a base-k number (first digit most significant), so the default
/// ordering (depth, then code) is the canonical order: level by level,
/// lexicographic by path within a level.
struct VertexId {
  int depth = 0;
  std::uint64_t code = 0;

  static constexpr VertexId root() { return {}; }
  friend constexpr auto operator<=>(const VertexId&, const VertexId&) = default;
};

// Exact integer helpers. All throw Error(Errc::overflow) instead of wrapping.
std::uint64_t checked_pow(std::uint64_t base, int exponent);
std::uint64_t checked_add(std::uint64_t a, std::uint64_t b);
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

/// Number of vertices at depth < `depth`, i.e. the dense index of the first
/// vertex of level `depth`.
std::uint64_t level_offset(int k, int depth);
/// Number of vertices at depth <= `depth`: (k^{depth+1} - 1) / (k - 1).
std::uint64_t region_size(int k, int depth);

/// |S(x, r)| for x at depth j of the infinite tree.
std::uint64_t sphere_size(int k, int j, int r);
/// |B(x, r)| for x at depth j of the infinite tree.
std::uint64_t ball_size(int k, int j, int r);
/// |T_i ∩ S(x, r)| for x at depth j, where i = j + r - 2m and m is the number
/// of upward steps of the path from x.
std::uint64_t level_sphere_count(int k, int j, int r, int m);
/// Number of x in T_j at distance r from a fixed y in T_i (i = j + r - 2m).
/// Always <= k^m.
std::uint64_t transpose_count(int k, int i, int j, int r, int m);

/// Geometry of the rooted k-ary tree. A small value type; no vertices are ever
/// materialised.
class Tree {
public:
  explicit Tree(int k);

  int k() const noexcept { return k_; }

  /// Largest depth whose level still fits the 64-bit path code.
  int max_depth() const noexcept { return max_depth_; }

  std::uint64_t dense_index(VertexId v) const;
  VertexId vertex_at(std::uint64_t dense_index) const;

  VertexId make_vertex(std::span<const int> digits) const;
  std::vector<int> digits(VertexId v) const;
  int last_digit(VertexId v) const;
  bool is_valid(VertexId v) const;

  std::optional<VertexId> parent(VertexId v) const;
  VertexId ancestor(VertexId v, int m) const;
  VertexId child(VertexId v, int digit) const;

  /// Tree distance: steps up to the deepest common ancestor plus steps down.
  int distance(VertexId u, VertexId v) const;

  /// Visits every y with d(v, y) = r and depth(y) <= depth_cap, in canonical
  /// order (upward steps m ascending, then path ascending). No allocation.
  template <class Visitor>
  void for_each_sphere_member(VertexId v, int r, int depth_cap, Visitor&& visit) const;

  std::vector<VertexId> sphere_members(VertexId v, int r, int depth_cap) const;

  /// "depth,digits", e.g. "0," for the root and "2,01".
  std::string path_string(VertexId v) const;
  VertexId parse_path(std::string_view text) const;

private:
  std::uint64_t pow_k(int e) const { return pow_[static_cast<std::size_t>(e)]; }

  int k_;
  int max_depth_;
  std::vector<std::uint64_t> pow_;
};

template <class Visitor>
void Tree::for_each_sphere_member(VertexId v, int r, int depth_cap, Visitor&& visit) const {
  const int j = v.depth;
  if (r == 0) {
    if (j <= depth_cap) visit(v);
    return;
  }
  // m = 0: all descendants r levels down.
  if (j + r <= depth_cap) {
    if (j + r > max_depth_) fail(Errc::overflow, "sphere enumeration exceeds representable depth");
    const std::uint64_t span = pow_k(r);
    const std::uint64_t first = v.code * span;
    for (std::uint64_t c = first; c < first + span; ++c) visit(VertexId{j + r, c});
  }
  // 0 < m < r: up m steps, then into a sibling branch and down r - m - 1 more.
  const int m_hi = std::min(r - 1, j);
  for (int m = 1; m <= m_hi; ++m) {
    const int target = j + r - 2 * m;
    if (target > depth_cap) continue;
    if (target > max_depth_) fail(Errc::overflow, "sphere enumeration exceeds representable depth");
    const std::uint64_t anc = v.code / pow_k(m);
    const std::uint64_t back = (v.code / pow_k(m - 1)) % static_cast<std::uint64_t>(k_);
    const int down = r - m - 1;
    const std::uint64_t span = pow_k(down);
    for (int c = 0; c < k_; ++c) {
      if (static_cast<std::uint64_t>(c) == back) continue;
      const std::uint64_t first = (anc * static_cast<std::uint64_t>(k_) + static_cast<std::uint64_t>(c)) * span;
      for (std::uint64_t t = first; t < first + span; ++t) visit(VertexId{target, t});
    }
  }
  // m = r: the ancestor itself.
  if (r <= j && j - r <= depth_cap) visit(VertexId{j - r, v.code / pow_k(r)});
}

}  // namespace ktree
