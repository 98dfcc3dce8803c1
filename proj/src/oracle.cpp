#include "ktree/oracle.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace ktree::oracle {

namespace {

using Path = std::vector<int>;

VertexId to_vertex(int k, const Path& path) {
  std::uint64_t code = 0;
  for (int d : path) code = code * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(d);
  return {static_cast<int>(path.size()), code};
}

Path to_path(int k, VertexId v) {
  Path path(static_cast<std::size_t>(v.depth));
  std::uint64_t code = v.code;
  for (int i = v.depth - 1; i >= 0; --i) {
    path[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::uint64_t>(k));
    code /= static_cast<std::uint64_t>(k);
  }
  return path;
}

void guard_trip(std::size_t guard) {
  fail(Errc::oracle_guard, "BFS oracle refused: region exceeds " + std::to_string(guard) + " vertices");
}

}  // namespace

std::vector<std::vector<VertexId>> bfs_layers(int k, VertexId v, int r_max, int depth_cap, std::size_t guard) {
  if (k < 2) fail(Errc::domain, "branching factor must be >= 2");
  if (r_max < 0) fail(Errc::domain, "radius must be nonnegative");
  const int walk_cap = std::max(v.depth, depth_cap);

  std::set<Path> seen;
  std::vector<Path> frontier{to_path(k, v)};
  seen.insert(frontier.front());

  std::vector<std::vector<VertexId>> layers;
  for (int r = 0; r <= r_max; ++r) {
    std::vector<VertexId> layer;
    for (const Path& p : frontier)
      if (static_cast<int>(p.size()) <= depth_cap) layer.push_back(to_vertex(k, p));
    std::sort(layer.begin(), layer.end());
    layers.push_back(std::move(layer));
    if (r == r_max) break;

    std::vector<Path> next;
    for (const Path& p : frontier) {
      auto visit = [&](Path&& q) {
        if (seen.insert(q).second) {
          if (seen.size() > guard) guard_trip(guard);
          next.push_back(std::move(q));
        }
      };
      if (!p.empty()) visit(Path(p.begin(), p.end() - 1));
      if (static_cast<int>(p.size()) < walk_cap) {
        for (int c = 0; c < k; ++c) {
          Path q = p;
          q.push_back(c);
          visit(std::move(q));
        }
      }
    }
    frontier = std::move(next);
  }
  return layers;
}

std::vector<VertexId> sphere_bfs(int k, VertexId v, int r, int depth_cap, std::size_t guard) {
  return std::move(bfs_layers(k, v, r, depth_cap, guard).back());
}

int bfs_distance(int k, VertexId u, VertexId v, std::size_t guard) {
  const int cap = std::max(u.depth, v.depth);
  const auto layers = bfs_layers(k, u, u.depth + v.depth, cap, guard);
  for (std::size_t r = 0; r < layers.size(); ++r)
    if (std::binary_search(layers[r].begin(), layers[r].end(), v)) return static_cast<int>(r);
  fail(Errc::out_of_tree, "BFS did not reach target vertex");
}

}  // namespace ktree::oracle
