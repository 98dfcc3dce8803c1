#pragma once

// Brute-force references for tests. Vertices are handled as explicit digit
// vectors; nothing here calls the tree arithmetic under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ktree/function.hpp"
#include "ktree/tree.hpp"

namespace ktest {

using ktree::VertexId;

inline std::vector<int> digits_of(int k, VertexId v) {
  std::vector<int> out(static_cast<std::size_t>(v.depth));
  std::uint64_t c = v.code;
  for (int t = v.depth - 1; t >= 0; --t) {
    out[static_cast<std::size_t>(t)] = static_cast<int>(c % static_cast<std::uint64_t>(k));
    c /= static_cast<std::uint64_t>(k);
  }
  return out;
}

inline int brute_distance(int k, VertexId a, VertexId b) {
  const auto da = digits_of(k, a), db = digits_of(k, b);
  std::size_t common = 0;
  while (common < da.size() && common < db.size() && da[common] == db[common]) ++common;
  return static_cast<int>(da.size() + db.size() - 2 * common);
}

inline std::vector<VertexId> all_vertices(int k, int depth) {
  std::vector<VertexId> out;
  std::uint64_t count = 1;
  for (int d = 0; d <= depth; ++d, count *= static_cast<std::uint64_t>(k))
    for (std::uint64_t c = 0; c < count; ++c) out.push_back(VertexId{d, c});
  return out;
}

/// S(x, r) restricted to depth <= cap, canonical order.
inline std::vector<VertexId> brute_sphere(int k, VertexId x, int r, int cap) {
  std::vector<VertexId> out;
  for (VertexId y : all_vertices(k, cap))
    if (brute_distance(k, x, y) == r) out.push_back(y);
  return out;
}

/// |S(x, r)| in the infinite tree, counted on a region deep enough to hold it.
inline std::uint64_t brute_sphere_size(int k, VertexId x, int r) {
  return brute_sphere(k, x, r, x.depth + r).size();
}

inline double brute_average(const ktree::TreeFunction& f, VertexId x, int r, double alpha) {
  const int k = f.k();
  double sum = 0.0;
  for (VertexId y : brute_sphere(k, x, r, f.max_depth())) sum += f(y);
  return sum / std::pow(static_cast<double>(brute_sphere_size(k, x, r)), 1.0 - alpha);
}

/// Largest radius at which a support vertex of f is visible from x.
inline int brute_reach(const ktree::TreeFunction& f, VertexId x) {
  int out = 0;
  for (VertexId y : f.support()) out = std::max(out, brute_distance(f.k(), x, y));
  return out;
}

inline double brute_spherical_maximal(const ktree::TreeFunction& f, VertexId x, double alpha) {
  double best = 0.0;
  for (int r = 0; r <= brute_reach(f, x); ++r) best = std::max(best, brute_average(f, x, r, alpha));
  return best;
}

inline double brute_ball_maximal(const ktree::TreeFunction& f, VertexId x, double alpha) {
  const int k = f.k();
  double best = 0.0, sum = 0.0;
  std::uint64_t size = 0;
  for (int r = 0; r <= brute_reach(f, x); ++r) {
    for (VertexId y : brute_sphere(k, x, r, f.max_depth())) sum += f(y);
    size += brute_sphere_size(k, x, r);
    best = std::max(best, sum / std::pow(static_cast<double>(size), 1.0 - alpha));
  }
  return best;
}

/// sum_{x in E} sum_{y in F, d(x,y)=r} w(y).
inline double brute_bilinear(const ktree::Weight& w, const std::vector<VertexId>& E, const std::vector<VertexId>& F,
                             int r) {
  const int k = w.k();
  double sum = 0.0;
  for (VertexId x : E)
    for (VertexId y : F)
      if (brute_distance(k, x, y) == r) sum += w(y);
  return sum;
}

inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace ktest
