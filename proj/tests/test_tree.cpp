#include <doctest.h>

#include <algorithm>

#include "ktree/oracle.hpp"
#include "ktree/tree.hpp"
#include "support.hpp"

using namespace ktree;

TEST_CASE("dense index round trip in canonical order") {
  for (int k : {2, 3, 5}) {
    const Tree tree(k);
    const auto all = ktest::all_vertices(k, 4);
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(tree.vertex_at(i) == all[i]);
      CHECK(tree.dense_index(all[i]) == i);
    }
    CHECK(region_size(k, 4) == all.size());
  }
}

TEST_CASE("paths parse and print") {
  const Tree tree(3);
  const VertexId v = tree.parse_path("4,0212");
  CHECK(v.depth == 4);
  CHECK(tree.path_string(v) == "4,0212");
  CHECK(tree.path_string(VertexId::root()) == "0,");
  CHECK_THROWS_AS(tree.parse_path("2,013"), Error);
  CHECK_THROWS_AS(tree.parse_path("2,03"), Error);
  CHECK_THROWS_AS(tree.parse_path("013"), Error);
}

TEST_CASE("parent, child and ancestor") {
  const Tree tree(2);
  const VertexId v = tree.parse_path("3,101");
  CHECK(tree.parent(v) == tree.parse_path("2,10"));
  CHECK(tree.ancestor(v, 3) == VertexId::root());
  CHECK(tree.child(v, 1) == tree.parse_path("4,1011"));
  CHECK_FALSE(tree.parent(VertexId::root()).has_value());
  CHECK_THROWS_AS(tree.ancestor(v, 4), Error);
  CHECK_THROWS_AS(tree.child(v, 2), Error);
}

TEST_CASE("distance matches digit-prefix reference") {
  for (int k : {2, 3}) {
    const Tree tree(k);
    const auto all = ktest::all_vertices(k, 4);
    for (VertexId a : all)
      for (VertexId b : all) CHECK(tree.distance(a, b) == ktest::brute_distance(k, a, b));
  }
}

TEST_CASE("sphere and ball closed forms") {
  for (int k : {2, 3, 4}) {
    for (int j = 0; j <= 4; ++j) {
      const VertexId x{j, 0};
      std::uint64_t ball = 0;
      for (int r = 0; r <= 5; ++r) {
        const std::uint64_t s = ktest::brute_sphere_size(k, x, r);
        ball += s;
        CHECK(sphere_size(k, j, r) == s);
        CHECK(ball_size(k, j, r) == ball);
        std::uint64_t levels = 0;
        for (int m = 0; m <= r; ++m) levels += level_sphere_count(k, j, r, m);
        CHECK(levels == s);
      }
    }
  }
}

TEST_CASE("level counts by depth of the sphere member") {
  const int k = 3;
  for (int j = 0; j <= 3; ++j)
    for (int r = 0; r <= 4; ++r) {
      const VertexId x{j, j == 0 ? 0u : 1u};
      const auto sphere = ktest::brute_sphere(k, x, r, j + r);
      for (int m = 0; m <= r; ++m) {
        const int i = j + r - 2 * m;
        const auto count = static_cast<std::uint64_t>(
            std::count_if(sphere.begin(), sphere.end(), [&](VertexId y) { return y.depth == i; }));
        CHECK(level_sphere_count(k, j, r, m) == count);
      }
    }
}

TEST_CASE("transpose count from the other side") {
  // Vertices x at depth i with y in S(x, r) for a fixed y at depth j.
  const int k = 2;
  for (int j = 0; j <= 4; ++j)
    for (int r = 0; r <= 4; ++r)
      for (int m = 0; m <= r; ++m) {
        const int i = j - r + 2 * m;
        if (i < 0) continue;
        const VertexId y{j, 0};
        std::uint64_t count = 0;
        for (VertexId x : ktest::all_vertices(k, i))
          if (x.depth == i && ktest::brute_distance(k, x, y) == r) ++count;
        CHECK(transpose_count(k, j, i, r, m) == count);
      }
}

TEST_CASE("sphere enumeration honours the depth cap") {
  const int k = 2;
  const Tree tree(k);
  for (VertexId x : ktest::all_vertices(k, 3))
    for (int r = 0; r <= 4; ++r)
      for (int cap = 0; cap <= x.depth + r; ++cap) {
        auto fast = tree.sphere_members(x, r, cap);
        std::sort(fast.begin(), fast.end());
        CHECK(fast == ktest::brute_sphere(k, x, r, cap));
      }
}

TEST_CASE("breadth-first oracle agrees with the reference") {
  const int k = 3;
  const VertexId x{2, 5};
  const auto layers = oracle::bfs_layers(k, x, 4, 6);
  for (int r = 0; r <= 4; ++r) CHECK(layers[static_cast<std::size_t>(r)] == ktest::brute_sphere(k, x, r, 6));
  CHECK(oracle::bfs_distance(k, x, VertexId{3, 0}) == ktest::brute_distance(k, x, VertexId{3, 0}));
  CHECK_THROWS_AS(oracle::bfs_layers(k, x, 12, 14, 1000), Error);
}

TEST_CASE("checked arithmetic refuses overflow") {
  CHECK(checked_pow(2, 63) == (std::uint64_t{1} << 63));
  CHECK_THROWS_AS(checked_pow(2, 64), Error);
  CHECK_THROWS_AS(checked_mul(std::uint64_t{1} << 40, std::uint64_t{1} << 30), Error);
  CHECK_THROWS_AS(checked_add(~std::uint64_t{0}, 1), Error);
  CHECK_THROWS_AS(sphere_size(2, 0, 70), Error);
  CHECK_THROWS_AS(Tree(1), Error);
  CHECK_THROWS_AS(Tree(kMaxBranching + 1), Error);
}
