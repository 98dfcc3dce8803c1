#include "ktree/averages.hpp"

#include <algorithm>
#include <cmath>

#include "ktree/oracle.hpp"
#include "ktree/parallel.hpp"

namespace ktree {

DescendantSums::DescendantSums(const TreeFunction& f, Strategy strategy)
    : tree_(f.k()), depth_(f.max_depth()), strategy_(strategy) {
  const int k = f.k();
  const auto dense = f.dense();
  auto level_values = [&](int level) {
    const auto offset = level_offset(k, level);
    const auto count = checked_pow(static_cast<std::uint64_t>(k), level);
    return std::vector<double>(dense.begin() + static_cast<std::ptrdiff_t>(offset),
                               dense.begin() + static_cast<std::ptrdiff_t>(offset + count));
  };

  if (strategy_ == Strategy::lean) {
    prefix_.resize(static_cast<std::size_t>(depth_) + 1);
    for (int level = 0; level <= depth_; ++level) {
      const auto values = level_values(level);
      auto& pre = prefix_[static_cast<std::size_t>(level)];
      pre.assign(values.size() + 1, 0.0);
      for (std::size_t c = 0; c < values.size(); ++c) pre[c + 1] = pre[c] + values[c];
    }
    return;
  }

  table_.resize(static_cast<std::size_t>(depth_) + 1);
  for (int level = depth_; level >= 0; --level) {
    auto& rows = table_[static_cast<std::size_t>(level)];
    rows.resize(static_cast<std::size_t>(depth_ - level) + 1);
    rows[0] = level_values(level);
    const std::size_t width = rows[0].size();
    for (int d = 1; d <= depth_ - level; ++d) {
      const auto& below = table_[static_cast<std::size_t>(level) + 1][static_cast<std::size_t>(d) - 1];
      auto& row = rows[static_cast<std::size_t>(d)];
      row.assign(width, 0.0);
      for (std::size_t c = 0; c < width; ++c) {
        double s = 0.0;
        for (int t = 0; t < k; ++t) s += below[c * static_cast<std::size_t>(k) + static_cast<std::size_t>(t)];
        row[c] = s;
      }
    }
  }
}

double DescendantSums::at(VertexId v, int d) const {
  if (d < 0 || v.depth + d > depth_) return 0.0;
  if (strategy_ == Strategy::table)
    return table_[static_cast<std::size_t>(v.depth)][static_cast<std::size_t>(d)][v.code];
  const auto span = checked_pow(static_cast<std::uint64_t>(tree_.k()), d);
  const auto& pre = prefix_[static_cast<std::size_t>(v.depth + d)];
  return pre[(v.code + 1) * span] - pre[v.code * span];
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) fail(Errc::domain, "alpha must lie in [0, 1)");
}

double sphere_normaliser(int k, int j, int r, double alpha) {
  return std::pow(static_cast<double>(sphere_size(k, j, r)), 1.0 - alpha);
}

double ball_normaliser(int k, int j, int r, double alpha) {
  return std::pow(static_cast<double>(ball_size(k, j, r)), 1.0 - alpha);
}

double equivalence_constant(int k, double alpha) {
  check_alpha(alpha);
  return std::pow(2.0, 1.0 - alpha) / (1.0 - std::pow(static_cast<double>(k), -(1.0 - alpha)));
}

SphericalEvaluator::SphericalEvaluator(const TreeFunction& f, DescendantSums::Strategy strategy)
    : f_(f), sums_(f, strategy) {
  const Tree& tree = f_.tree();
  const int k = f_.k();
  const auto n = region_size(k, f_.max_depth());
  height_.assign(n, -1);
  for (std::uint64_t i = n; i-- > 0;) {
    const VertexId v = tree.vertex_at(i);
    int h = f_.dense()[i] > 0.0 ? 0 : -1;
    if (v.depth < f_.max_depth()) {
      for (int c = 0; c < k; ++c) {
        const int hc = height_[tree.dense_index(tree.child(v, c))];
        if (hc >= 0) h = std::max(h, hc + 1);
      }
    }
    height_[i] = h;
  }
}

int SphericalEvaluator::height(VertexId v) const {
  if (v.depth > f_.max_depth()) return -1;
  return height_[f_.tree().dense_index(v)];
}

double SphericalEvaluator::spherical_sum(VertexId x, int r) const {
  if (r < 0) fail(Errc::domain, "radius must be nonnegative");
  const Tree& tree = f_.tree();
  if (r == 0) return f_(x);
  const int j = x.depth;
  double total = sums_.at(x, r);
  for (int m = 1; m <= std::min(r - 1, j); ++m) {
    const VertexId a = tree.ancestor(x, m);
    if (a.depth + r - m > f_.max_depth()) continue;
    const int back = tree.last_digit(tree.ancestor(x, m - 1));
    for (int c = 0; c < tree.k(); ++c) {
      if (c == back) continue;
      total += sums_.at(tree.child(a, c), r - m - 1);
    }
  }
  if (r <= j) total += f_(tree.ancestor(x, r));
  return total;
}

double SphericalEvaluator::spherical_average(VertexId x, int r, double alpha) const {
  check_alpha(alpha);
  return spherical_sum(x, r) / sphere_normaliser(f_.k(), x.depth, r, alpha);
}

int SphericalEvaluator::support_radius(VertexId x) const {
  const Tree& tree = f_.tree();
  int best = height(x);
  for (int m = 1; m <= x.depth; ++m) {
    const VertexId a = tree.ancestor(x, m);
    if (a.depth > f_.max_depth()) continue;
    if (f_(a) > 0.0) best = std::max(best, m);
    if (a.depth == f_.max_depth()) continue;
    const int back = tree.last_digit(tree.ancestor(x, m - 1));
    for (int c = 0; c < tree.k(); ++c) {
      if (c == back) continue;
      const int hc = height(tree.child(a, c));
      if (hc >= 0) best = std::max(best, m + 1 + hc);
    }
  }
  return best;
}

MaximalValue SphericalEvaluator::spherical_maximal(VertexId x, double alpha) const {
  check_alpha(alpha);
  MaximalValue best;
  const int r_max = support_radius(x);
  for (int r = 0; r <= r_max; ++r) {
    const double value = spherical_average(x, r, alpha);
    if (value > best.value) best = {value, r};
  }
  return best;
}

MaximalValue SphericalEvaluator::ball_maximal(VertexId x, double alpha) const {
  check_alpha(alpha);
  MaximalValue best;
  const int r_max = support_radius(x);
  double cumulative = 0.0;
  for (int r = 0; r <= r_max; ++r) {
    cumulative += spherical_sum(x, r);
    const double value = cumulative / ball_normaliser(f_.k(), x.depth, r, alpha);
    if (value > best.value) best = {value, r};
  }
  return best;
}

MaximalValue SphericalEvaluator::maximal(VertexId x, double alpha, MaximalMode mode) const {
  return mode == MaximalMode::sphere ? spherical_maximal(x, alpha) : ball_maximal(x, alpha);
}

MaximalField maximal_field(const TreeFunction& f, double alpha, MaximalMode mode, int eval_depth, int threads) {
  check_alpha(alpha);
  if (eval_depth < 0) fail(Errc::domain, "eval_depth must be >= 0");
  const SphericalEvaluator eval(f);
  const Tree& tree = f.tree();
  const auto n = region_size(f.k(), eval_depth);
  std::vector<double> values(n, 0.0);
  std::vector<int> radius(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto m = eval.maximal(tree.vertex_at(i), alpha, mode);
    values[i] = m.value;
    radius[i] = m.radius;
  });
  return {TreeFunction::from_dense(f.k(), eval_depth, std::move(values)), std::move(radius)};
}

std::vector<double> average_field(const SphericalEvaluator& eval, int r, double alpha, int eval_depth, int threads) {
  const Tree& tree = eval.function().tree();
  const auto n = region_size(tree.k(), eval_depth);
  std::vector<double> values(n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) { values[i] = eval.spherical_average(tree.vertex_at(i), r, alpha); });
  return values;
}

namespace naive {

namespace {

double sum_over(const TreeFunction& f, const std::vector<VertexId>& vertices) {
  double total = 0.0;
  for (VertexId y : vertices) total += f(y);
  return total;
}

int reach(const TreeFunction& f, VertexId x) { return x.depth + f.max_depth(); }

}  // namespace

double spherical_sum(const TreeFunction& f, VertexId x, int r) {
  return sum_over(f, oracle::sphere_bfs(f.k(), x, r, f.max_depth()));
}

MaximalValue spherical_maximal(const TreeFunction& f, VertexId x, double alpha) {
  check_alpha(alpha);
  const auto layers = oracle::bfs_layers(f.k(), x, reach(f, x), f.max_depth());
  MaximalValue best;
  for (std::size_t r = 0; r < layers.size(); ++r) {
    const double value =
        sum_over(f, layers[r]) / std::pow(static_cast<double>(sphere_size(f.k(), x.depth, static_cast<int>(r))), 1.0 - alpha);
    if (value > best.value) best = {value, static_cast<int>(r)};
  }
  return best;
}

MaximalValue ball_maximal(const TreeFunction& f, VertexId x, double alpha) {
  check_alpha(alpha);
  const auto layers = oracle::bfs_layers(f.k(), x, reach(f, x), f.max_depth());
  MaximalValue best;
  std::vector<VertexId> ball;
  for (std::size_t r = 0; r < layers.size(); ++r) {
    ball.insert(ball.end(), layers[r].begin(), layers[r].end());
    std::sort(ball.begin(), ball.end());
    const double value =
        sum_over(f, ball) / std::pow(static_cast<double>(ball_size(f.k(), x.depth, static_cast<int>(r))), 1.0 - alpha);
    if (value > best.value) best = {value, static_cast<int>(r)};
  }
  return best;
}

}  // namespace naive

}  // namespace ktree
