#pragma once

#include <vector>

#include "ktree/function.hpp"

namespace ktree {

/// Dsum(v, d): sum of f over the descendants of v exactly d levels below v.
///
/// The table strategy stores every (v, d) with depth(v) + d <= depth(f) and is
/// built bottom-up from Dsum(v, d) = sum over children c of Dsum(c, d - 1).
/// The lean strategy keeps one prefix-sum array per level and answers each
/// query as a difference of two prefix sums (memory O(region)).
class DescendantSums {
public:
  enum class Strategy { table, lean };

  explicit DescendantSums(const TreeFunction& f, Strategy strategy = Strategy::table);

  double at(VertexId v, int d) const;
  int depth() const noexcept { return depth_; }

private:
  Tree tree_;
  int depth_;
  Strategy strategy_;
  // table: [level][d][code]; lean: [level][code + 1] prefix sums.
  std::vector<std::vector<std::vector<double>>> table_;
  std::vector<std::vector<double>> prefix_;
};

struct MaximalValue {
  double value = 0.0;
  int radius = 0;  // smallest maximising radius
};

enum class MaximalMode { sphere, ball };

/// Spherical averages and the fractional maximal operators of a fixed finitely
/// supported f, using the descendant-sum decomposition of each sphere.
class SphericalEvaluator {
public:
  explicit SphericalEvaluator(const TreeFunction& f, DescendantSums::Strategy strategy = DescendantSums::Strategy::table);

  const TreeFunction& function() const noexcept { return f_; }

  /// Sum of f over S(x, r) in the infinite tree.
  double spherical_sum(VertexId x, int r) const;
  /// A_{r,alpha} f(x) = spherical_sum / |S(x, r)|^{1 - alpha}.
  double spherical_average(VertexId x, int r, double alpha) const;
  /// Largest distance from x to a support vertex (-1 when f == 0). Every
  /// average at a larger radius vanishes.
  int support_radius(VertexId x) const;

  MaximalValue spherical_maximal(VertexId x, double alpha) const;
  MaximalValue ball_maximal(VertexId x, double alpha) const;
  MaximalValue maximal(VertexId x, double alpha, MaximalMode mode) const;

private:
  TreeFunction f_;
  DescendantSums sums_;
  // height_[dense index] = max depth below v (relative) carrying support, or -1.
  std::vector<int> height_;

  int height(VertexId v) const;
};

void check_alpha(double alpha);

/// |S|^{1 - alpha} and |B|^{1 - alpha} as used by every averaging path.
double sphere_normaliser(int k, int j, int r, double alpha);
double ball_normaliser(int k, int j, int r, double alpha);

/// c(k, alpha) = 2^{1-alpha} / (1 - k^{-(1-alpha)}), so that
/// M_alpha f <= c(k, alpha) * S_alpha f pointwise.
double equivalence_constant(int k, double alpha);

/// Maximal operator evaluated at every vertex of depth <= eval_depth.
struct MaximalField {
  TreeFunction values;
  std::vector<int> radius;  // argmax radius per dense index
};

MaximalField maximal_field(const TreeFunction& f, double alpha, MaximalMode mode, int eval_depth, int threads = 1);

/// A_{r,alpha} f at every vertex of depth <= eval_depth (dense, canonical order).
std::vector<double> average_field(const SphericalEvaluator& eval, int r, double alpha, int eval_depth, int threads = 1);

/// Reference path: spheres and balls come from the breadth-first oracle and are
/// summed in canonical order.
namespace naive {

double spherical_sum(const TreeFunction& f, VertexId x, int r);
MaximalValue spherical_maximal(const TreeFunction& f, VertexId x, double alpha);
MaximalValue ball_maximal(const TreeFunction& f, VertexId x, double alpha);

}  // namespace naive

}  // namespace ktree
