#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ktree/tree.hpp"

namespace ktree {

/// Nonnegative function on the vertices of depth <= max_depth, stored densely
/// in canonical order. Vertices outside the stored region read as zero, so the
/// support is always finite.
class TreeFunction {
public:
  TreeFunction(int k, int max_depth);

  int k() const noexcept { return tree_.k(); }
  int max_depth() const noexcept { return max_depth_; }
  const Tree& tree() const noexcept { return tree_; }

  double operator()(VertexId v) const;
  /// Values must be finite and >= 0; zero removes v from the support.
  void set(VertexId v, double value);

  /// Vertices with a positive value, canonical order.
  std::vector<VertexId> support() const;
  std::size_t support_size() const;
  bool is_zero() const { return support_size() == 0; }
  int support_depth() const;  // -1 when f == 0
  double max_value() const;

  std::span<const double> dense() const noexcept { return values_; }
  TreeFunction scaled(double c) const;
  /// Pointwise sum; the result lives on the larger of the two regions.
  TreeFunction plus(const TreeFunction& other) const;

  static TreeFunction indicator(int k, int max_depth, std::span<const VertexId> set);
  /// Values given densely in canonical order for every vertex of depth <= max_depth.
  static TreeFunction from_dense(int k, int max_depth, std::vector<double> values);

private:
  Tree tree_;
  int max_depth_;
  std::vector<double> values_;
};

/// Strictly positive weight. Radial weights are scale * k^{beta * depth} and
/// defined on the whole tree; tabulated weights cover depth <= their table depth.
class Weight {
public:
  static Weight uniform(int k) { return radial(k, 0.0); }
  static Weight radial(int k, double beta, double scale = 1.0);
  static Weight tabulated(int k, int depth, std::vector<double> dense_values);

  int k() const noexcept { return k_; }
  bool is_radial() const noexcept { return radial_; }
  double beta() const noexcept { return beta_; }
  double scale() const noexcept { return scale_; }
  /// Deepest level with a defined value (a large sentinel for radial weights).
  int depth_limit() const noexcept;

  double operator()(VertexId v) const;
  double log_at(VertexId v) const;

  Weight scaled(double c) const;

private:
  Weight() = default;

  int k_ = 2;
  bool radial_ = true;
  double beta_ = 0.0;
  double scale_ = 1.0;
  int table_depth_ = 0;
  std::vector<std::uint64_t> level_offsets_;
  std::vector<double> table_;
};

/// Sorted, duplicate-free list of vertices.
using VertexSet = std::vector<VertexId>;
VertexSet make_vertex_set(std::vector<VertexId> vertices);
/// Every vertex of depth <= depth, canonical order.
VertexSet full_region(int k, int depth);
/// All vertices of level j.
VertexSet full_level(int k, int j);

/// w(A) = sum of w over A, summed in canonical order. Members deeper than
/// eval_depth are rejected.
double weight_of_set(const Weight& w, std::span<const VertexId> set, int eval_depth);

/// (sum_x f(x)^p w(x))^{1/p}, canonical-order summation.
double lp_norm(const TreeFunction& f, double p, const Weight& w);

/// Same quantity through the layer-cake identity
/// ||f||_q^q = q * int_0^inf lambda^{q-1} w({f > lambda}) dlambda, evaluated
/// exactly as a finite sum over the sorted distinct values of f.
double layer_cake_norm(const TreeFunction& f, double q, const Weight& w);

/// Reproducible pseudo-random test function on depth <= depth. Each vertex is
/// in the support with probability `density`; values are drawn from a dyadic
/// grid (multiples of 1/1024) inside [lo, hi], so sums of a few thousand values
/// are exact in double precision regardless of summation order.
TreeFunction random_function(int k, int depth, std::uint64_t seed, double density, double lo, double hi);
VertexSet random_set(int k, int depth, std::uint64_t seed, double density);

/// SplitMix64-based generator used for all seeded draws. Fully specified, so
/// draws are identical across standard library implementations.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from (seed, index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ktree
