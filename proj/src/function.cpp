#include "ktree/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ktree {

TreeFunction::TreeFunction(int k, int max_depth) : tree_(k), max_depth_(max_depth) {
  if (max_depth < 0) fail(Errc::domain, "function depth must be >= 0");
  if (max_depth > tree_.max_depth()) fail(Errc::overflow, "function depth exceeds representable depth");
  values_.assign(region_size(k, max_depth), 0.0);
}

double TreeFunction::operator()(VertexId v) const {
  if (v.depth > max_depth_ || !tree_.is_valid(v)) return 0.0;
  return values_[tree_.dense_index(v)];
}

void TreeFunction::set(VertexId v, double value) {
  if (!std::isfinite(value) || value < 0.0) fail(Errc::domain, "function values must be finite and >= 0");
  if (!tree_.is_valid(v) || v.depth > max_depth_)
    fail(Errc::out_of_tree, "vertex " + std::to_string(v.depth) + "/" + std::to_string(v.code) +
                                " outside function region of depth " + std::to_string(max_depth_));
  values_[tree_.dense_index(v)] = value;
}

std::vector<VertexId> TreeFunction::support() const {
  std::vector<VertexId> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] > 0.0) out.push_back(tree_.vertex_at(i));
  return out;
}

std::size_t TreeFunction::support_size() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double x) { return x > 0.0; }));
}

int TreeFunction::support_depth() const {
  for (std::size_t i = values_.size(); i-- > 0;)
    if (values_[i] > 0.0) return tree_.vertex_at(i).depth;
  return -1;
}

double TreeFunction::max_value() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, x);
  return m;
}

TreeFunction TreeFunction::scaled(double c) const {
  if (!std::isfinite(c) || c < 0.0) fail(Errc::domain, "scale factor must be finite and >= 0");
  TreeFunction out = *this;
  for (double& x : out.values_) x *= c;
  return out;
}

TreeFunction TreeFunction::plus(const TreeFunction& other) const {
  if (other.k() != k()) fail(Errc::domain, "cannot add functions on trees with different k");
  TreeFunction out(k(), std::max(max_depth_, other.max_depth_));
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] += values_[i];
  for (std::size_t i = 0; i < other.values_.size(); ++i) out.values_[i] += other.values_[i];
  return out;
}

TreeFunction TreeFunction::indicator(int k, int max_depth, std::span<const VertexId> set) {
  TreeFunction out(k, max_depth);
  for (VertexId v : set) out.set(v, 1.0);
  return out;
}

TreeFunction TreeFunction::from_dense(int k, int max_depth, std::vector<double> values) {
  TreeFunction out(k, max_depth);
  if (values.size() != out.values_.size()) fail(Errc::domain, "dense value count does not match region size");
  for (double x : values)
    if (!std::isfinite(x) || x < 0.0) fail(Errc::domain, "function values must be finite and >= 0");
  out.values_ = std::move(values);
  return out;
}

Weight Weight::radial(int k, double beta, double scale) {
  if (k < 2) fail(Errc::domain, "branching factor must be >= 2");
  if (!std::isfinite(beta)) fail(Errc::domain, "weight beta must be finite");
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(Errc::domain, "weight scale must be positive");
  Weight w;
  w.k_ = k;
  w.radial_ = true;
  w.beta_ = beta;
  w.scale_ = scale;
  return w;
}

Weight Weight::tabulated(int k, int depth, std::vector<double> dense_values) {
  if (k < 2) fail(Errc::domain, "branching factor must be >= 2");
  if (dense_values.size() != region_size(k, depth))
    fail(Errc::domain, "tabulated weight must cover every vertex of depth <= " + std::to_string(depth));
  for (double x : dense_values)
    if (!(x > 0.0) || !std::isfinite(x)) fail(Errc::domain, "tabulated weight entries must be finite and > 0");
  Weight w;
  w.k_ = k;
  w.radial_ = false;
  w.table_depth_ = depth;
  for (int d = 0; d <= depth; ++d) w.level_offsets_.push_back(level_offset(k, d));
  w.table_ = std::move(dense_values);
  return w;
}

int Weight::depth_limit() const noexcept {
  return radial_ ? std::numeric_limits<int>::max() : table_depth_;
}

double Weight::log_at(VertexId v) const {
  if (radial_) return std::log(scale_) + beta_ * v.depth * std::log(static_cast<double>(k_));
  return std::log((*this)(v));
}

double Weight::operator()(VertexId v) const {
  if (radial_) return std::exp(log_at(v));
  if (v.depth > table_depth_) fail(Errc::out_of_tree, "vertex outside tabulated weight region");
  return table_[level_offsets_[static_cast<std::size_t>(v.depth)] + v.code];
}

Weight Weight::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) fail(Errc::domain, "weight scale must be positive");
  Weight out = *this;
  if (radial_) {
    out.scale_ *= c;
  } else {
    for (double& x : out.table_) x *= c;
  }
  return out;
}

VertexSet make_vertex_set(std::vector<VertexId> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return vertices;
}

VertexSet full_region(int k, int depth) {
  const Tree tree(k);
  VertexSet out;
  const auto n = region_size(k, depth);
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(tree.vertex_at(i));
  return out;
}

VertexSet full_level(int k, int j) {
  VertexSet out;
  const auto n = checked_pow(static_cast<std::uint64_t>(k), j);
  out.reserve(n);
  for (std::uint64_t c = 0; c < n; ++c) out.push_back({j, c});
  return out;
}

double weight_of_set(const Weight& w, std::span<const VertexId> set, int eval_depth) {
  double total = 0.0;
  for (VertexId v : set) {
    if (v.depth > eval_depth) fail(Errc::out_of_tree, "set member deeper than evaluation region");
    total += w(v);
  }
  return total;
}

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(Errc::domain, "norm exponent must satisfy p >= 1");
}

}  // namespace

double lp_norm(const TreeFunction& f, double p, const Weight& w) {
  check_exponent(p);
  double total = 0.0;
  const auto values = f.dense();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    total += std::pow(values[i], p) * w(f.tree().vertex_at(i));
  }
  return std::pow(total, 1.0 / p);
}

double layer_cake_norm(const TreeFunction& f, double q, const Weight& w) {
  check_exponent(q);
  struct Entry {
    double value;
    double weight;
  };
  std::vector<Entry> entries;
  const auto values = f.dense();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > 0.0) entries.push_back({values[i], w(f.tree().vertex_at(i))});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value > b.value; });

  // Walk distinct values from the top; `mass` is w({f >= current value}).
  double total = 0.0;
  double mass = 0.0;
  std::size_t i = 0;
  while (i < entries.size()) {
    const double level = entries[i].value;
    while (i < entries.size() && entries[i].value == level) mass += entries[i++].weight;
    const double below = i < entries.size() ? entries[i].value : 0.0;
    total += (std::pow(level, q) - std::pow(below, q)) * mass;
  }
  return std::pow(total, 1.0 / q);
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) fail(Errc::domain, "empty range");
  return next() % n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
  return g.next();
}

TreeFunction random_function(int k, int depth, std::uint64_t seed, double density, double lo, double hi) {
  if (!(density > 0.0 && density <= 1.0)) fail(Errc::domain, "density must lie in (0, 1]");
  if (!(lo > 0.0) || !(hi >= lo)) fail(Errc::domain, "value range must satisfy 0 < lo <= hi");
  constexpr double grid = 1024.0;
  const double lo_g = std::ceil(lo * grid);
  const double hi_g = std::max(lo_g, std::floor(hi * grid));
  const auto steps = static_cast<std::uint64_t>(hi_g - lo_g) + 1;

  TreeFunction f(k, depth);
  SplitMix64 rng(seed);
  for (std::uint64_t i = 0; i < region_size(k, depth); ++i) {
    const bool in = rng.uniform() < density;
    const auto step = rng.below(steps);
    if (in) f.set(f.tree().vertex_at(i), (lo_g + static_cast<double>(step)) / grid);
  }
  return f;
}

VertexSet random_set(int k, int depth, std::uint64_t seed, double density) {
  if (!(density > 0.0 && density <= 1.0)) fail(Errc::domain, "density must lie in (0, 1]");
  const Tree tree(k);
  SplitMix64 rng(seed);
  VertexSet out;
  for (std::uint64_t i = 0; i < region_size(k, depth); ++i)
    if (rng.uniform() < density) out.push_back(tree.vertex_at(i));
  return out;
}

}  // namespace ktree
