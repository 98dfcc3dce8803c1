#include "ktree/tree.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

namespace ktree {

void TreeParams::validate() const {
  if (k < 2 || k > kMaxBranching)
    fail(Errc::domain, "k must lie in [2, " + std::to_string(kMaxBranching) + "], got " + std::to_string(k));
  if (support_depth < 0) fail(Errc::domain, "support_depth must be >= 0");
  if (eval_depth < support_depth) fail(Errc::domain, "eval_depth must be >= support_depth");
  if (eval_depth > Tree(k).max_depth())
    fail(Errc::overflow, "eval_depth " + std::to_string(eval_depth) + " exceeds representable depth");
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) fail(Errc::overflow, "integer overflow in multiplication");
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) fail(Errc::overflow, "integer overflow in addition");
  return out;
}

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  if (exponent < 0) fail(Errc::domain, "negative exponent");
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) out = checked_mul(out, base);
  return out;
}

std::uint64_t level_offset(int k, int depth) {
  const auto kk = static_cast<std::uint64_t>(k);
  return (checked_pow(kk, depth) - 1) / (kk - 1);
}

std::uint64_t region_size(int k, int depth) {
  const auto kk = static_cast<std::uint64_t>(k);
  return (checked_pow(kk, depth + 1) - 1) / (kk - 1);
}

namespace {

void check_k(int k) {
  if (k < 2) fail(Errc::domain, "branching factor must be >= 2");
}

void check_nonneg(int j, int r) {
  if (j < 0 || r < 0) fail(Errc::domain, "depth and radius must be nonnegative");
}

}  // namespace

std::uint64_t sphere_size(int k, int j, int r) {
  check_k(k);
  check_nonneg(j, r);
  if (r == 0) return 1;
  const auto kk = static_cast<std::uint64_t>(k);
  std::uint64_t total = checked_pow(kk, r);
  for (int m = 1; m <= std::min(j, r - 1); ++m)
    total = checked_add(total, checked_mul(kk - 1, checked_pow(kk, r - m - 1)));
  if (r <= j) total = checked_add(total, 1);
  return total;
}

std::uint64_t ball_size(int k, int j, int r) {
  check_nonneg(j, r);
  std::uint64_t total = 0;
  for (int s = 0; s <= r; ++s) total = checked_add(total, sphere_size(k, j, s));
  return total;
}

std::uint64_t level_sphere_count(int k, int j, int r, int m) {
  check_k(k);
  check_nonneg(j, r);
  if (m < 0 || m > r) fail(Errc::domain, "level_sphere_count requires 0 <= m <= r");
  const int i = j + r - 2 * m;
  if (i < 0 || m > j) return 0;
  const auto kk = static_cast<std::uint64_t>(k);
  if (m == 0) return checked_pow(kk, r);
  if (m == r) return 1;
  return checked_mul(kk - 1, checked_pow(kk, r - m - 1));
}

std::uint64_t transpose_count(int k, int i, int j, int r, int m) {
  check_k(k);
  check_nonneg(j, r);
  if (i < 0 || m < 0 || m > r || i != j + r - 2 * m)
    fail(Errc::domain, "transpose_count requires i = j + r - 2m with 0 <= m <= r");
  // From y in T_i: up u = r - m steps to depth j - m, then down m steps.
  const int up = r - m;
  if (j - m < 0) return 0;
  const auto kk = static_cast<std::uint64_t>(k);
  if (up == 0) return checked_pow(kk, m);
  if (m == 0) return 1;
  return checked_mul(kk - 1, checked_pow(kk, m - 1));
}

Tree::Tree(int k) : k_(k) {
  if (k < 2 || k > kMaxBranching)
    fail(Errc::domain, "k must lie in [2, " + std::to_string(kMaxBranching) + "], got " + std::to_string(k));
  const auto kk = static_cast<std::uint64_t>(k);
  // Keep k^{d+1} representable so region sizes up to max_depth never overflow.
  pow_.push_back(1);
  while (pow_.back() <= std::numeric_limits<std::uint64_t>::max() / kk / kk) pow_.push_back(pow_.back() * kk);
  max_depth_ = static_cast<int>(pow_.size()) - 2;
}

bool Tree::is_valid(VertexId v) const {
  return v.depth >= 0 && v.depth <= max_depth_ && v.code < pow_k(v.depth);
}

std::uint64_t Tree::dense_index(VertexId v) const {
  if (!is_valid(v)) fail(Errc::out_of_tree, "invalid vertex");
  return (pow_k(v.depth) - 1) / static_cast<std::uint64_t>(k_ - 1) + v.code;
}

VertexId Tree::vertex_at(std::uint64_t index) const {
  int depth = 0;
  std::uint64_t offset = 0;
  while (depth <= max_depth_ && index >= offset + pow_k(depth)) {
    offset += pow_k(depth);
    ++depth;
  }
  if (depth > max_depth_) fail(Errc::out_of_tree, "dense index beyond representable depth");
  return {depth, index - offset};
}

VertexId Tree::make_vertex(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) > max_depth_) fail(Errc::overflow, "path too long");
  std::uint64_t code = 0;
  for (int d : digits) {
    if (d < 0 || d >= k_) fail(Errc::domain, "path digit out of range [0, k)");
    code = code * static_cast<std::uint64_t>(k_) + static_cast<std::uint64_t>(d);
  }
  return {static_cast<int>(digits.size()), code};
}

std::vector<int> Tree::digits(VertexId v) const {
  std::vector<int> out(static_cast<std::size_t>(v.depth));
  std::uint64_t code = v.code;
  for (int i = v.depth - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::uint64_t>(k_));
    code /= static_cast<std::uint64_t>(k_);
  }
  return out;
}

int Tree::last_digit(VertexId v) const {
  if (v.depth == 0) fail(Errc::out_of_tree, "root has no last digit");
  return static_cast<int>(v.code % static_cast<std::uint64_t>(k_));
}

std::optional<VertexId> Tree::parent(VertexId v) const {
  if (v.depth == 0) return std::nullopt;
  return VertexId{v.depth - 1, v.code / static_cast<std::uint64_t>(k_)};
}

VertexId Tree::ancestor(VertexId v, int m) const {
  if (m < 0) fail(Errc::domain, "ancestor step must be nonnegative");
  if (m > v.depth)
    fail(Errc::out_of_tree, "ancestor " + std::to_string(m) + " steps up exceeds depth " + std::to_string(v.depth));
  return {v.depth - m, v.code / pow_k(m)};
}

VertexId Tree::child(VertexId v, int digit) const {
  if (digit < 0 || digit >= k_) fail(Errc::domain, "child digit out of range");
  if (v.depth + 1 > max_depth_) fail(Errc::overflow, "child beyond representable depth");
  return {v.depth + 1, v.code * static_cast<std::uint64_t>(k_) + static_cast<std::uint64_t>(digit)};
}

int Tree::distance(VertexId u, VertexId v) const {
  int steps = 0;
  while (u.depth > v.depth) {
    u = {u.depth - 1, u.code / static_cast<std::uint64_t>(k_)};
    ++steps;
  }
  while (v.depth > u.depth) {
    v = {v.depth - 1, v.code / static_cast<std::uint64_t>(k_)};
    ++steps;
  }
  while (u.code != v.code) {
    u.code /= static_cast<std::uint64_t>(k_);
    v.code /= static_cast<std::uint64_t>(k_);
    steps += 2;
  }
  return steps;
}

std::vector<VertexId> Tree::sphere_members(VertexId v, int r, int depth_cap) const {
  if (r < 0) fail(Errc::domain, "radius must be nonnegative");
  std::vector<VertexId> out;
  for_each_sphere_member(v, r, depth_cap, [&](VertexId y) { out.push_back(y); });
  return out;
}

std::string Tree::path_string(VertexId v) const {
  std::string out = std::to_string(v.depth) + ",";
  for (int d : digits(v)) out.push_back(static_cast<char>('0' + d));
  return out;
}

VertexId Tree::parse_path(std::string_view text) const {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) fail(Errc::domain, "vertex path '" + std::string(text) + "' lacks ','");
  int depth = -1;
  const auto head = text.substr(0, comma);
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), depth);
  if (ec != std::errc() || ptr != head.data() + head.size() || depth < 0)
    fail(Errc::domain, "bad depth in vertex path '" + std::string(text) + "'");
  const auto tail = text.substr(comma + 1);
  if (static_cast<int>(tail.size()) != depth)
    fail(Errc::domain, "vertex path '" + std::string(text) + "' has " + std::to_string(tail.size()) +
                           " digits for depth " + std::to_string(depth));
  std::vector<int> ds;
  ds.reserve(tail.size());
  for (char c : tail) {
    if (c < '0' || c > '9') fail(Errc::domain, "non-digit in vertex path '" + std::string(text) + "'");
    ds.push_back(c - '0');
  }
  return make_vertex(ds);
}

}  // namespace ktree
