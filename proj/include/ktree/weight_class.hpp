#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ktree/function.hpp"

namespace ktree {

enum class ExponentMode { sobolev, free };

/// Exponents of a weighted (p, q) problem for the fractional order alpha.
///
/// In sobolev mode q is fixed by 1/q = 1/p - alpha. delta and epsilon are
///   delta   = (1 - alpha p - alpha p^2) / (1 - alpha p)
///   epsilon = (1 - p alpha) / (1 - alpha)
/// and are still filled in free mode, where they are informational only.
struct ExponentConfig {
  int k = 2;
  double p = 2.0;
  double alpha = 0.25;
  double q = 4.0;
  double delta = -1.0;
  double epsilon = 2.0 / 3.0;
  ExponentMode mode = ExponentMode::sobolev;

  /// epsilon (1 - alpha): the class decay rate in powers of k per unit radius.
  double decay() const { return epsilon * (1.0 - alpha); }
  double log_k() const;
  /// Upper end of the radial-weight window: p (p - 1) / q.
  double window_hi() const { return p * (p - 1.0) / q; }
};

/// Throws Errc::domain naming the violated bound when alpha is outside (0, 1),
/// p outside (1, 1/alpha), or (free mode) q < p.
ExponentConfig derived_exponents(int k, double p, double alpha, ExponentMode mode = ExponentMode::sobolev,
                                 double free_q = 0.0);

/// sum_{x in E} u(F ∩ S(x, r)) = sum_{y in F} u(y) #{x in E : d(x, y) = r}.
/// E and F must be sorted (VertexSet).
double bilinear_form(const Weight& u, std::span<const VertexId> E, std::span<const VertexId> F, int r);

/// Ratio of the bilinear form to k^{eps r (1-alpha)} v(E)^{1/p} u(F)^{1-1/q}.
/// u weighs F (and the bilinear form), v weighs E; the one-weight class is u = v.
double z_ratio(const Weight& u, const Weight& v, std::span<const VertexId> E, std::span<const VertexId> F, int r,
               const ExponentConfig& cfg);
double z_ratio(const Weight& w, std::span<const VertexId> E, std::span<const VertexId> F, int r,
               const ExponentConfig& cfg);
/// Same ratio from precomputed sums (0 when the bilinear sum is 0).
double z_ratio_from_sums(double bilinear, double v_of_E, double u_of_F, int r, const ExponentConfig& cfg);

/// Prefix candidates for F given E: vertices y of `universe` with
/// c_E(y) = #{x in E : d(x, y) = r} > 0, ordered by c_E desc, u(y) desc, then
/// canonically; ratios[t] is the ratio of F = first t+1 vertices.
struct FCandidates {
  std::vector<VertexId> order;
  std::vector<double> ratios;

  /// Index of the best prefix (first maximum); npos when empty.
  std::size_t best() const;
  VertexSet prefix(std::size_t index) const;
};

FCandidates optimal_F_candidates(const Weight& u, const Weight& v, std::span<const VertexId> E, int r,
                                 std::span<const VertexId> universe, const ExponentConfig& cfg);

/// One row of a ZClassReport.
struct ZClassEntry {
  int r = 0;
  double constant = 0.0;
  VertexSet E;
  VertexSet F;
  std::string method;
  std::uint64_t evals = 0;
  double millis = 0.0;
};

inline constexpr std::size_t kExhaustiveGuard = 12;

/// Exact maximum of z_ratio over all nonempty E, F inside `region`
/// (at most kExhaustiveGuard vertices, otherwise Errc::oracle_guard).
ZClassEntry z_constant_exhaustive(const Weight& u, const Weight& v, int r, std::span<const VertexId> region,
                                  const ExponentConfig& cfg);

struct HeuristicOptions {
  std::uint64_t seed = 1;
  int random_starts = 16;
  /// Singleton starts {x} for every x of the universe when it has at most
  /// this many vertices.
  std::size_t singleton_start_limit = 256;
  double start_density = 0.3;
  int max_rounds = 50;
  int threads = 1;
};

/// Alternating ascent: best F-prefix for the current E, then best E-prefix for
/// that F (x ranked by u(F ∩ S(x, r)) / v(x)), until no improvement; best over
/// all starts. The result is a certified lower bound with witnesses.
ZClassEntry z_constant_heuristic(const Weight& u, const Weight& v, int r, std::span<const VertexId> universe,
                                 const ExponentConfig& cfg, const HeuristicOptions& options);

/// Worst ratio of |T_i ∩ S(x,r)| k^{beta i} to
/// k^{(r-m)(p-delta)} k^{r delta} (k^{beta j})^{q/p} over x in T_j.
struct PerLevelReport {
  double max_ratio = 0.0;
  int j = 0;
  int r = 0;
  int m = 0;
  std::uint64_t checked = 0;
  bool pass = false;  // max_ratio <= 1 up to 1e-9 relative
};

/// Scans j in [0, j_max], r in [0, r_max], m in [0, r] with i = j + r - 2m >= 0
/// (and i <= i_max when i_max >= 0) for the radial weight k^{beta depth}.
PerLevelReport per_level_condition_check(double beta, const ExponentConfig& cfg, int j_max, int r_max, int i_max = -1);

/// Measured per-level constant at the single radius r: the worst ratio over
/// j <= j_max and 0 <= i <= i_max.
double per_level_constant(double beta, const ExponentConfig& cfg, int r, int j_max, int i_max);

/// The scalar exponent inequality
///   (r - m)(1 + 2 beta q/p - p + delta) <= r delta + r beta q/p - i (beta - beta q/p)
/// over the same range, next to its reduced worst-case form
/// (1 + beta q/p - p <= 0) and the window test beta <= p(p-1)/q.
struct Cor1Report {
  bool range_holds = false;
  double worst_margin = 0.0;  // min of rhs - lhs over the range
  int j = 0;
  int r = 0;
  int m = 0;
  bool reduced_holds = false;
  bool in_window = false;
};

Cor1Report cor1_check(double beta, const ExponentConfig& cfg, int j_max, int r_max);

struct Cor1GridReport {
  std::vector<double> betas;
  std::vector<Cor1Report> reports;
  std::size_t reduced_agree = 0;  // reduced predicate == window predicate
  std::size_t range_agree = 0;    // range predicate == window predicate
  double range_lo = 0.0;          // smallest / largest grid beta where the range predicate holds
  double range_hi = -1.0;
};

Cor1GridReport cor1_grid(const ExponentConfig& cfg, std::span<const double> betas, int j_max, int r_max);

enum class Membership { certified, refuted, unknown };
const char* to_string(Membership m);

/// E = {root}, F = T_r: the ratio is k^{r ((1+beta)/q - eps(1-alpha))} exactly.
double necessity_probe_ratio(double beta, const ExponentConfig& cfg, int r);
double necessity_probe_exponent(double beta, const ExponentConfig& cfg);

struct WindowCertificate {
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool in_window = false;
  PerLevelReport per_level;
  double probe_exponent = 0.0;
  Membership verdict = Membership::unknown;
};

/// Radial weight k^{beta depth} against the window [0, p(p-1)/q]; the per-level
/// scan is the certificate. Sobolev mode only.
WindowCertificate certify_radial_weight(double beta, const ExponentConfig& cfg, int j_max, int r_max);

}  // namespace ktree
