#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ktree/function.hpp"
#include "ktree/weight_class.hpp"

namespace ktree {

/// One inequality of a verification trace: lhs <= rhs.
struct Step {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;

  /// rhs / lhs, or +inf when lhs == 0.
  double slack() const;
};

/// lhs <= rhs up to 1e-9 relative.
Step make_step(std::string name, double lhs, double rhs);

/// Level-set estimate instance. u measures the level set {A_{r,alpha} f > lambda}
/// and v the superlevel sets of f; the one-weight case has u = v.
struct LemmaInstance {
  TreeFunction f;
  Weight u;
  Weight v;
  int r = 0;
  double lambda = 1.0;
  double lemma_beta = 0.5;
  double class_constant = 0.0;  // 0 means "not supplied"
  ExponentConfig cfg;
  int eval_depth = 0;
};

/// Largest n >= 0 with 2^n <= k^r (exact integers).
int lemma_top_index(int k, int r);

/// kappa = max(16, 2 / (1 - 2^{alpha-1})).
double lemma_kappa(double alpha);

/// C_L = (kappa C_w)^q / (2^beta - 1)^q + C_w^q.
double lemma_constant(double class_constant, double lemma_beta, const ExponentConfig& cfg);

/// T_n = 2^{nq} (k^r/2^n)^{q beta} k^{rq eps(1-alpha) - rq} v({f k^{r alpha}/lambda >= 2^{n-1}})^{q/p}.
std::vector<double> lemma21_terms(const LemmaInstance& inst);
double lemma21_sum(const LemmaInstance& inst);
/// C_L * sum_n T_n.
double lemma21_rhs(const LemmaInstance& inst);
/// u({x : depth(x) <= eval_depth, A_{r,alpha} f(x) > lambda}).
double lemma21_lhs(const LemmaInstance& inst, int threads = 1);

/// Sets produced by the proof of the level-set estimate, all restricted to the
/// evaluation region. With g = f k^{r alpha} / lambda:
///   E_n = {2^{n-1} <= g < 2^n}, big = {g >= k^{r alpha} / 2},
///   I   = {sum_n 2^n A(chi_{E_n}) > (1 - 2^{alpha-1}) k^{r alpha}},
///   II  = {A(chi_big) > 0},
///   F_n = {A(chi_{E_n}) >= (2^beta - 1) k^{r alpha} (2^n/k^r)^beta / (kappa 2^n)}.
struct LemmaSets {
  VertexSet level_set;
  std::vector<VertexSet> E;
  std::vector<VertexSet> superlevel;
  std::vector<VertexSet> F;
  VertexSet big;
  VertexSet I;
  VertexSet II;
};

LemmaSets lemma_sets(const LemmaInstance& inst, int threads = 1);

/// Largest z-ratio over the pairs the proof feeds into the class condition:
/// (E_n, F_n) and ({y}, S(y, r) ∩ region) for y in big.
double lemma_pairs_constant(const LemmaInstance& inst, const LemmaSets& sets);

struct LemmaVerdict {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::vector<Step> steps;

  double slack() const;
};

/// Checks the statement (lhs <= C_L * sum) and each step of its proof:
/// cover (level set inside I ∪ II), I inside the union of F_n, the per-n
/// estimate for F_n, the II estimate, and their rigorous total.
/// Throws Errc::invalid_config when no class constant is supplied.
LemmaVerdict lemma21_verify(const LemmaInstance& inst, int threads = 1);

/// Same verification with two distinct weights (u for level sets and F, v for E).
LemmaVerdict two_weight_verify(const LemmaInstance& inst, int threads = 1);

struct SeriesWindow {
  double exponent = 0.0;  // 1 - beta - eps(1 - alpha) - alpha
  double beta_bound = 0.0;  // (1 - eps)(1 - alpha)
  bool convergent = false;
  int r_max = 0;
  std::vector<double> partial_sums;  // S_R for R = 0..r_max
  double limit = 0.0;  // 1 / (1 - k^{-exponent}) when convergent
  bool partial_sums_consistent = false;
};

/// sum_r k^{-r e}: partial sums against the geometric limit and tail bound
/// (convergent) or against the linear lower bound S_R >= R + 1 (divergent).
SeriesWindow level_set_series_window(const ExponentConfig& cfg, double lemma_beta, int r_max = 200);

/// phi_{a,b}(rho) = a k^{rho (p - delta)/2} + b k^{-rho/2}.
double phi(double a, double b, double rho, const ExponentConfig& cfg);
/// rho* = (2 / (p + 1 - delta)) log_k(b / (a (p - delta))).
double phi_minimizer(double a, double b, const ExponentConfig& cfg);
/// phi(rho*) = K a^{1-theta} b^theta with theta = (p-delta)/(p-delta+1) and
/// K = (p-delta)^{-theta} + (p-delta)^{1-theta}.
double phi_minimum_constant(const ExponentConfig& cfg);

struct MinSum {
  double M = 0.0;
  std::vector<double> A;  // A_j = w(E_j)^{q/p} / k^{(p-delta) j}
  std::vector<double> B;  // B_j = w(F_j) / k^j
  double weighted_A = 0.0;  // sum_j k^{(p-delta) j} A_j
  double E_power = 0.0;     // w(E)^{q/p}
  double weighted_B = 0.0;  // sum_j k^j B_j
  double F_weight = 0.0;    // w(F)
};

MinSum minsum_M(const Weight& w, std::span<const VertexId> E, std::span<const VertexId> F, int r,
                const ExponentConfig& cfg);

struct ChainConstants {
  double c0 = 0.0;  // measured per-level constant at radius r
  double c1 = 1.0;  // max(1, c0)
  double c2 = 1.0;  // geometric-series factor
  double c3 = 1.0;  // phi-minimum factor
};

/// Radial weights only; c0 is measured over j, i <= eval_depth. Sobolev mode.
ChainConstants chain_constants(const Weight& w, const ExponentConfig& cfg, int r, int eval_depth);
/// c1 c2 c3: a valid class constant for all E, F of depth <= eval_depth at radius r.
double certified_class_constant(const Weight& w, const ExponentConfig& cfg, int r, int eval_depth);

struct ChainTrace {
  double bilinear = 0.0;
  double M = 0.0;
  double a0 = 0.0;
  double b0 = 0.0;
  double rho0 = 0.0;
  double phi0 = 0.0;
  double final_bound = 0.0;  // k^{(1-alpha p) r} w(E)^{1/p} w(F)^{1-1/q}
  ChainConstants constants;
  MinSum minsum;
  std::vector<Step> steps;
  bool pass = false;
};

/// bilinear <= c1 M <= c1 c2 phi(rho0) <= c1 c2 c3 final_bound, plus the two
/// sequence identities. E, F must lie within depth <= eval_depth.
ChainTrace chain_verify(const Weight& w, std::span<const VertexId> E, std::span<const VertexId> F, int r,
                        const ExponentConfig& cfg, int eval_depth);

enum class ScanFamily { deltas, level_indicators, random, sphere_indicators };
const char* to_string(ScanFamily family);
ScanFamily parse_scan_family(const std::string& text);

struct ScanMember {
  std::string label;
  TreeFunction f;
};

std::vector<ScanMember> scan_family(ScanFamily family, int k, int support_depth, std::uint64_t seed, int samples);

struct ScanRow {
  int eval_depth = 0;
  std::string member;
  double numerator = 0.0;    // ||S_alpha f||_{L^q(w)} over the region (a lower bound)
  double denominator = 0.0;  // ||f||_{L^p(w)}
  double ratio = 0.0;
};

struct ScanReport {
  std::vector<ScanRow> rows;  // depth-major, members in family order
  std::vector<int> depths;
  std::vector<double> max_ratio;           // per depth
  std::vector<std::string> argmax_member;  // per depth
  bool monotone = false;                   // every member's numerator nondecreasing in depth
};

ScanReport operator_norm_scan(const Weight& w, const ExponentConfig& cfg, std::span<const ScanMember> members,
                              std::span<const int> depths, int threads = 1);

}  // namespace ktree
