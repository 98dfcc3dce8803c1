#include "ktree/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ktree/averages.hpp"

namespace ktree {

namespace {

constexpr double kRelTol = 1e-9;

double set_weight(const Weight& w, std::span<const VertexId> set) {
  return weight_of_set(w, set, std::numeric_limits<int>::max());
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Step make_equality_step(std::string name, double lhs, double rhs) {
  Step s{std::move(name), lhs, rhs, false};
  s.pass = std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
  return s;
}

// g = f k^{r alpha} / lambda at every support vertex.
double g_scale(const LemmaInstance& inst) {
  return std::exp(inst.r * inst.cfg.alpha * inst.cfg.log_k()) / inst.lambda;
}

void check_instance(const LemmaInstance& inst) {
  if (!(inst.lambda > 0.0)) fail(Errc::domain, "lambda must be > 0");
  if (!(inst.lemma_beta > 0.0 && inst.lemma_beta < 1.0)) fail(Errc::domain, "lemma_beta must lie in (0, 1)");
  if (inst.r < 0) fail(Errc::domain, "radius must be nonnegative");
  if (inst.eval_depth < inst.f.max_depth()) fail(Errc::domain, "eval_depth must be >= the support depth of f");
}

// Factor (kappa C / (2^beta - 1))^q of the per-n estimate.
double per_n_factor(const LemmaInstance& inst) {
  const double kappa = lemma_kappa(inst.cfg.alpha);
  return std::pow(kappa * inst.class_constant / (std::exp2(inst.lemma_beta) - 1.0), inst.cfg.q);
}

// 2^{nq} (k^r/2^n)^{q beta} k^{rq eps(1-alpha) - rq} mass^{q/p}.
double lemma_term(const LemmaInstance& inst, int n, double mass) {
  if (!(mass > 0.0)) return 0.0;
  const auto& c = inst.cfg;
  const double ln2 = std::log(2.0);
  const double lk = c.log_k();
  const double log_term = n * c.q * ln2 + c.q * inst.lemma_beta * (inst.r * lk - n * ln2) +
                          (inst.r * c.q * c.decay() - inst.r * c.q) * lk + (c.q / c.p) * std::log(mass);
  return std::exp(log_term);
}

VertexSet superlevel_set(const LemmaInstance& inst, double threshold) {
  const double s = g_scale(inst);
  VertexSet out;
  for (VertexId x : inst.f.support())
    if (inst.f(x) * s >= threshold) out.push_back(x);
  return out;
}

}  // namespace

double Step::slack() const {
  if (lhs == 0.0) return std::numeric_limits<double>::infinity();
  return rhs / lhs;
}

Step make_step(std::string name, double lhs, double rhs) {
  Step s{std::move(name), lhs, rhs, false};
  s.pass = lhs <= rhs + kRelTol * std::abs(rhs);
  return s;
}

int lemma_top_index(int k, int r) {
  const std::uint64_t kr = checked_pow(static_cast<std::uint64_t>(k), r);
  int n = 0;
  while (n < 63 && (std::uint64_t{1} << (n + 1)) <= kr) ++n;
  return n;
}

double lemma_kappa(double alpha) { return std::max(16.0, 2.0 / (1.0 - std::exp2(alpha - 1.0))); }

double lemma_constant(double class_constant, double lemma_beta, const ExponentConfig& cfg) {
  if (!(class_constant > 0.0)) fail(Errc::invalid_config, "class constant missing; measure or certify it first");
  const double kappa = lemma_kappa(cfg.alpha);
  return std::pow(kappa * class_constant, cfg.q) / std::pow(std::exp2(lemma_beta) - 1.0, cfg.q) +
         std::pow(class_constant, cfg.q);
}

std::vector<double> lemma21_terms(const LemmaInstance& inst) {
  check_instance(inst);
  const int top = lemma_top_index(inst.cfg.k, inst.r);
  std::vector<double> terms;
  for (int n = 0; n <= top; ++n) {
    const VertexSet level = superlevel_set(inst, std::ldexp(1.0, n - 1));
    terms.push_back(lemma_term(inst, n, set_weight(inst.v, level)));
  }
  return terms;
}

double lemma21_sum(const LemmaInstance& inst) {
  double total = 0.0;
  for (double t : lemma21_terms(inst)) total += t;
  return total;
}

double lemma21_rhs(const LemmaInstance& inst) {
  const double sum = lemma21_sum(inst);
  if (sum == 0.0) return 0.0;
  return lemma_constant(inst.class_constant, inst.lemma_beta, inst.cfg) * sum;
}

double lemma21_lhs(const LemmaInstance& inst, int threads) {
  check_instance(inst);
  const SphericalEvaluator eval(inst.f);
  const auto values = average_field(eval, inst.r, inst.cfg.alpha, inst.eval_depth, threads);
  const Tree& tree = inst.f.tree();
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > inst.lambda) total += inst.u(tree.vertex_at(i));
  return total;
}

LemmaSets lemma_sets(const LemmaInstance& inst, int threads) {
  check_instance(inst);
  const auto& c = inst.cfg;
  const int k = c.k;
  const int D = inst.f.max_depth();
  const Tree& tree = inst.f.tree();
  const double k_ra = std::exp(inst.r * c.alpha * c.log_k());
  const double k_r = std::exp(inst.r * c.log_k());
  const double s = g_scale(inst);
  const int top = lemma_top_index(k, inst.r);

  LemmaSets sets;
  const auto level_values = average_field(SphericalEvaluator(inst.f), inst.r, c.alpha, inst.eval_depth, threads);
  for (std::size_t i = 0; i < level_values.size(); ++i)
    if (level_values[i] > inst.lambda) sets.level_set.push_back(tree.vertex_at(i));

  const auto support = inst.f.support();
  for (VertexId x : support)
    if (inst.f(x) >= inst.lambda / 2.0) sets.big.push_back(x);

  std::vector<double> weighted_sum(level_values.size(), 0.0);
  for (int n = 0; n <= top; ++n) {
    const double lo = std::ldexp(1.0, n - 1);
    const double hi = std::ldexp(1.0, n);
    VertexSet En, Sn;
    for (VertexId x : support) {
      const double g = inst.f(x) * s;
      if (g >= lo) Sn.push_back(x);
      if (g >= lo && g < hi) En.push_back(x);
    }
    VertexSet Fn;
    if (!En.empty()) {
      const auto avg = average_field(SphericalEvaluator(TreeFunction::indicator(k, D, En)), inst.r, c.alpha,
                                     inst.eval_depth, threads);
      const double thr = (std::exp2(inst.lemma_beta) - 1.0) * k_ra * std::pow(hi / k_r, inst.lemma_beta) /
                         (lemma_kappa(c.alpha) * hi);
      for (std::size_t i = 0; i < avg.size(); ++i) {
        weighted_sum[i] += hi * avg[i];
        if (avg[i] >= thr) Fn.push_back(tree.vertex_at(i));
      }
    }
    sets.E.push_back(std::move(En));
    sets.superlevel.push_back(std::move(Sn));
    sets.F.push_back(std::move(Fn));
  }

  const double c0 = 1.0 - std::exp2(c.alpha - 1.0);
  for (std::size_t i = 0; i < weighted_sum.size(); ++i)
    if (weighted_sum[i] > c0 * k_ra) sets.I.push_back(tree.vertex_at(i));

  if (!sets.big.empty()) {
    const auto avg = average_field(SphericalEvaluator(TreeFunction::indicator(k, D, sets.big)), inst.r, c.alpha,
                                   inst.eval_depth, threads);
    for (std::size_t i = 0; i < avg.size(); ++i)
      if (avg[i] > 0.0) sets.II.push_back(tree.vertex_at(i));
  }
  return sets;
}

double lemma_pairs_constant(const LemmaInstance& inst, const LemmaSets& sets) {
  double best = 0.0;
  for (std::size_t n = 0; n < sets.E.size(); ++n)
    if (!sets.E[n].empty() && !sets.F[n].empty())
      best = std::max(best, z_ratio(inst.u, inst.v, sets.E[n], sets.F[n], inst.r, inst.cfg));
  const Tree& tree = inst.f.tree();
  for (VertexId y : sets.big) {
    const VertexSet sphere = tree.sphere_members(y, inst.r, inst.eval_depth);
    if (sphere.empty()) continue;
    const VertexSet single{y};
    best = std::max(best, z_ratio(inst.u, inst.v, single, sphere, inst.r, inst.cfg));
  }
  return best;
}

double LemmaVerdict::slack() const {
  if (lhs == 0.0) return std::numeric_limits<double>::infinity();
  return rhs / lhs;
}

LemmaVerdict lemma21_verify(const LemmaInstance& inst, int threads) {
  check_instance(inst);
  if (!(inst.class_constant > 0.0))
    fail(Errc::invalid_config, "class constant missing; run the weight-class search or certify the weight first");
  const auto& c = inst.cfg;
  const LemmaSets sets = lemma_sets(inst, threads);

  LemmaVerdict verdict;
  verdict.lhs = set_weight(inst.u, sets.level_set);
  verdict.rhs = lemma21_rhs(inst);
  verdict.steps.push_back(make_step("statement", verdict.lhs, verdict.rhs));

  const VertexSet covered = set_union(sets.I, sets.II);
  verdict.steps.push_back(make_step("cover", set_weight(inst.u, set_difference(sets.level_set, covered)), 0.0));

  VertexSet union_F;
  for (const auto& Fn : sets.F) union_F = set_union(union_F, Fn);
  verdict.steps.push_back(make_step("I_in_F", set_weight(inst.u, set_difference(sets.I, union_F)), 0.0));

  const double factor = per_n_factor(inst);
  double per_n_total = 0.0;
  for (std::size_t n = 0; n < sets.F.size(); ++n) {
    const int ni = static_cast<int>(n);
    const double rhs = factor * lemma_term(inst, ni, set_weight(inst.v, sets.E[n]));
    verdict.steps.push_back(make_step("F_" + std::to_string(n), set_weight(inst.u, sets.F[n]), rhs));
    per_n_total += factor * lemma_term(inst, ni, set_weight(inst.v, sets.superlevel[n]));
  }

  const double big_mass = set_weight(inst.v, sets.big);
  const double ii_rhs =
      big_mass > 0.0
          ? std::pow(inst.class_constant, c.q) * std::exp(inst.r * c.q * c.decay() * c.log_k()) * std::pow(big_mass, c.q / c.p)
          : 0.0;
  verdict.steps.push_back(make_step("II", set_weight(inst.u, sets.II), ii_rhs));
  verdict.steps.push_back(make_step("total", verdict.lhs, per_n_total + ii_rhs));

  verdict.pass = std::all_of(verdict.steps.begin(), verdict.steps.end(), [](const Step& s) { return s.pass; });
  return verdict;
}

LemmaVerdict two_weight_verify(const LemmaInstance& inst, int threads) { return lemma21_verify(inst, threads); }

SeriesWindow level_set_series_window(const ExponentConfig& cfg, double lemma_beta, int r_max) {
  SeriesWindow out;
  out.exponent = 1.0 - lemma_beta - cfg.decay() - cfg.alpha;
  out.beta_bound = (1.0 - cfg.epsilon) * (1.0 - cfg.alpha);
  out.convergent = out.exponent > 1e-12;
  out.r_max = r_max;
  const double lk = cfg.log_k();
  double sum = 0.0;
  for (int r = 0; r <= r_max; ++r) {
    sum += std::exp(-r * out.exponent * lk);
    out.partial_sums.push_back(sum);
  }
  bool ok = true;
  if (out.convergent) {
    const double ratio = std::exp(-out.exponent * lk);
    out.limit = 1.0 / (1.0 - ratio);
    for (int R = 0; R <= r_max; ++R) {
      const double tail = std::exp(-(R + 1) * out.exponent * lk) / (1.0 - ratio);
      const double S = out.partial_sums[static_cast<std::size_t>(R)];
      ok = ok && S <= out.limit * (1.0 + 1e-12) && std::abs(S + tail - out.limit) <= 1e-9 * out.limit;
    }
  } else {
    out.limit = std::numeric_limits<double>::infinity();
    for (int R = 0; R <= r_max; ++R) ok = ok && out.partial_sums[static_cast<std::size_t>(R)] >= (R + 1) * (1.0 - 1e-12);
  }
  out.partial_sums_consistent = ok;
  return out;
}

double phi(double a, double b, double rho, const ExponentConfig& cfg) {
  const double lk = cfg.log_k();
  return a * std::exp(rho * (cfg.p - cfg.delta) / 2.0 * lk) + b * std::exp(-rho / 2.0 * lk);
}

double phi_minimizer(double a, double b, const ExponentConfig& cfg) {
  if (!(a > 0.0)) fail(Errc::domain, "phi needs a > 0");
  if (!(b > 0.0)) fail(Errc::domain, "phi needs b > 0");
  const double s = cfg.p - cfg.delta;
  if (!(s > 0.0)) fail(Errc::domain, "phi needs p - delta > 0");
  return 2.0 / (s + 1.0) * std::log(b / (a * s)) / cfg.log_k();
}

double phi_minimum_constant(const ExponentConfig& cfg) {
  const double s = cfg.p - cfg.delta;
  const double theta = s / (s + 1.0);
  return std::pow(s, -theta) + std::pow(s, 1.0 - theta);
}

MinSum minsum_M(const Weight& w, std::span<const VertexId> E, std::span<const VertexId> F, int r,
                const ExponentConfig& cfg) {
  MinSum out;
  if (E.empty() || F.empty()) return out;
  const double lk = cfg.log_k();
  auto by_level = [&](std::span<const VertexId> set) {
    int depth = 0;
    for (VertexId v : set) depth = std::max(depth, v.depth);
    std::vector<double> mass(static_cast<std::size_t>(depth) + 1, 0.0);
    for (VertexId v : set) mass[static_cast<std::size_t>(v.depth)] += w(v);
    return mass;
  };
  const auto wE = by_level(E);
  const auto wF = by_level(F);
  const double qp = cfg.q / cfg.p;
  const double s = cfg.p - cfg.delta;

  for (int m = 0; m <= r; ++m)
    for (std::size_t j = 0; j < wE.size(); ++j) {
      const long i = static_cast<long>(j) + r - 2 * m;
      if (i < 0 || i >= static_cast<long>(wF.size())) continue;
      const double e = wE[j];
      const double f = wF[static_cast<std::size_t>(i)];
      if (e == 0.0 || f == 0.0) continue;
      const double x = std::exp(((r - m) * s + r * cfg.delta) * lk) * std::pow(e, qp);
      const double y = std::exp(m * lk) * f;
      out.M += std::min(x, y);
    }

  for (std::size_t j = 0; j < wE.size(); ++j) {
    const double kj = std::exp(static_cast<double>(j) * s * lk);
    out.A.push_back(std::pow(wE[j], qp) / kj);
    out.weighted_A += kj * out.A.back();
  }
  for (std::size_t j = 0; j < wF.size(); ++j) {
    const double kj = std::exp(static_cast<double>(j) * lk);
    out.B.push_back(wF[j] / kj);
    out.weighted_B += kj * out.B.back();
  }
  out.E_power = std::pow(set_weight(w, E), qp);
  out.F_weight = set_weight(w, F);
  return out;
}

ChainConstants chain_constants(const Weight& w, const ExponentConfig& cfg, int r, int eval_depth) {
  if (!w.is_radial()) fail(Errc::unsupported, "chain constants need a radial weight");
  if (cfg.mode != ExponentMode::sobolev) fail(Errc::unsupported, "chain constants need sobolev mode");
  ChainConstants c;
  const double scale_factor = std::pow(w.scale(), 1.0 - cfg.q / cfg.p);
  c.c0 = per_level_constant(w.beta(), cfg, r, eval_depth, eval_depth) * scale_factor;
  c.c1 = std::max(1.0, c.c0);
  const double k = static_cast<double>(cfg.k);
  c.c2 = std::max(1.0 / (1.0 - std::pow(k, -(cfg.p - cfg.delta) / 2.0)), 1.0 / (1.0 - std::pow(k, -0.5)));
  c.c3 = phi_minimum_constant(cfg);
  return c;
}

double certified_class_constant(const Weight& w, const ExponentConfig& cfg, int r, int eval_depth) {
  const ChainConstants c = chain_constants(w, cfg, r, eval_depth);
  return c.c1 * c.c2 * c.c3;
}

ChainTrace chain_verify(const Weight& w, std::span<const VertexId> E, std::span<const VertexId> F, int r,
                        const ExponentConfig& cfg, int eval_depth) {
  for (VertexId v : E)
    if (v.depth > eval_depth) fail(Errc::out_of_tree, "E leaves the evaluation region");
  for (VertexId v : F)
    if (v.depth > eval_depth) fail(Errc::out_of_tree, "F leaves the evaluation region");
  ChainTrace t;
  t.constants = chain_constants(w, cfg, r, eval_depth);
  const auto& c = t.constants;
  t.bilinear = bilinear_form(w, E, F, r);
  t.minsum = minsum_M(w, E, F, r, cfg);
  t.M = t.minsum.M;
  if (!E.empty() && !F.empty()) {
    const double lk = cfg.log_k();
    const double wE = set_weight(w, E);
    const double wF = set_weight(w, F);
    t.a0 = std::exp((cfg.p + cfg.delta) / 2.0 * r * lk) * std::pow(wE, cfg.q / cfg.p);
    t.b0 = std::exp(r / 2.0 * lk) * wF;
    t.rho0 = phi_minimizer(t.a0, t.b0, cfg);
    t.phi0 = phi(t.a0, t.b0, t.rho0, cfg);
    t.final_bound = std::exp((1.0 - cfg.alpha * cfg.p) * r * lk) * std::pow(wE, 1.0 / cfg.p) *
                    std::pow(wF, 1.0 - 1.0 / cfg.q);
  }
  t.steps.push_back(make_step("per_level", t.bilinear, c.c1 * t.M));
  t.steps.push_back(make_step("split", c.c1 * t.M, c.c1 * c.c2 * t.phi0));
  t.steps.push_back(make_step("optimum", c.c1 * c.c2 * t.phi0, c.c1 * c.c2 * c.c3 * t.final_bound));
  t.steps.push_back(make_step("sequence_A", t.minsum.weighted_A, t.minsum.E_power));
  t.steps.push_back(make_equality_step("sequence_B", t.minsum.weighted_B, t.minsum.F_weight));
  t.pass = std::all_of(t.steps.begin(), t.steps.end(), [](const Step& s) { return s.pass; });
  return t;
}

const char* to_string(ScanFamily family) {
  switch (family) {
    case ScanFamily::deltas: return "deltas";
    case ScanFamily::level_indicators: return "level-indicators";
    case ScanFamily::random: return "random";
    case ScanFamily::sphere_indicators: return "sphere-indicators";
  }
  return "deltas";
}

ScanFamily parse_scan_family(const std::string& text) {
  for (ScanFamily f : {ScanFamily::deltas, ScanFamily::level_indicators, ScanFamily::random,
                       ScanFamily::sphere_indicators})
    if (text == to_string(f)) return f;
  fail(Errc::invalid_config, "unknown scan family '" + text + "'");
}

std::vector<ScanMember> scan_family(ScanFamily family, int k, int support_depth, std::uint64_t seed, int samples) {
  const Tree tree(k);
  std::vector<ScanMember> out;
  switch (family) {
    case ScanFamily::deltas:
      for (VertexId v : full_region(k, support_depth)) {
        const VertexSet single{v};
        out.push_back({"delta:" + tree.path_string(v), TreeFunction::indicator(k, support_depth, single)});
      }
      break;
    case ScanFamily::level_indicators:
      for (int j = 0; j <= support_depth; ++j)
        out.push_back({"level:" + std::to_string(j), TreeFunction::indicator(k, support_depth, full_level(k, j))});
      break;
    case ScanFamily::random:
      for (int s = 0; s < samples; ++s) {
        TreeFunction f = random_function(k, support_depth, mix_seed(seed, static_cast<std::uint64_t>(s)), 0.5,
                                         1.0 / 16.0, 1.0);
        if (f.is_zero()) f.set(VertexId::root(), 1.0);
        out.push_back({"random:" + std::to_string(s), std::move(f)});
      }
      break;
    case ScanFamily::sphere_indicators: {
      std::vector<VertexId> centres{VertexId::root()};
      if (support_depth / 2 > 0) centres.push_back(VertexId{support_depth / 2, 0});
      for (VertexId c : centres)
        for (int r = 0; r <= support_depth; ++r) {
          const VertexSet sphere = tree.sphere_members(c, r, support_depth);
          if (sphere.empty()) continue;
          out.push_back({"sphere:" + tree.path_string(c) + ":" + std::to_string(r),
                         TreeFunction::indicator(k, support_depth, sphere)});
        }
      break;
    }
  }
  return out;
}

ScanReport operator_norm_scan(const Weight& w, const ExponentConfig& cfg, std::span<const ScanMember> members,
                              std::span<const int> depths, int threads) {
  if (!std::is_sorted(depths.begin(), depths.end())) fail(Errc::invalid_config, "scan depths must be ascending");
  ScanReport report;
  report.depths.assign(depths.begin(), depths.end());
  std::vector<double> previous(members.size(), 0.0);
  report.monotone = true;
  for (int depth : depths) {
    double best = -1.0;
    std::string best_label;
    for (std::size_t t = 0; t < members.size(); ++t) {
      const auto& member = members[t];
      if (depth < member.f.max_depth()) fail(Errc::invalid_config, "scan depth below the support depth");
      const MaximalField field = maximal_field(member.f, cfg.alpha, MaximalMode::sphere, depth, threads);
      ScanRow row;
      row.eval_depth = depth;
      row.member = member.label;
      row.numerator = lp_norm(field.values, cfg.q, w);
      row.denominator = lp_norm(member.f, cfg.p, w);
      row.ratio = row.denominator > 0.0 ? row.numerator / row.denominator : 0.0;
      if (row.numerator < previous[t] * (1.0 - 1e-12)) report.monotone = false;
      previous[t] = row.numerator;
      if (row.ratio > best) {
        best = row.ratio;
        best_label = row.member;
      }
      report.rows.push_back(std::move(row));
    }
    report.max_ratio.push_back(std::max(best, 0.0));
    report.argmax_member.push_back(best_label);
  }
  return report;
}

}  // namespace ktree
