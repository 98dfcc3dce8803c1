// Acceptance suite. Prints one PASS/FAIL line per criterion; exit status is 0
// only when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ktree/averages.hpp"
#include "ktree/bounds.hpp"
#include "ktree/experiment.hpp"
#include "ktree/ktree.h"
#include "support.hpp"

using namespace ktree;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double x) { return format_number(x); }

const Check* find_check(const Report& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool check_passed(const Report& r, const std::string& name) {
  const Check* c = find_check(r, name);
  return c && c->pass;
}

// ---------------------------------------------------------------- 1

Outcome geometry_exactness() {
  Outcome out;
  std::uint64_t brute_diffs = 0;
  for (int k : {2, 3}) {
    ExperimentConfig c;
    c.set_text("k", std::to_string(k));
    c.set_text("geometry.j_max", "6");
    c.set_text("geometry.r_max", "8");
    const Report r = run_experiment("geometry", c);
    out.require(r.pass(), "k=" + std::to_string(k) + " " + (r.first_failure() ? r.first_failure()->name : ""));
    // Independent digit-prefix count on a smaller range.
    for (int j = 0; j <= 4; ++j)
      for (int rad = 0; rad <= 4; ++rad)
        if (sphere_size(k, j, rad) != ktest::brute_sphere_size(k, VertexId{j, 0}, rad)) ++brute_diffs;
  }
  out.require(brute_diffs == 0, std::to_string(brute_diffs) + " reference diffs");
  out.note("0 diffs vs BFS oracle for k in {2,3}, j <= 6, r <= 8");
  return out;
}

// ---------------------------------------------------------------- 2

Outcome operator_exactness() {
  Outcome out;
  constexpr int kInstances = 500;
  const double alphas[] = {0.25, 0.5, 0.75};
  std::uint64_t vertices = 0, mismatches = 0, bound_fail = 0;
  for (int i = 0; i < kInstances; ++i) {
    const int k = 2 + i % 2;
    const int D = 1 + (i / 2) % 5;
    const double alpha = alphas[(i / 10) % 3];
    const TreeFunction f = random_function(k, D, mix_seed(2024, static_cast<std::uint64_t>(i)), 0.3, 0.0625, 1.0);
    const SphericalEvaluator eval(f);
    const Tree& tree = f.tree();
    // Every vertex of small regions, a seeded sample of larger ones.
    const int eval_depth = D + 1;
    const std::uint64_t n = region_size(k, eval_depth);
    SplitMix64 rng(mix_seed(7, static_cast<std::uint64_t>(i)));
    const std::uint64_t picks = std::min<std::uint64_t>(n, 24);
    const double c = equivalence_constant(k, alpha);
    for (std::uint64_t t = 0; t < picks; ++t) {
      const VertexId x = tree.vertex_at(n <= 24 ? t : rng.below(n));
      ++vertices;
      const auto s = eval.spherical_maximal(x, alpha);
      const auto b = eval.ball_maximal(x, alpha);
      const auto ns = naive::spherical_maximal(f, x, alpha);
      const auto nb = naive::ball_maximal(f, x, alpha);
      if (s.value != ns.value || s.radius != ns.radius || b.value != nb.value || b.radius != nb.radius) ++mismatches;
      for (int r = 0; r <= eval.support_radius(x); ++r) {
        const double a = eval.spherical_average(x, r, alpha);
        if (a != naive::spherical_sum(f, x, r) / sphere_normaliser(k, x.depth, r, alpha)) ++mismatches;
        if (std::exp2(alpha - 1.0) * a > b.value * (1 + 1e-12)) ++bound_fail;
      }
      if (s.value > std::exp2(1.0 - alpha) * b.value * (1 + 1e-12)) ++bound_fail;
      if (std::exp2(1.0 - alpha) * b.value > std::exp2(1.0 - alpha) * c * s.value * (1 + 1e-12)) ++bound_fail;
    }
  }
  out.require(mismatches == 0, std::to_string(mismatches) + " fast/naive mismatches");
  out.require(bound_fail == 0, std::to_string(bound_fail) + " equivalence violations");
  out.note(std::to_string(kInstances) + " instances, " + std::to_string(vertices) + " vertices, exact equality");
  return out;
}

// ---------------------------------------------------------------- 3

Outcome exponent_algebra() {
  Outcome out;
  int points = 0;
  double worst = 0.0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 5; ++b) {
      const double alpha = 0.04 + 0.07 * a;
      // p spread over (1, 1/alpha)
      const double p = 1.0 + (1.0 / alpha - 1.0) * (b + 0.5) / 5.0;
      const ExponentConfig c = derived_exponents(2, p, alpha);
      const double gaps[] = {
          std::abs((p - c.delta) / (p + 1.0 - c.delta) - (1.0 - 1.0 / c.q)),
          std::abs(1.0 / (p + 1.0 - c.delta) - 1.0 / c.q),
          std::abs(p / (p - c.delta + 1.0) - c.epsilon * (1.0 - alpha)),
      };
      for (double g : gaps) worst = std::max(worst, g);
      out.require(c.epsilon > 0.0 && c.epsilon < 1.0, "epsilon outside (0,1) at p=" + num(p));
      ++points;
    }
  out.require(worst <= 1e-12, "identity gap " + num(worst));
  const ExponentConfig e = derived_exponents(2, 2.0, 0.25);
  out.require(e.q == 4.0 && e.delta == -1.0 && std::abs(e.epsilon - 2.0 / 3.0) <= 1e-15, "p=2, alpha=1/4 values");
  out.note(std::to_string(points) + " grid points, worst gap " + num(worst) + "; q=4, delta=-1, eps=2/3");
  return out;
}

// ---------------------------------------------------------------- 4

Outcome window_certification() {
  Outcome out;
  std::size_t grid_range_agree = 0, grid_reduced_agree = 0, grid_total = 0;
  for (int k : {2, 3})
    for (double p : {1.5, 2.0, 3.0}) {
      const ExponentConfig cfg = derived_exponents(k, p, 1.0 / (2.0 * p));
      const double W = cfg.window_hi();
      const std::string tag = "k=" + std::to_string(k) + " p=" + num(p);
      for (double beta : {0.0, W / 2.0, W}) {
        const PerLevelReport rep = per_level_condition_check(beta, cfg, 12, 12);
        out.require(rep.pass, tag + " beta=" + num(beta) + " ratio " + num(rep.max_ratio) + " at (j,r,m)=(" +
                                  std::to_string(rep.j) + "," + std::to_string(rep.r) + "," + std::to_string(rep.m) + ")");
      }
      const PerLevelReport over = per_level_condition_check(W + 0.001, cfg, 12, 12);
      out.require(!over.pass, tag + " beta=window+0.001 has no violation (max ratio " + num(over.max_ratio) + ")");
      std::vector<double> betas;
      for (int t = 0; t < 100; ++t) betas.push_back(3.0 * W * t / 99.0);
      const Cor1GridReport grid = cor1_grid(cfg, betas, 12, 12);
      grid_range_agree += grid.range_agree;
      grid_reduced_agree += grid.reduced_agree;
      grid_total += betas.size();
    }
  out.require(grid_range_agree == grid_total,
              "exponent inequality agrees with the window on " + std::to_string(grid_range_agree) + "/" +
                  std::to_string(grid_total) + " grid points");
  out.note("reduced predicate agrees on " + std::to_string(grid_reduced_agree) + "/" + std::to_string(grid_total));
  return out;
}

// ---------------------------------------------------------------- 5

Outcome lemma_suite() {
  Outcome out;
  std::size_t total = 0, statement = 0, steps = 0;
  for (int k : {2, 3})
    for (bool at_window : {false, true}) {
      ExperimentConfig c;
      c.set_text("k", std::to_string(k));
      const double W = c.exponents().window_hi();
      c.set_text("weight.beta", num(at_window ? W : 0.0));
      c.set_text("radii", "0,1,2,3,4");
      c.set_text("lemma.betas", "0.1,0.4,0.8");
      c.set_text("lemma.quantiles", "0,0.5,0.9");
      c.set_text("lemma.instances", "180");
      c.set_text("lemma.constant", "certified");
      const Report r = run_experiment("lemma", c);
      const Table* inst = nullptr;
      for (const auto& t : r.tables)
        if (t.name == "instances") inst = &t;
      total += inst->rows.size();
      statement += r.summary["statement_passed"].get<std::size_t>();
      steps += r.summary["passed"].get<std::size_t>();
      if (!check_passed(r, "level_set_estimate"))
        out.require(false, "k=" + std::to_string(k) + " beta=" + num(at_window ? W : 0.0) + ": " +
                               find_check(r, "level_set_estimate")->detail);
    }
  out.require(total >= 600, "only " + std::to_string(total) + " instances");
  out.note(std::to_string(statement) + "/" + std::to_string(total) + " statements hold with the certified constant; " +
           std::to_string(steps) + "/" + std::to_string(total) + " with every proof step");
  return out;
}

// ---------------------------------------------------------------- 6

Outcome chain_suite() {
  Outcome out;
  for (const char* beta : {"0", "0.5"}) {
    ExperimentConfig c;
    c.set_text("weight.beta", beta);
    c.set_text("chain.instances", "100");
    const Report r = run_experiment("chain", c);
    for (const char* name : {"chain_links", "phi_minimality", "exponent_identity"})
      out.require(check_passed(r, name), std::string("beta=") + beta + " " + name + ": " + find_check(r, name)->detail);
  }
  out.note("2 x 100 instances, 100 phi samples each");
  return out;
}

// ---------------------------------------------------------------- 7

// Exhaustive optima on the depth-2 binary region for p = 2, alpha = 1/4,
// recorded from the first verified run.
struct Baseline {
  double beta;
  int r;
  double constant;
};

constexpr Baseline kBaselines[] = {
#include "zclass_baselines.inc"
};

Outcome weight_class_search() {
  Outcome out;
  const ExponentConfig cfg = derived_exponents(2, 2.0, 0.25);
  const VertexSet region = full_region(2, 2);
  std::size_t checked = 0;
  double worst_fraction = 1.0;
  for (const Baseline& b : kBaselines) {
    const Weight w = Weight::radial(2, b.beta);
    const ZClassEntry ex = z_constant_exhaustive(w, w, b.r, region, cfg);
    const std::string tag = "beta=" + num(b.beta) + " r=" + std::to_string(b.r);
    out.require(std::abs(ex.constant - b.constant) <= 1e-9 * b.constant, tag + " baseline moved to " + num(ex.constant));
    HeuristicOptions opt;
    const ZClassEntry h = z_constant_heuristic(w, w, b.r, region, cfg, opt);
    out.require(h.constant <= ex.constant * (1 + 1e-12), tag + " heuristic above exhaustive");
    out.require(h.constant >= 0.95 * ex.constant, tag + " heuristic below 95%");
    if (ex.constant > 0.0) worst_fraction = std::min(worst_fraction, h.constant / ex.constant);
    const double scaled = z_ratio(w.scaled(10.0), ex.E, ex.F, b.r, cfg);
    out.require(std::abs(scaled - std::pow(10.0, -0.25) * ex.constant) <= 1e-9 * scaled, tag + " scaling law");
    ++checked;
  }
  out.require(region.size() == 7, "region size");
  out.note(std::to_string(checked) + " baselines, worst heuristic fraction " + num(worst_fraction));
  return out;
}

// ---------------------------------------------------------------- 8

Outcome divergence_probe() {
  Outcome out;
  const ExponentConfig cfg = derived_exponents(2, 2.0, 0.25);
  const Weight w = Weight::radial(2, 1.5);
  double worst = 0.0;
  double prev = 0.0;
  for (int r = 0; r <= 12; ++r) {
    const VertexSet F = full_level(2, r);
    // Reference ratio: pairwise bilinear form over the explicit denominator.
    double wF = 0.0;
    for (VertexId y : F) wF += w(y);
    const double ref = ktest::brute_bilinear(w, VertexSet{VertexId::root()}, F, r) /
                       (std::pow(2.0, cfg.epsilon * r * (1.0 - cfg.alpha)) * std::pow(wF, 1.0 - 1.0 / cfg.q));
    const double ratio = necessity_probe_ratio(1.5, cfg, r);
    out.require(ktest::relative_gap(ratio, ref) < 1e-12, "r=" + std::to_string(r) + " probe vs reference");
    if (r > 0) worst = std::max(worst, std::abs(std::log2(ratio / prev) - 0.125));
    prev = ratio;
  }
  out.require(worst <= 1e-9, "exponent deviation " + num(worst));
  out.note("measured growth exponent within " + num(worst) + " of 0.125");
  return out;
}

// ---------------------------------------------------------------- 9

Outcome series_window() {
  Outcome out;
  int cases = 0;
  for (int k : {2, 3}) {
    const ExponentConfig cfg = derived_exponents(k, 2.0, 0.25);
    const double bound = (1.0 - cfg.epsilon) * (1.0 - cfg.alpha);
    for (double offset : {-0.2, -0.05, -0.001, 0.001, 0.05, 0.3}) {
      const double beta = bound + offset;
      const SeriesWindow s = level_set_series_window(cfg, beta);
      const double e = 1.0 - beta - cfg.epsilon * (1.0 - cfg.alpha) - cfg.alpha;
      double sum = 0.0;
      for (int r = 0; r <= 200; ++r) sum += std::pow(static_cast<double>(k), -r * e);
      const bool expect_convergent = offset < 0.0;
      const std::string tag = "k=" + std::to_string(k) + " beta=" + num(beta);
      out.require(s.convergent == expect_convergent, tag + " verdict");
      out.require(s.partial_sums_consistent, tag + " partial sums");
      if (expect_convergent) {
        const double limit = 1.0 / (1.0 - std::pow(static_cast<double>(k), -e));
        const double tail = std::pow(static_cast<double>(k), -201.0 * e) / (1.0 - std::pow(static_cast<double>(k), -e));
        out.require(sum <= limit * (1 + 1e-12) && limit - sum <= tail * (1 + 1e-9) + 1e-12 * limit, tag + " tail bound");
      } else {
        out.require(sum >= 201.0 * (1 - 1e-12), tag + " partial sums stay bounded");
      }
      ++cases;
    }
  }
  out.note(std::to_string(cases) + " lemma_beta values on both sides of the bound");
  return out;
}

// ---------------------------------------------------------------- 10

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "ktree_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0;
  for (std::size_t s = 0; s < kt_subcommand_count(); ++s) {
    const std::string sub = kt_subcommand_name(s);
    std::vector<fs::path> dirs;
    for (const char* threads : {"1", "2", "8", "1"}) {
      kt_experiment* exp = nullptr;
      kt_experiment_create(&exp);
      kt_experiment_set(exp, "threads", threads);
      kt_experiment_set(exp, "weight.beta", "0.5");
      const fs::path dir = root / (sub + "_" + threads + "_" + std::to_string(dirs.size()));
      const kt_status st = kt_experiment_run(exp, sub.c_str());
      out.require(st == KT_OK, sub + " run: " + kt_last_error());
      if (st == KT_OK) kt_experiment_write_to(exp, dir.string().c_str(), "both");
      kt_experiment_destroy(exp);
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs.front())) {
      const std::string name = entry.path().filename().string();
      const std::string ref = slurp(entry.path());
      ++files;
      for (std::size_t d = 1; d < dirs.size(); ++d)
        out.require(slurp(dirs[d] / name) == ref, sub + "/" + name + " differs in run " + std::to_string(d));
    }
  }
  out.note(std::to_string(files) + " files byte-identical across 1, 2 and 8 threads and a rerun");
  return out;
}

struct Criterion {
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const Criterion criteria[] = {
      {"geometry exactness", 10, geometry_exactness},
      {"operator exactness", 60, operator_exactness},
      {"exponent algebra", 1, exponent_algebra},
      {"radial window certification", 30, window_certification},
      {"level-set estimate suite", 120, lemma_suite},
      {"chain of estimates", 60, chain_suite},
      {"weight-class search", 120, weight_class_search},
      {"divergence probe", 5, divergence_probe},
      {"series window", 1, series_window},
      {"determinism", 0, determinism},
  };

  bool all = true;
  for (int i = 1; i <= 10; ++i) {
    if (only != 0 && only != i) continue;
    const Criterion& c = criteria[i - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0) o.require(secs <= c.budget_s, "runtime " + num(secs) + " s over " + num(c.budget_s) + " s");
    std::printf("criterion %d %s: %s [%.2f s] %s\n", i, o.pass ? "PASS" : "FAIL", c.title, secs, o.detail.c_str());
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
