#include "ktree/weight_class.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "ktree/parallel.hpp"

namespace ktree {

namespace {

constexpr double kRelTol = 1e-9;

int max_depth_of(std::span<const VertexId> set) {
  int d = -1;
  for (VertexId v : set) d = std::max(d, v.depth);
  return d;
}

bool contains(std::span<const VertexId> sorted, VertexId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

// Sphere sizes above this are never enumerated when a pairwise scan is cheaper.
std::uint64_t sphere_size_or_max(int k, int j, int r) {
  try {
    return sphere_size(k, j, r);
  } catch (const Error&) {
    return std::numeric_limits<std::uint64_t>::max();
  }
}

// #{x in E : d(x, y) = r} for sorted E.
std::uint64_t count_at_distance(const Tree& tree, std::span<const VertexId> E, int e_depth, VertexId y, int r) {
  std::uint64_t count = 0;
  if (E.size() <= sphere_size_or_max(tree.k(), y.depth, r)) {
    for (VertexId x : E)
      if (tree.distance(x, y) == r) ++count;
    return count;
  }
  tree.for_each_sphere_member(y, r, e_depth, [&](VertexId x) {
    if (contains(E, x)) ++count;
  });
  return count;
}

void require_nonempty(std::span<const VertexId> E, std::span<const VertexId> F) {
  if (E.empty() || F.empty()) fail(Errc::domain, "z_ratio needs nonempty E and F");
}

double set_weight(const Weight& w, std::span<const VertexId> set) {
  return weight_of_set(w, set, std::numeric_limits<int>::max());
}

struct Candidate {
  VertexId v;
  double key;
  double weight;
};

// Candidate order: key desc, weight desc, canonical.
void sort_candidates(std::vector<Candidate>& list) {
  std::sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
    if (a.key != b.key) return a.key > b.key;
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.v < b.v;
  });
}

struct Pick {
  double ratio = 0.0;
  VertexSet E;
  VertexSet F;
};

// Best E-prefix for fixed F: x ranked by u(F ∩ S(x, r)) / v(x).
Pick best_E_for(const Weight& u, const Weight& v, std::span<const VertexId> F, int r,
                std::span<const VertexId> universe, const ExponentConfig& cfg, std::uint64_t& evals) {
  const Tree tree(u.k());
  const int cap = max_depth_of(universe);
  std::vector<double> g(universe.size(), 0.0);
  for (VertexId y : F) {
    const double uy = u(y);
    tree.for_each_sphere_member(y, r, cap, [&](VertexId x) {
      const auto it = std::lower_bound(universe.begin(), universe.end(), x);
      if (it != universe.end() && *it == x) g[static_cast<std::size_t>(it - universe.begin())] += uy;
    });
  }
  std::vector<Candidate> list;
  for (std::size_t t = 0; t < universe.size(); ++t)
    if (g[t] > 0.0) list.push_back({universe[t], g[t] / v(universe[t]), v(universe[t])});
  sort_candidates(list);

  const double uF = set_weight(u, F);
  Pick best;
  double B = 0.0;
  double V = 0.0;
  std::size_t best_len = 0;
  for (std::size_t t = 0; t < list.size(); ++t) {
    B += list[t].key * list[t].weight;
    V += list[t].weight;
    const double ratio = z_ratio_from_sums(B, V, uF, r, cfg);
    ++evals;
    if (ratio > best.ratio) {
      best.ratio = ratio;
      best_len = t + 1;
    }
  }
  std::vector<VertexId> E;
  for (std::size_t t = 0; t < best_len; ++t) E.push_back(list[t].v);
  best.E = make_vertex_set(std::move(E));
  best.F.assign(F.begin(), F.end());
  return best;
}

Pick ascend(const Weight& u, const Weight& v, VertexSet E, int r, std::span<const VertexId> universe,
            const ExponentConfig& cfg, int max_rounds, std::uint64_t& evals) {
  Pick best;
  for (int round = 0; round < max_rounds; ++round) {
    const FCandidates fc = optimal_F_candidates(u, v, E, r, universe, cfg);
    evals += fc.ratios.size();
    if (fc.order.empty()) break;
    const std::size_t b = fc.best();
    if (!(fc.ratios[b] > best.ratio * (1.0 + 1e-12))) break;
    best = {fc.ratios[b], E, fc.prefix(b)};

    Pick next = best_E_for(u, v, best.F, r, universe, cfg, evals);
    if (!(next.ratio > best.ratio * (1.0 + 1e-12))) break;
    best = next;
    E = best.E;
  }
  return best;
}

}  // namespace

double ExponentConfig::log_k() const { return std::log(static_cast<double>(k)); }

ExponentConfig derived_exponents(int k, double p, double alpha, ExponentMode mode, double free_q) {
  if (k < 2 || k > kMaxBranching) fail(Errc::domain, "k must lie in [2, " + std::to_string(kMaxBranching) + "]");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(Errc::domain, "alpha must lie in (0, 1)");
  if (!(p > 1.0)) fail(Errc::domain, "p must be > 1");
  if (!(p < 1.0 / alpha)) fail(Errc::domain, "p must be < 1/alpha");
  ExponentConfig cfg;
  cfg.k = k;
  cfg.p = p;
  cfg.alpha = alpha;
  cfg.mode = mode;
  const double ap = alpha * p;
  cfg.delta = (1.0 - ap - ap * p) / (1.0 - ap);
  cfg.epsilon = (1.0 - ap) / (1.0 - alpha);
  if (mode == ExponentMode::sobolev) {
    cfg.q = 1.0 / (1.0 / p - alpha);
  } else {
    if (!std::isfinite(free_q) || !(free_q >= p)) fail(Errc::domain, "free mode requires a finite q >= p");
    cfg.q = free_q;
  }
  return cfg;
}

double bilinear_form(const Weight& u, std::span<const VertexId> E, std::span<const VertexId> F, int r) {
  if (r < 0) fail(Errc::domain, "radius must be nonnegative");
  if (E.empty() || F.empty()) return 0.0;
  const Tree tree(u.k());
  const int e_depth = max_depth_of(E);
  double total = 0.0;
  for (VertexId y : F) {
    const auto c = count_at_distance(tree, E, e_depth, y, r);
    if (c > 0) total += u(y) * static_cast<double>(c);
  }
  return total;
}

double z_ratio_from_sums(double bilinear, double v_of_E, double u_of_F, int r, const ExponentConfig& cfg) {
  if (!(bilinear > 0.0)) return 0.0;
  const double log_ratio = std::log(bilinear) - cfg.decay() * r * cfg.log_k() - std::log(v_of_E) / cfg.p -
                           (1.0 - 1.0 / cfg.q) * std::log(u_of_F);
  return std::exp(log_ratio);
}

double z_ratio(const Weight& u, const Weight& v, std::span<const VertexId> E, std::span<const VertexId> F, int r,
               const ExponentConfig& cfg) {
  require_nonempty(E, F);
  return z_ratio_from_sums(bilinear_form(u, E, F, r), set_weight(v, E), set_weight(u, F), r, cfg);
}

double z_ratio(const Weight& w, std::span<const VertexId> E, std::span<const VertexId> F, int r,
               const ExponentConfig& cfg) {
  return z_ratio(w, w, E, F, r, cfg);
}

std::size_t FCandidates::best() const {
  std::size_t b = std::string::npos;
  double value = -1.0;
  for (std::size_t t = 0; t < ratios.size(); ++t)
    if (ratios[t] > value) {
      value = ratios[t];
      b = t;
    }
  return b;
}

VertexSet FCandidates::prefix(std::size_t index) const {
  return make_vertex_set(std::vector<VertexId>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(index) + 1));
}

FCandidates optimal_F_candidates(const Weight& u, const Weight& v, std::span<const VertexId> E, int r,
                                 std::span<const VertexId> universe, const ExponentConfig& cfg) {
  if (E.empty()) fail(Errc::domain, "optimal_F_candidates needs a nonempty E");
  const Tree tree(u.k());
  const int cap = max_depth_of(universe);
  std::vector<std::uint64_t> count(universe.size(), 0);
  for (VertexId x : E) {
    tree.for_each_sphere_member(x, r, cap, [&](VertexId y) {
      const auto it = std::lower_bound(universe.begin(), universe.end(), y);
      if (it != universe.end() && *it == y) ++count[static_cast<std::size_t>(it - universe.begin())];
    });
  }
  std::vector<Candidate> list;
  for (std::size_t t = 0; t < universe.size(); ++t)
    if (count[t] > 0) list.push_back({universe[t], static_cast<double>(count[t]), u(universe[t])});
  sort_candidates(list);

  FCandidates out;
  const double vE = set_weight(v, E);
  double B = 0.0;
  double U = 0.0;
  for (const Candidate& c : list) {
    B += c.weight * c.key;
    U += c.weight;
    out.order.push_back(c.v);
    out.ratios.push_back(z_ratio_from_sums(B, vE, U, r, cfg));
  }
  return out;
}

ZClassEntry z_constant_exhaustive(const Weight& u, const Weight& v, int r, std::span<const VertexId> region,
                                  const ExponentConfig& cfg) {
  const std::size_t n = region.size();
  if (n > kExhaustiveGuard)
    fail(Errc::oracle_guard, "exhaustive search refuses regions above " + std::to_string(kExhaustiveGuard) +
                                 " vertices (got " + std::to_string(n) + ")");
  if (n == 0) fail(Errc::domain, "exhaustive search needs a nonempty region");
  const Tree tree(u.k());
  const std::uint32_t full = (1u << n) - 1u;

  std::vector<std::uint32_t> at_r(n, 0);  // at_r[y] = bitmask of x with d(x, y) = r
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x)
      if (tree.distance(region[x], region[y]) == r) at_r[y] |= 1u << x;

  std::vector<double> uw(n), vw(n);
  for (std::size_t t = 0; t < n; ++t) {
    uw[t] = u(region[t]);
    vw[t] = v(region[t]);
  }
  // Subset sums by lowest set bit.
  std::vector<double> vE(full + 1, 0.0), uF(full + 1, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    vE[s] = vE[s & (s - 1)] + vw[low];
    uF[s] = uF[s & (s - 1)] + uw[low];
  }
  std::vector<double> vE_pow(full + 1, 0.0), uF_pow(full + 1, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    vE_pow[s] = std::pow(vE[s], 1.0 / cfg.p);
    uF_pow[s] = std::pow(uF[s], 1.0 - 1.0 / cfg.q);
  }
  const double radial_factor = std::exp(cfg.decay() * r * cfg.log_k());

  double best = 0.0;
  std::uint32_t best_E = 0, best_F = 0;
  std::vector<double> term(n), bsum(full + 1, 0.0);
  for (std::uint32_t e = 1; e <= full; ++e) {
    for (std::size_t y = 0; y < n; ++y) term[y] = uw[y] * std::popcount(e & at_r[y]);
    const double denom_e = radial_factor * vE_pow[e];
    for (std::uint32_t f = 1; f <= full; ++f) {
      bsum[f] = bsum[f & (f - 1)] + term[static_cast<std::size_t>(std::countr_zero(f))];
      if (bsum[f] <= 0.0) continue;
      const double ratio = bsum[f] / (denom_e * uF_pow[f]);
      if (ratio > best) {
        best = ratio;
        best_E = e;
        best_F = f;
      }
    }
  }

  ZClassEntry entry;
  entry.r = r;
  entry.method = "exhaustive";
  entry.evals = static_cast<std::uint64_t>(full) * full;
  if (best_E != 0) {
    for (std::size_t t = 0; t < n; ++t) {
      if (best_E & (1u << t)) entry.E.push_back(region[t]);
      if (best_F & (1u << t)) entry.F.push_back(region[t]);
    }
    entry.E = make_vertex_set(std::move(entry.E));
    entry.F = make_vertex_set(std::move(entry.F));
    entry.constant = z_ratio(u, v, entry.E, entry.F, r, cfg);
  }
  return entry;
}

ZClassEntry z_constant_heuristic(const Weight& u, const Weight& v, int r, std::span<const VertexId> universe,
                                 const ExponentConfig& cfg, const HeuristicOptions& options) {
  if (universe.empty()) fail(Errc::domain, "heuristic search needs a nonempty universe");
  const VertexSet sorted = make_vertex_set(std::vector<VertexId>(universe.begin(), universe.end()));
  const int depth = max_depth_of(sorted);

  std::vector<VertexSet> starts;
  if (sorted.size() <= options.singleton_start_limit)
    for (VertexId x : sorted) starts.push_back({x});
  for (int s = 0; s < options.random_starts; ++s) {
    const auto seed = mix_seed(options.seed, static_cast<std::uint64_t>(s));
    VertexSet E;
    for (VertexId x : random_set(u.k(), depth, seed, options.start_density))
      if (contains(sorted, x)) E.push_back(x);
    if (E.empty()) {
      SplitMix64 rng(seed);
      E.push_back(sorted[rng.below(sorted.size())]);
    }
    starts.push_back(std::move(E));
  }

  std::vector<Pick> picks(starts.size());
  std::vector<std::uint64_t> evals(starts.size(), 0);
  parallel_for(starts.size(), options.threads, [&](std::size_t s) {
    picks[s] = ascend(u, v, starts[s], r, sorted, cfg, options.max_rounds, evals[s]);
  });

  ZClassEntry entry;
  entry.r = r;
  entry.method = "superlevel";
  std::size_t best = starts.size();
  for (std::size_t s = 0; s < starts.size(); ++s) {
    entry.evals += evals[s];
    if (picks[s].ratio > 0.0 && (best == starts.size() || picks[s].ratio > picks[best].ratio)) best = s;
  }
  if (best != starts.size()) {
    entry.E = picks[best].E;
    entry.F = picks[best].F;
    entry.constant = z_ratio(u, v, entry.E, entry.F, r, cfg);
  }
  return entry;
}

PerLevelReport per_level_condition_check(double beta, const ExponentConfig& cfg, int j_max, int r_max, int i_max) {
  const double lk = cfg.log_k();
  const double qp = cfg.q / cfg.p;
  PerLevelReport rep;
  bool first = true;
  for (int j = 0; j <= j_max; ++j)
    for (int r = 0; r <= r_max; ++r)
      for (int m = 0; m <= r; ++m) {
        const int i = j + r - 2 * m;
        if (i < 0 || (i_max >= 0 && i > i_max)) continue;
        const auto count = level_sphere_count(cfg.k, j, r, m);
        if (count == 0) continue;
        const double log_lhs = std::log(static_cast<double>(count)) + beta * i * lk;
        const double log_rhs = ((r - m) * (cfg.p - cfg.delta) + r * cfg.delta + beta * j * qp) * lk;
        const double ratio = std::exp(log_lhs - log_rhs);
        ++rep.checked;
        if (first || ratio > rep.max_ratio) {
          rep.max_ratio = ratio;
          rep.j = j;
          rep.r = r;
          rep.m = m;
          first = false;
        }
      }
  rep.pass = rep.max_ratio <= 1.0 + kRelTol;
  return rep;
}

double per_level_constant(double beta, const ExponentConfig& cfg, int r, int j_max, int i_max) {
  const double lk = cfg.log_k();
  const double qp = cfg.q / cfg.p;
  double worst = 0.0;
  for (int j = 0; j <= j_max; ++j)
    for (int m = 0; m <= r; ++m) {
      const int i = j + r - 2 * m;
      if (i < 0 || i > i_max) continue;
      const auto count = level_sphere_count(cfg.k, j, r, m);
      if (count == 0) continue;
      const double log_ratio = std::log(static_cast<double>(count)) + beta * i * lk -
                               ((r - m) * (cfg.p - cfg.delta) + r * cfg.delta + beta * j * qp) * lk;
      worst = std::max(worst, std::exp(log_ratio));
    }
  return worst;
}

Cor1Report cor1_check(double beta, const ExponentConfig& cfg, int j_max, int r_max) {
  const double qp = cfg.q / cfg.p;
  Cor1Report rep;
  bool first = true;
  for (int j = 0; j <= j_max; ++j)
    for (int r = 0; r <= r_max; ++r)
      for (int m = 0; m <= r; ++m) {
        const int i = j + r - 2 * m;
        if (i < 0) continue;
        const double lhs = (r - m) * (1.0 + 2.0 * beta * qp - cfg.p + cfg.delta);
        const double rhs = r * cfg.delta + r * beta * qp - i * (beta - beta * qp);
        const double margin = rhs - lhs;
        if (first || margin < rep.worst_margin) {
          rep.worst_margin = margin;
          rep.j = j;
          rep.r = r;
          rep.m = m;
          first = false;
        }
      }
  rep.range_holds = rep.worst_margin >= -kRelTol;
  rep.reduced_holds = 1.0 + beta * qp - cfg.p <= kRelTol;
  rep.in_window = beta >= 0.0 && beta <= cfg.window_hi() + kRelTol;
  return rep;
}

Cor1GridReport cor1_grid(const ExponentConfig& cfg, std::span<const double> betas, int j_max, int r_max) {
  Cor1GridReport grid;
  grid.betas.assign(betas.begin(), betas.end());
  bool any = false;
  for (double beta : betas) {
    const Cor1Report rep = cor1_check(beta, cfg, j_max, r_max);
    if (rep.reduced_holds == rep.in_window) ++grid.reduced_agree;
    if (rep.range_holds == rep.in_window) ++grid.range_agree;
    if (rep.range_holds) {
      grid.range_lo = any ? std::min(grid.range_lo, beta) : beta;
      grid.range_hi = any ? std::max(grid.range_hi, beta) : beta;
      any = true;
    }
    grid.reports.push_back(rep);
  }
  return grid;
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::certified: return "certified";
    case Membership::refuted: return "refuted";
    case Membership::unknown: return "unknown";
  }
  return "unknown";
}

double necessity_probe_exponent(double beta, const ExponentConfig& cfg) {
  return (1.0 + beta) / cfg.q - cfg.decay();
}

double necessity_probe_ratio(double beta, const ExponentConfig& cfg, int r) {
  const Weight w = Weight::radial(cfg.k, beta);
  const VertexSet E{VertexId::root()};
  const VertexSet F = full_level(cfg.k, r);
  return z_ratio(w, E, F, r, cfg);
}

WindowCertificate certify_radial_weight(double beta, const ExponentConfig& cfg, int j_max, int r_max) {
  if (cfg.mode != ExponentMode::sobolev) fail(Errc::unsupported, "window certification needs sobolev mode");
  WindowCertificate cert;
  cert.window_hi = cfg.window_hi();
  cert.in_window = beta >= cert.window_lo && beta <= cert.window_hi + kRelTol;
  cert.per_level = per_level_condition_check(beta, cfg, j_max, r_max);
  cert.probe_exponent = necessity_probe_exponent(beta, cfg);
  if (cert.per_level.pass)
    cert.verdict = Membership::certified;
  else if (cert.probe_exponent > 1e-12)
    cert.verdict = Membership::refuted;
  else
    cert.verdict = Membership::unknown;
  return cert;
}

}  // namespace ktree
