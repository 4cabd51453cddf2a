#include "confdim/weights.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "confdim/errors.hpp"
#include "confdim/grid_modulus.hpp"
#include "confdim/rng.hpp"

namespace confdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTol = 1e-9;

double alpha_pow(const FillingGraph& g, int n) { return std::pow(g.alpha(), n); }

// Filled ball that degrades to the whole space when the anchor is swallowed.
PointSet filled_or_all(const FiniteMetricSpace& s, int c, double r) {
  if (!s.has_anchor()) throw BadConfig("space has no anchor for filled balls");
  if (s.dist(c, s.anchor()) < r) {
    PointSet all(s.n_points());
    for (int i = 0; i < s.n_points(); ++i) all[i] = i;
    return all;
  }
  return s.filled_ball(c, r, s.anchor());
}

}  // namespace

std::string to_string(SigmaStrategy s) {
  switch (s) {
    case SigmaStrategy::Ratio: return "ratio";
    case SigmaStrategy::RatioWithEvent: return "ratio_with_event";
    case SigmaStrategy::MetricOnly: return "metric_only";
    case SigmaStrategy::MetricOnlyWithEvent: return "metric_only_with_event";
  }
  return "?";
}

SigmaStrategy sigma_strategy_from_string(const std::string& s) {
  if (s == "ratio") return SigmaStrategy::Ratio;
  if (s == "ratio_with_event") return SigmaStrategy::RatioWithEvent;
  if (s == "metric_only") return SigmaStrategy::MetricOnly;
  if (s == "metric_only_with_event") return SigmaStrategy::MetricOnlyWithEvent;
  throw BadConfig("unknown sigma strategy: " + s);
}

bool check_F_event(const FiniteMetricSpace& space, int x, int n, double alpha, double zeta) {
  const double wt = std::pow(alpha, n - 1 + zeta);  // disconnector ball radius
  const double band_w = 8.0 * wt;
  const double h = space.proximity_scale();
  if (band_w < 3.0 * h) throw ScaleTooCoarse("band width below 3h");
  const double an1 = std::pow(alpha, n - 1);
  const double t_lo = an1 / 8.0, t_hi = an1 / 4.0 - band_w;
  if (t_hi < t_lo) return false;

  const auto& adj = space.proximity_adjacency();
  const int N = space.n_points();
  const int t_steps = std::min(6, 1 + static_cast<int>((t_hi - t_lo) / std::max(h / 2.0, 1e-12)));

  for (int ts = 0; ts < t_steps; ++ts) {
    double t = t_steps == 1 ? t_lo : t_lo + (t_hi - t_lo) * ts / (t_steps - 1);
    if (space.has_anchor() && space.dist(x, space.anchor()) < t + band_w) continue;
    PointSet inner = filled_or_all(space, x, t);
    PointSet outer = filled_or_all(space, x, t + band_w);
    std::vector<char> in_inner(N, 0), in_outer(N, 0);
    for (int p : inner) in_inner[p] = 1;
    for (int p : outer) in_outer[p] = 1;
    std::vector<int> band;
    for (int p : outer)
      if (!in_inner[p]) band.push_back(p);
    if (band.empty()) continue;

    // Source side: band points touching the inner fill; target: touching the
    // complement of the outer fill.
    std::vector<char> is_source(N, 0), is_target(N, 0);
    for (int p : band) {
      for (int q : adj[p]) {
        if (in_inner[q]) is_source[p] = 1;
        if (!in_outer[q]) is_target[p] = 1;
      }
    }

    // Middle-third centers, thinned to an h/2-separated sample.
    std::vector<int> centers;
    for (int p : band) {
      double d = space.dist(x, p);
      if (d >= t + band_w / 3.0 && d <= t + 2.0 * band_w / 3.0) {
        bool close = false;
        for (int q : centers)
          if (space.dist(p, q) < h / 2.0) {
            close = true;
            break;
          }
        if (!close) centers.push_back(p);
      }
    }
    if (centers.empty()) continue;

    auto connects = [&](const std::vector<char>& removed) {
      std::deque<int> queue;
      std::vector<char> seen(N, 0);
      for (int p : band)
        if (is_source[p] && !removed[p]) {
          seen[p] = 1;
          queue.push_back(p);
        }
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (is_target[u]) return true;
        for (int v : adj[u])
          if (!seen[v] && !removed[v] && in_outer[v] && !in_inner[v]) {
            seen[v] = 1;
            queue.push_back(v);
          }
      }
      return false;
    };

    std::vector<char> removed(N, 0);
    if (!connects(removed)) continue;  // band already broken at this t
    bool good = true;
    for (int z : centers) {
      std::fill(removed.begin(), removed.end(), 0);
      for (int p : space.ball(z, wt)) removed[p] = 1;
      if (!connects(removed)) {
        good = false;
        break;
      }
    }
    if (good) return true;
  }
  return false;
}

WeightState default_sigma(const FillingGraph& g, const EmbeddingRef& emb, double eta, double zeta,
                          SigmaStrategy strategy) {
  if (!(eta > 0.0) || !(eta < 0.5)) throw BadConfig("eta must lie in (0, 1/2)");
  if (!(zeta > 0.0) || !(zeta < 1.0)) throw BadConfig("zeta must lie in (0, 1)");
  const bool use_ratio =
      strategy == SigmaStrategy::Ratio || strategy == SigmaStrategy::RatioWithEvent;
  const bool use_event =
      strategy == SigmaStrategy::RatioWithEvent || strategy == SigmaStrategy::MetricOnlyWithEvent;
  if (use_ratio && !emb.valid()) throw MissingEmbedding("ratio strategies need an embedding");

  const FiniteMetricSpace& sp = g.space();
  WeightState st;
  st.eta = eta;
  st.zeta = zeta;
  const int V = g.n_vertices();
  st.sigma.assign(V, 0.0);
  st.event_checked.assign(V, 0);
  st.event_failed.assign(V, 0);

  const double metric_ratio = std::min(std::pow(g.alpha(), 1.0 - zeta), 1.0);

  for (int n = 1; n < g.n_levels(); ++n) {
    const double ball_r = 4.0 * alpha_pow(g, n);
    const double fill_r = std::pow(g.alpha(), n - 1 + zeta);
    for (int i = 0; i < g.level_size(n); ++i) {
      const int f = g.flat(n, i);
      const int x = g.point_of(n, i);
      bool event_ok = true;
      if (use_event) {
        st.event_checked[f] = 1;
        try {
          event_ok = check_F_event(sp, x, n, g.alpha(), zeta);
        } catch (const ScaleTooCoarse&) {
          event_ok = false;  // unknowable at this resolution: treat as failed
        }
        st.event_failed[f] = event_ok ? 0 : 1;
      }
      if (!event_ok) {
        st.sigma[f] = 1.0;
        continue;
      }
      if (!use_ratio) {
        st.sigma[f] = metric_ratio;
        continue;
      }
      PointSet ball = sp.ball(x, ball_r);
      PointSet fill = filled_or_all(sp, x, fill_r);
      ShapeStats ball_st = shape_stats(*emb.embedding, [&] {
        PointSet mapped(ball.size());
        for (std::size_t k = 0; k < ball.size(); ++k) mapped[k] = (*emb.vertex_of_point)[ball[k]];
        return mapped;
      }(), (*emb.vertex_of_point)[x]);
      ShapeStats fill_st = shape_stats(*emb.embedding, [&] {
        PointSet mapped(fill.size());
        for (std::size_t k = 0; k < fill.size(); ++k) mapped[k] = (*emb.vertex_of_point)[fill[k]];
        return mapped;
      }(), (*emb.vertex_of_point)[x]);
      if (fill_st.inradius <= 0.0) {
        st.sigma[f] = 1.0;
        ++st.zero_inradius_count;
        continue;
      }
      st.sigma[f] = std::min(ball_st.euclid_diam / fill_st.inradius, 1.0);
    }
  }
  return st;
}

namespace {

// Source/target level-n vertex sets per level-(n-1) parent: a vertex x is a
// source for parent y when B_{4 a^n}(x) meets B_{a^{n-1}}(y) and a target
// when it leaves B_{2 a^{n-1}}(y).
struct CrossingSets {
  std::vector<std::vector<char>> source;  // [parent][x]
  std::vector<std::vector<char>> target;
};

CrossingSets build_crossing_sets(const FillingGraph& g, int n) {
  const FiniteMetricSpace& sp = g.space();
  const double rn = alpha_pow(g, n), rp = alpha_pow(g, n - 1);
  const int sz = g.level_size(n), psz = g.level_size(n - 1);
  std::vector<PointSet> balls(sz);
  for (int i = 0; i < sz; ++i) balls[i] = sp.ball(g.point_of(n, i), 4.0 * rn);

  CrossingSets cs;
  cs.source.assign(psz, std::vector<char>(sz, 0));
  cs.target.assign(psz, std::vector<char>(sz, 0));
  for (int q = 0; q < psz; ++q) {
    const int y = g.point_of(n - 1, q);
    for (int i = 0; i < sz; ++i) {
      for (int p : balls[i]) {
        double d = sp.dist(p, y);
        if (d < rp) cs.source[q][i] = 1;
        if (d >= 2.0 * rp) cs.target[q][i] = 1;
        if (cs.source[q][i] && cs.target[q][i]) break;
      }
    }
  }
  return cs;
}

// Node-weighted shortest path from sources to targets on the level graph;
// optionally records the argmin chain.
double crossing_margin(const FillingGraph& g, const std::vector<double>& sigma, int n,
                       const std::vector<char>& source, const std::vector<char>& target,
                       std::vector<int>* chain = nullptr) {
  const int sz = g.level_size(n);
  std::vector<double> dist(sz, kInf);
  std::vector<int> prev(sz, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int i = 0; i < sz; ++i)
    if (source[i]) {
      dist[i] = sigma[g.flat(n, i)];
      heap.emplace(dist[i], i);
    }
  std::vector<char> done(sz, 0);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (target[u]) {
      if (chain) {
        chain->clear();
        for (int v = u; v >= 0; v = prev[v]) chain->push_back(v);
      }
      return d;
    }
    for (int v : g.horizontal(n, u)) {
      double nd = d + sigma[g.flat(n, v)];
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  return kInf;
}

}  // namespace

double admissibility_margin(const FillingGraph& g, const std::vector<double>& sigma,
                            int parent_level, int parent_id) {
  const int n = parent_level + 1;
  if (n >= g.n_levels()) throw BadConfig("no level below this parent");
  CrossingSets cs = build_crossing_sets(g, n);
  return crossing_margin(g, sigma, n, cs.source[parent_id], cs.target[parent_id]);
}

MarginReport repair_sigma(const FillingGraph& g, WeightState& state) {
  MarginReport rep;
  rep.min_margin.assign(g.n_levels(), kInf);
  rep.scale_applied.assign(g.n_levels(), 1.0);
  for (int n = 1; n < g.n_levels(); ++n) {
    CrossingSets cs = build_crossing_sets(g, n);
    const int psz = g.level_size(n - 1);
    std::vector<double> margin(psz);
    for (int q = 0; q < psz; ++q)
      margin[q] = crossing_margin(g, state.sigma, n, cs.source[q], cs.target[q]);

    // Exact-zero margins: raise sigma to 1 on the cheapest chain's argmin
    // vertex until every margin is positive.
    bool any_zero = true;
    while (any_zero) {
      any_zero = false;
      for (int q = 0; q < psz; ++q) {
        while (margin[q] == 0.0) {
          std::vector<int> chain;
          crossing_margin(g, state.sigma, n, cs.source[q], cs.target[q], &chain);
          int pick = -1;
          for (int v : chain)
            if (pick < 0 || state.sigma[g.flat(n, v)] < state.sigma[g.flat(n, pick)]) pick = v;
          if (pick < 0) break;
          state.sigma[g.flat(n, pick)] = 1.0;
          ++rep.raised_vertices;
          margin[q] = crossing_margin(g, state.sigma, n, cs.source[q], cs.target[q]);
          any_zero = true;
        }
      }
      if (any_zero)  // raises may have changed other parents' chains
        for (int q = 0; q < psz; ++q)
          if (margin[q] == 0.0) margin[q] = crossing_margin(g, state.sigma, n, cs.source[q],
                                                            cs.target[q]);
    }

    double mmin = kInf;
    for (double m : margin) mmin = std::min(mmin, m);
    rep.min_margin[n] = mmin;
    if (mmin < 1.0 && std::isfinite(mmin)) {
      if (mmin <= 0.0) throw ZeroMargin("margin still zero after raises");
      double s = 1.0 / mmin;
      for (int i = 0; i < g.level_size(n); ++i) state.sigma[g.flat(n, i)] *= s;
      rep.scale_applied[n] = s;
      rep.min_margin[n] = mmin * s;
    }
  }
  return rep;
}

void compute_nu_mu(const FillingGraph& g, WeightState& state) {
  const int V = g.n_vertices();
  state.nu.assign(V, 0.0);
  state.mu.assign(V, 0.0);
  for (int n = 1; n < g.n_levels(); ++n) {
    for (int i = 0; i < g.level_size(n); ++i) {
      double best = state.sigma[g.flat(n, i)];
      auto absorb = [&](int j) {
        best = std::max(best, state.sigma[g.flat(n, j)]);
        for (int k : g.horizontal(n, j)) best = std::max(best, state.sigma[g.flat(n, k)]);
      };
      absorb(i);
      for (int j : g.horizontal(n, i)) absorb(j);
      const int f = g.flat(n, i);
      state.nu[f] = 2.0 * best;
      state.mu[f] = std::max(state.eta, std::min(state.nu[f], 1.0 - state.eta));
    }
  }
}

void choose_parents(const FillingGraph& g, WeightState& state) {
  const int V = g.n_vertices();
  state.parent.assign(V, -1);
  const FiniteMetricSpace& sp = g.space();
  for (int n = 1; n < g.n_levels(); ++n) {
    const double rp = alpha_pow(g, n - 1);
    for (int i = 0; i < g.level_size(n); ++i) {
      const int y = g.point_of(n, i);
      int best = -1;
      double bd = kInf;
      for (int q = 0; q < g.level_size(n - 1); ++q) {
        double d = sp.dist(y, g.point_of(n - 1, q));
        if (d < bd) {
          bd = d;
          best = q;
        }
      }
      if (bd > rp + kLogTol)
        throw AxiomViolation("parent distance exceeds alpha^n at level " + std::to_string(n));
      state.parent[g.flat(n, i)] = g.flat(n - 1, best);
    }
  }
}

void regularize_pi(const FillingGraph& g, WeightState& state) {
  const int V = g.n_vertices();
  const double log_eta = std::log(state.eta);
  state.log_pi.assign(V, 0.0);
  state.log_pi_prime.assign(V, 0.0);
  state.log_rho.assign(V, 0.0);
  state.log_pi[g.flat(0, 0)] = 0.0;

  for (int n = 1; n < g.n_levels(); ++n) {
    const int sz = g.level_size(n);
    // pi'
    for (int i = 0; i < sz; ++i) {
      const int f = g.flat(n, i);
      state.log_pi_prime[f] = state.log_pi[state.parent[f]] + std::log(state.mu[f]);
    }
    // dominators: v' > v iff horizontal neighbors and pi'(v') > pi'(v)/eta
    std::vector<char> has_dom(sz, 0), is_dom(sz, 0);
    std::vector<double> dom_sup(sz, -kInf);
    for (int i = 0; i < sz; ++i) {
      const double base = state.log_pi_prime[g.flat(n, i)] - log_eta;  // log(pi'(v)/eta)
      for (int j : g.horizontal(n, i)) {
        double lpj = state.log_pi_prime[g.flat(n, j)];
        if (lpj > base + 0.0) {
          has_dom[i] = 1;
          is_dom[j] = 1;
          dom_sup[i] = std::max(dom_sup[i], lpj);
        }
      }
    }
    // no-chain property: no vertex may both dominate and be dominated
    for (int i = 0; i < sz; ++i)
      if (has_dom[i] && is_dom[i])
        throw AxiomViolation("domination chain at level " + std::to_string(n) + " vertex " +
                             std::to_string(i));
    for (int i = 0; i < sz; ++i) {
      const int f = g.flat(n, i);
      state.log_pi[f] = has_dom[i] ? log_eta + dom_sup[i] : state.log_pi_prime[f];
    }
    // Postcondition (i): eta <= pi(v)/pi(v') <= 1/eta across horizontal edges.
    for (int i = 0; i < sz; ++i)
      for (int j : g.horizontal(n, i)) {
        double r = state.log_pi[g.flat(n, i)] - state.log_pi[g.flat(n, j)];
        if (r < log_eta - kLogTol || r > -log_eta + kLogTol)
          throw AxiomViolation("pi ratio outside [eta, 1/eta] at level " + std::to_string(n));
      }
    // Postcondition (ii): pi = pi' or pi = eta sup{pi'(v') : v ~ v'} > pi'.
    for (int i = 0; i < sz; ++i) {
      const int f = g.flat(n, i);
      if (!has_dom[i]) continue;
      double sup_all = state.log_pi_prime[f];
      for (int j : g.horizontal(n, i))
        sup_all = std::max(sup_all, state.log_pi_prime[g.flat(n, j)]);
      if (std::abs(state.log_pi[f] - (log_eta + sup_all)) > kLogTol ||
          state.log_pi[f] <= state.log_pi_prime[f])
        throw AxiomViolation("regularized pi shape violated at level " + std::to_string(n));
    }
    // Postcondition (iii): some vertical neighbor u one level up has
    // 1 <= pi(u)/pi(v) <= 1/eta.
    for (int i = 0; i < sz; ++i) {
      const int f = g.flat(n, i);
      bool ok = false;
      for (int q : g.vertical_down(n, i)) {
        double r = state.log_pi[g.flat(n - 1, q)] - state.log_pi[f];
        if (r >= -kLogTol && r <= -log_eta + kLogTol) {
          ok = true;
          break;
        }
      }
      if (!ok)
        throw AxiomViolation("no vertical witness for pi at level " + std::to_string(n) +
                             " vertex " + std::to_string(i));
    }
    for (int i = 0; i < sz; ++i) {
      const int f = g.flat(n, i);
      state.log_rho[f] = state.log_pi[f] - state.log_pi[state.parent[f]];
    }
  }
}

AxiomReport check_H_axioms(const FillingGraph& g, const WeightState& state, int n_paths,
                           std::uint64_t seed) {
  AxiomReport rep;
  const double log_eta = std::log(state.eta);
  const double log_1me = std::log1p(-state.eta);
  // H1 both clauses.
  for (int n = 1; n < g.n_levels(); ++n)
    for (int i = 0; i < g.level_size(n); ++i) {
      const int f = g.flat(n, i);
      double lr = state.log_rho[f];
      if (lr < log_eta - kLogTol || lr > log_1me + kLogTol) {
        ++rep.h1_violations;
        if (rep.witness.empty()) rep.witness = "H1 range at level " + std::to_string(n);
      }
      double mu_sup = state.mu[f];
      for (int j : g.horizontal(n, i)) mu_sup = std::max(mu_sup, state.mu[g.flat(n, j)]);
      double rho = std::exp(lr);
      if (rho < state.mu[f] - 1e-9 || rho > mu_sup + 1e-9) {
        ++rep.h1_violations;
        if (rep.witness.empty()) rep.witness = "H1 mu clause at level " + std::to_string(n);
      }
    }
  // H2 over all edges.
  for (int n = 0; n < g.n_levels(); ++n)
    for (int i = 0; i < g.level_size(n); ++i) {
      const int f = g.flat(n, i);
      for (int j : g.horizontal(n, i)) {
        double r = state.log_pi[f] - state.log_pi[g.flat(n, j)];
        if (std::abs(r) > -2.0 * log_eta + kLogTol) ++rep.h2_violations;
      }
      for (int j : g.vertical_up(n, i)) {
        double r = state.log_pi[f] - state.log_pi[g.flat(n + 1, j)];
        if (r < 2.0 * log_eta - kLogTol || r > -2.0 * log_eta + kLogTol) ++rep.h2_violations;
      }
      double excess = state.log_pi[f] - n * log_1me;
      rep.max_log_pi_minus_bound = std::max(rep.max_log_pi_minus_bound, excess);
    }
  if (rep.h1_violations > 0) throw H1Violation(rep.witness);
  if (rep.h2_violations > 0) throw H2Violation("H2 ratio outside [eta^2, eta^-2]");

  // H3 over sampled Z-paths (horizontal edges plus parent edges).
  std::vector<std::vector<int>> children(g.n_vertices());
  for (int f = 0; f < g.n_vertices(); ++f)
    if (state.parent[f] >= 0) children[state.parent[f]].push_back(f);
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pickv(0, g.n_vertices() - 1);
  std::uniform_int_distribution<int> len(2, 16);
  rep.h3_min_ratio = kInf;
  for (int k = 0; k < n_paths; ++k) {
    int u = pickv(rng);
    std::vector<int> path{u};
    int cur = u;
    int steps = len(rng);
    for (int s = 0; s < steps; ++s) {
      auto [lvl, id] = g.level_id(cur);
      std::vector<int> nbrs;
      for (int j : g.horizontal(lvl, id)) nbrs.push_back(g.flat(lvl, j));
      if (state.parent[cur] >= 0) nbrs.push_back(state.parent[cur]);
      for (int c : children[cur]) nbrs.push_back(c);
      if (nbrs.empty()) break;
      std::uniform_int_distribution<int> pick(0, static_cast<int>(nbrs.size()) - 1);
      cur = nbrs[pick(rng)];
      path.push_back(cur);
    }
    if (path.size() < 2 || path.front() == path.back()) continue;
    // sum of pi along the path, in linear space via max-shift
    double mx = -kInf;
    for (int v : path) mx = std::max(mx, state.log_pi[v]);
    double sum = 0.0;
    for (int v : path) sum += std::exp(state.log_pi[v] - mx);
    double log_sum = mx + std::log(sum);
    // pi(u0, uN) for vertices: deepest level where the ancestors interact
    auto ancestors = [&](int v) {
      std::vector<int> chain{v};
      while (state.parent[chain.back()] >= 0) chain.push_back(state.parent[chain.back()]);
      std::reverse(chain.begin(), chain.end());
      return chain;  // chain[l] = ancestor at level l
    };
    auto ca = ancestors(path.front()), cb = ancestors(path.back());
    int top = static_cast<int>(std::min(ca.size(), cb.size())) - 1;
    double log_pair = -kInf;
    for (int l = top; l >= 0; --l) {
      int a = ca[l], b = cb[l];
      bool adj = a == b;
      if (!adj) {
        auto [la, ia] = g.level_id(a);
        auto [lb, ib] = g.level_id(b);
        (void)lb;
        for (int j : g.horizontal(la, ia))
          if (g.flat(la, j) == b) {
            adj = true;
            break;
          }
      }
      if (adj) {
        log_pair = std::max(state.log_pi[a], state.log_pi[b]);
        break;
      }
    }
    double ratio = std::exp(log_sum - log_pair);
    rep.h3_min_ratio = std::min(rep.h3_min_ratio, ratio);
    ++rep.h3_paths;
  }
  if (rep.h3_paths == 0) rep.h3_min_ratio = 0.0;
  return rep;
}

PairPi pi_of_pair(const FillingGraph& g, const WeightState& state, int x, int y) {
  if (x == y) throw IdenticalPoints("pi_of_pair needs distinct points");
  const FiniteMetricSpace& sp = g.space();
  PairPi out;
  for (int n = g.n_levels() - 1; n >= 0; --n) {
    const double r2 = 2.0 * alpha_pow(g, n);
    std::vector<int> wit;
    for (int i = 0; i < g.level_size(n); ++i) {
      const int z = g.point_of(n, i);
      if (sp.dist(z, x) < r2 && sp.dist(z, y) < r2) wit.push_back(i);
    }
    if (!wit.empty()) {
      out.n = n;
      out.witnesses = wit;
      double best = -kInf;
      for (int i : wit) best = std::max(best, state.log_pi[g.flat(n, i)]);
      out.log_pi = best;
      return out;
    }
  }
  throw AxiomViolation("no witness found even at the root level");
}

BoundaryMetric boundary_metric(const FillingGraph& g, const WeightState& state, double epsilon,
                               BoundaryMethod method, int max_points, std::uint64_t seed) {
  if (!(epsilon > 0.0) || epsilon > 1.0) throw BadEpsilon("epsilon must lie in (0, 1]");
  BoundaryMetric bm;
  bm.epsilon = epsilon;
  bm.method = method;

  const int deep = g.n_levels() - 1;
  std::vector<int> ids(g.level_size(deep));
  for (int i = 0; i < g.level_size(deep); ++i) ids[i] = i;
  if (static_cast<int>(ids.size()) > max_points) {
    Rng rng = make_rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(max_points);
    std::sort(ids.begin(), ids.end());
  }
  const int k = static_cast<int>(ids.size());
  bm.points.resize(k);
  for (int i = 0; i < k; ++i) bm.points[i] = g.point_of(deep, ids[i]);
  bm.values.assign(static_cast<std::size_t>(k) * k, 0.0);

  if (method == BoundaryMethod::PiComparator) {
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) {
        PairPi pp = pi_of_pair(g, state, bm.points[a], bm.points[b]);
        double v = std::exp(epsilon * pp.log_pi);
        bm.values[static_cast<std::size_t>(a) * k + b] = v;
        bm.values[static_cast<std::size_t>(b) * k + a] = v;
      }
    return bm;
  }

  // Graph methods: Dijkstra over the full filling with deformed edge lengths.
  const bool lower = method == BoundaryMethod::GraphPathLower;
  const double horiz_len = 2.0 * std::log(1.0 / state.eta);
  const int V = g.n_vertices();
  auto edge_weight = [&](int f_from, int f_to, double len) {
    double da = -state.log_pi[f_from], db = -state.log_pi[f_to];
    double m = lower ? std::max(da, db) : std::min(da, db);
    return len * std::exp(-epsilon * m);
  };
  for (int a = 0; a < k; ++a) {
    std::vector<double> dist(V, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    int src = g.flat(deep, ids[a]);
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      auto [lvl, id] = g.level_id(u);
      auto relax = [&](int v, double w) {
        if (d + w < dist[v]) {
          dist[v] = d + w;
          heap.emplace(dist[v], v);
        }
      };
      for (int j : g.horizontal(lvl, id))
        relax(g.flat(lvl, j), edge_weight(u, g.flat(lvl, j), horiz_len));
      for (int j : g.vertical_up(lvl, id)) {
        int v = g.flat(lvl + 1, j);
        relax(v, edge_weight(u, v, -state.log_rho[v]));
      }
      for (int j : g.vertical_down(lvl, id)) {
        int v = g.flat(lvl - 1, j);
        relax(v, edge_weight(u, v, -state.log_rho[u]));
      }
    }
    for (int b = 0; b < k; ++b)
      bm.values[static_cast<std::size_t>(a) * k + b] = dist[g.flat(deep, ids[b])];
  }
  // enforce exact symmetry
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      double v = std::min(bm.values[static_cast<std::size_t>(a) * k + b],
                          bm.values[static_cast<std::size_t>(b) * k + a]);
      bm.values[static_cast<std::size_t>(a) * k + b] = v;
      bm.values[static_cast<std::size_t>(b) * k + a] = v;
    }
  return bm;
}

VarsigmaReport varsigma_varpi(const FillingGraph& g, const EmbeddingRef& emb, WeightState& state) {
  if (!emb.valid()) throw MissingEmbedding("varsigma needs an embedding");
  const FiniteMetricSpace& sp = g.space();
  const int V = g.n_vertices();
  state.varsigma.assign(V, 1.0);
  state.log_varpi.assign(V, 0.0);
  VarsigmaReport rep;

  for (int n = 1; n < g.n_levels(); ++n) {
    const double r_in = std::pow(g.alpha(), n - 1 + state.zeta) / 2.0;
    const double r_out = 32.0 * alpha_pow(g, n);
    for (int i = 0; i < g.level_size(n); ++i) {
      const int f = g.flat(n, i);
      const int x = g.point_of(n, i);
      double m_hat = 0.0;
      PointSet inner = filled_or_all(sp, x, r_in);
      PointSet outer = filled_or_all(sp, x, r_out);
      auto map_pts = [&](const PointSet& ps) {
        PointSet mapped(ps.size());
        for (std::size_t k = 0; k < ps.size(); ++k) mapped[k] = (*emb.vertex_of_point)[ps[k]];
        return mapped;
      };
      const int cx = (*emb.vertex_of_point)[x];
      double inr = shape_stats(*emb.embedding, map_pts(inner), cx).inradius;
      double outr = shape_stats(*emb.embedding, map_pts(outer), cx).outradius;
      if (inr > outr && outr > 0.0)
        m_hat = modulus_from_ratio(inr, outr);
      else if (inr > 0.0 && outr == 0.0)
        m_hat = std::numeric_limits<double>::infinity();  // point inside a fat region
      double event_term = 2.0;
      if (state.event_checked.size() == static_cast<std::size_t>(V) && state.event_checked[f] &&
          !state.event_failed[f])
        event_term = 0.0;
      double vs = std::min(state.eta + 128.0 * std::exp(-2.0 * M_PI * m_hat) + event_term, 1.0);
      state.varsigma[f] = vs;
      if (vs < 1.0) ++rep.nontrivial;
      state.log_varpi[f] = state.log_varpi[state.parent[f]] + std::log(vs);
      double excess = state.log_pi[f] - state.log_varpi[f];
      if (excess > rep.max_log_excess) rep.max_log_excess = excess;
      if (excess > 1e-12) {
        rep.pi_bounded = false;
        if (rep.witness.empty())
          rep.witness = "pi exceeds varpi at level " + std::to_string(n) + " vertex " +
                        std::to_string(i);
      }
    }
  }
  return rep;
}

}  // namespace confdim
