#include "confdim/excursion.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "confdim/errors.hpp"
#include "confdim/rng.hpp"

namespace confdim {

int SnakeLabels::argmin() const {
  return static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());
}

double SnakeLabels::min() const { return *std::min_element(values.begin(), values.end()); }

ExcursionPath sample_excursion(int n, std::uint64_t seed) {
  if (n < 2) throw BadConfig("excursion needs n >= 2");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> walk(n + 1, 0.0);
  double step_sd = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 1; k <= n; ++k) walk[k] = walk[k - 1] + step_sd * gauss(rng);

  // Bridge, then Vervaat rotation at the (first) minimum.
  std::vector<double> bridge(n + 1);
  for (int k = 0; k <= n; ++k)
    bridge[k] = walk[k] - (static_cast<double>(k) / n) * walk[n];
  int m = 0;
  for (int k = 1; k < n; ++k)
    if (bridge[k] < bridge[m]) m = k;

  ExcursionPath ex;
  ex.n_steps = n;
  ex.values.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    int idx = (m + k) % n;
    ex.values[k] = bridge[idx] - bridge[m];
  }
  ex.values[0] = 0.0;
  ex.values[n] = 0.0;
  return ex;
}

namespace {

SnakeLabels snake_tree(const ExcursionPath& x, Rng& rng) {
  const int n = x.n_steps;
  std::normal_distribution<double> gauss(0.0, 1.0);
  SnakeLabels z;
  z.values.assign(n + 1, 0.0);

  // Stack of (height, label) along the current branch, heights increasing.
  std::vector<std::pair<double, double>> stack{{0.0, 0.0}};
  for (int i = 0; i < n; ++i) {
    double m = std::min(x.values[i], x.values[i + 1]);
    // Retract the branch to height m, sampling the label there by a
    // Brownian bridge between the last surviving point and the lowest
    // point popped.
    double hi_h = stack.back().first, hi_z = stack.back().second;
    while (stack.size() > 1 && stack.back().first > m) {
      hi_h = stack.back().first;
      hi_z = stack.back().second;
      stack.pop_back();
    }
    double lo_h = stack.back().first, lo_z = stack.back().second;
    double zm;
    if (m <= lo_h) {
      zm = lo_z;
    } else if (m >= hi_h) {
      zm = hi_z;
    } else {
      double span = hi_h - lo_h;
      double mean = lo_z + (hi_z - lo_z) * (m - lo_h) / span;
      double var = (m - lo_h) * (hi_h - m) / span;
      zm = mean + std::sqrt(var) * gauss(rng);
      stack.emplace_back(m, zm);
    }
    if (stack.back().first < m) stack.emplace_back(m, zm);

    double grow = x.values[i + 1] - m;
    double znew = grow > 0.0 ? zm + std::sqrt(grow) * gauss(rng) : zm;
    if (grow > 0.0) stack.emplace_back(x.values[i + 1], znew);
    z.values[i + 1] = znew;
  }
  z.values[0] = 0.0;
  if (x.values[n] == 0.0) z.values[n] = 0.0;
  return z;
}

SnakeLabels snake_dense(const ExcursionPath& x, Rng& rng) {
  const int n = x.n_steps;
  if (n > 4000) throw BackendTooLarge("dense snake backend is limited to n <= 4000");
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Covariance over interior indices 1..n-1 (endpoints are pinned to 0).
  const int m = n - 1;
  SnakeLabels z;
  z.values.assign(n + 1, 0.0);
  if (m <= 0) return z;

  Eigen::MatrixXd cov(m, m);
  for (int i = 1; i < n; ++i) {
    double running = x.values[i];
    cov(i - 1, i - 1) = running;
    for (int j = i + 1; j < n; ++j) {
      running = std::min(running, x.values[j]);
      cov(i - 1, j - 1) = running;
      cov(j - 1, i - 1) = running;
    }
  }
  if (cov.diagonal().maxCoeff() <= 0.0) return z;  // degenerate: all labels pinned
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    double jitter = 1e-12 * cov.diagonal().maxCoeff();
    for (int k = 0; k < 8 && llt.info() != Eigen::Success; ++k) {
      llt.compute(cov + jitter * Eigen::MatrixXd::Identity(m, m));
      jitter *= 10.0;
    }
    if (llt.info() != Eigen::Success) throw SolverDiverged("snake covariance factorization failed");
  }
  Eigen::VectorXd g(m);
  for (int i = 0; i < m; ++i) g(i) = gauss(rng);
  Eigen::VectorXd zz = llt.matrixL() * g;
  for (int i = 1; i < n; ++i) z.values[i] = zz(i - 1);
  return z;
}

}  // namespace

SnakeLabels sample_snake(const ExcursionPath& x, std::uint64_t seed, SnakeBackend backend) {
  Rng rng = make_rng(seed);
  return backend == SnakeBackend::Tree ? snake_tree(x, rng) : snake_dense(x, rng);
}

DzeroTable::DzeroTable(const ExcursionPath& x, const SnakeLabels& z) {
  (void)x;
  z_ = z.values;
  n_ = static_cast<int>(z_.size()) - 1;
  pref_.resize(n_ + 1);
  suf_.resize(n_ + 1);
  pref_[0] = z_[0];
  for (int i = 1; i <= n_; ++i) pref_[i] = std::min(pref_[i - 1], z_[i]);
  suf_[n_] = z_[n_];
  for (int i = n_ - 1; i >= 0; --i) suf_[i] = std::min(suf_[i + 1], z_[i]);

  int levels = 1;
  while ((1 << levels) <= n_ + 1) ++levels;
  rmq_.assign(levels, std::vector<double>(n_ + 1));
  rmq_[0] = z_;
  for (int k = 1; k < levels; ++k) {
    int half = 1 << (k - 1);
    for (int i = 0; i + (1 << k) <= n_ + 1; ++i)
      rmq_[k][i] = std::min(rmq_[k - 1][i], rmq_[k - 1][i + half]);
  }
}

double DzeroTable::range_min(int i, int j) const {
  // min over [i, j] inclusive
  int len = j - i + 1;
  int k = 31 - __builtin_clz(len);
  return std::min(rmq_[k][i], rmq_[k][j - (1 << k) + 1]);
}

double DzeroTable::operator()(int i, int j) const {
  if (i > j) std::swap(i, j);
  double inner = range_min(i, j);
  double outer = std::min(pref_[i], suf_[j]);
  return z_[i] + z_[j] - 2.0 * std::max(inner, outer);
}

double dzero(const ExcursionPath& x, const SnakeLabels& z, int i, int j) {
  DzeroTable t(x, z);
  return t(i, j);
}

namespace {

// Dense Dijkstra over the complete graph with D-circ weights.
void dijkstra_row(const DzeroTable& t, int src, double* dist) {
  const int n = t.n() + 1;
  std::vector<char> done(n, 0);
  std::fill(dist, dist + n, std::numeric_limits<double>::infinity());
  dist[src] = 0.0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int v = 0; v < n; ++v)
      if (!done[v] && dist[v] < best) {
        best = dist[v];
        u = v;
      }
    if (u < 0) break;
    done[u] = 1;
    for (int v = 0; v < n; ++v) {
      if (done[v]) continue;
      double nd = dist[u] + t(u, v);
      if (nd < dist[v]) dist[v] = nd;
    }
  }
}

// Same, over a precomputed weight matrix (used for the all-pairs quotient).
void dijkstra_row_dense(const double* w, int n, int src, double* dist) {
  std::vector<char> done(n, 0);
  std::fill(dist, dist + n, std::numeric_limits<double>::infinity());
  dist[src] = 0.0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int v = 0; v < n; ++v)
      if (!done[v] && dist[v] < best) {
        best = dist[v];
        u = v;
      }
    if (u < 0) break;
    done[u] = 1;
    const double* row = w + static_cast<std::size_t>(u) * n;
    double du = dist[u];
    for (int v = 0; v < n; ++v) {
      if (done[v]) continue;
      double nd = du + row[v];
      if (nd < dist[v]) dist[v] = nd;
    }
  }
}

}  // namespace

std::vector<double> quotient_from_source(const DzeroTable& table, int src) {
  std::vector<double> d(table.n() + 1);
  dijkstra_row(table, src, d.data());
  return d;
}

std::vector<double> quotient_from_source_oracle(const DzeroTable& table, int src) {
  const int n = table.n() + 1;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  dist[src] = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int u = 0; u < n; ++u) {
      if (!std::isfinite(dist[u])) continue;
      for (int v = 0; v < n; ++v) {
        double nd = dist[u] + table(u, v);
        if (nd < dist[v]) {
          dist[v] = nd;
          changed = true;
        }
      }
    }
  }
  return dist;
}

QuotientResult quotient_metric(const ExcursionPath& x, const SnakeLabels& z, int n_threads) {
  const int n = x.n_steps;
  const int np = n + 1;
  DzeroTable table(x, z);

  std::vector<double> dz(static_cast<std::size_t>(np) * np);
  for (int i = 0; i < np; ++i) {
    dz[static_cast<std::size_t>(i) * np + i] = 0.0;
    for (int j = i + 1; j < np; ++j) {
      double w = table(i, j);
      dz[static_cast<std::size_t>(i) * np + j] = w;
      dz[static_cast<std::size_t>(j) * np + i] = w;
    }
  }

  std::vector<double> d(static_cast<std::size_t>(np) * np);
  if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, np));
  {
    std::atomic<int> next{0};
    auto work = [&]() {
      for (;;) {
        int src = next.fetch_add(1);
        if (src >= np) return;
        dijkstra_row_dense(dz.data(), np, src, d.data() + static_cast<std::size_t>(src) * np);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }
  // Symmetrize (per-source rounding can differ by ulps).
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j) {
      double m = std::min(d[static_cast<std::size_t>(i) * np + j],
                          d[static_cast<std::size_t>(j) * np + i]);
      d[static_cast<std::size_t>(i) * np + j] = m;
      d[static_cast<std::size_t>(j) * np + i] = m;
    }

  // Merge classes at 1e-9 and pick the smallest index as representative.
  constexpr double kMergeTol = 1e-9;
  std::vector<int> rep(np);
  std::iota(rep.begin(), rep.end(), 0);
  for (int i = 0; i < np; ++i) {
    if (rep[i] != i) continue;
    for (int j = i + 1; j < np; ++j)
      if (rep[j] == j && d[static_cast<std::size_t>(i) * np + j] <= kMergeTol) rep[j] = i;
  }
  std::vector<int> reps;
  std::vector<int> class_of(np, -1);
  for (int i = 0; i < np; ++i)
    if (rep[i] == i) {
      class_of[i] = static_cast<int>(reps.size());
      reps.push_back(i);
    }
  for (int i = 0; i < np; ++i)
    if (rep[i] != i) class_of[i] = class_of[rep[i]];

  const int m = static_cast<int>(reps.size());
  std::vector<double> dm(static_cast<std::size_t>(m) * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      dm[static_cast<std::size_t>(a) * m + b] = d[static_cast<std::size_t>(reps[a]) * np + reps[b]];

  // Lebesgue weights: 1/n per time index 0..n-1, folded onto classes
  // (index n lies in the class of index 0).
  std::vector<double> mass(m, 0.0);
  for (int i = 0; i < n; ++i) mass[class_of[i]] += 1.0 / n;

  int root = class_of[0];
  int anchor = class_of[z.argmin()];

  QuotientResult out{
      FiniteMetricSpace::from_trusted(std::move(dm), m, root, anchor, std::move(mass)),
      std::move(class_of)};
  return out;
}

}  // namespace confdim
