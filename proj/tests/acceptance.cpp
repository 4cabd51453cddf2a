// Acceptance suite: one pass/fail line per criterion. Exit code = number of
// failed criteria.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "confdim/csbp.hpp"
#include "confdim/dimension.hpp"
#include "confdim/errors.hpp"
#include "confdim/excursion.hpp"
#include "confdim/grid_modulus.hpp"
#include "confdim/pipeline.hpp"
#include "confdim/rng.hpp"
#include "confdim/weights.hpp"

using namespace confdim;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

struct MeanSE {
  double mean = 0.0, se = 0.0;
};

// Threaded Monte Carlo mean of f(path) over CSBP paths from y.
template <typename F>
MeanSE mc_csbp(double y, double dt, double t_max, int n_paths, std::uint64_t seed, F f) {
  const int workers = 2;
  std::vector<double> sums(workers, 0.0), sums2(workers, 0.0);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      double s = 0.0, s2 = 0.0;
      for (int k = w; k < n_paths; k += workers) {
        CSBPPath p = sample_csbp(y, dt, t_max, derive_seed(seed, k));
        double v = f(p);
        s += v;
        s2 += v * v;
      }
      sums[w] = s;
      sums2[w] = s2;
    });
  for (auto& th : pool) th.join();
  double sum = sums[0] + sums[1], sum2 = sums2[0] + sums2[1];
  MeanSE out;
  out.mean = sum / n_paths;
  out.se = std::sqrt(std::max(sum2 / n_paths - out.mean * out.mean, 0.0) / n_paths);
  return out;
}

void criterion_1_laplace() {
  double t_start = now_s();
  const int N = 100000;
  bool pass = true;
  std::string detail;
  // one path family per t; all lambdas evaluated on it
  for (double t : {0.25, 0.5, 1.0}) {
    for (double lam : {0.5, 1.0, 2.0}) {
      auto ms = mc_csbp(1.0, 1e-3, t, N, 101 + static_cast<int>(t * 100),
                        [&](const CSBPPath& p) { return std::exp(-lam * p.at_time(t)); });
      double target = std::exp(-1.0 * laplace_u(t, lam));
      double err = std::abs(ms.mean - target);
      double tol = 4.0 * ms.se + 0.01;
      if (err > tol) {
        pass = false;
        detail += " (t=" + std::to_string(t) + ",lam=" + std::to_string(lam) + " err=" +
                  std::to_string(err) + ">" + std::to_string(tol) + ")";
      }
    }
  }
  double elapsed = now_s() - t_start;
  if (elapsed > 120.0) {
    pass = false;
    detail += " overtime";
  }
  report(1, pass,
         "CSBP Laplace transform, 9 cells at 1e5 paths, |err| <= 4SE+0.01, " +
             std::to_string(elapsed).substr(0, 5) + "s" + detail);
}

void criterion_2_lifetime() {
  const int N = 100000;
  auto ms = mc_csbp(1.5, 1e-3, 1.0, N, 202, [](const CSBPPath& p) {
    return (p.absorbed() && p.lifetime <= 1.0) ? 1.0 : 0.0;
  });
  double target = lifetime_law(1.5, 1.0).first;
  bool pass = std::abs(ms.mean - target) <= 0.01;
  report(2, pass,
         "CSBP lifetime cdf at (y,t)=(1.5,1): " + std::to_string(ms.mean) + " vs " +
             std::to_string(target) + " within 0.01");
}

void criterion_3_bridge() {
  const double y = 1.0, T = 1.0, tol = T / 100.0, dt = 5e-3;
  const int want = 10000;
  std::atomic<long> attempt{0};
  std::vector<CSBPPath> accepted;
  std::mutex mu;
  const int workers = 2;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        {
          std::lock_guard<std::mutex> lk(mu);
          if (static_cast<int>(accepted.size()) >= want) return;
        }
        long k = attempt.fetch_add(1);
        if (k > 20'000'000) return;
        CSBPPath p = sample_csbp(y, dt, T + tol, derive_seed(303, k));
        if (p.absorbed() && p.lifetime >= T && p.lifetime <= T + tol) {
          std::lock_guard<std::mutex> lk(mu);
          if (static_cast<int>(accepted.size()) < want) accepted.push_back(std::move(p));
        }
      }
    });
  for (auto& th : pool) th.join();

  bool pass = static_cast<int>(accepted.size()) >= want;
  std::string detail = std::to_string(accepted.size()) + " bridges";
  for (auto [t, A] : {std::pair{0.5, 6.0}, std::pair{0.9, 4.0}}) {
    int exceed = 0;
    for (const auto& p : accepted)
      if (p.at_time(t) > A * (T - t) * (T - t)) ++exceed;
    double phat = static_cast<double>(exceed) / accepted.size();
    double se = std::sqrt(phat * (1 - phat) / accepted.size());
    double bound = bridge_tail_bound(y, T, t, A);
    bool ok = phat <= bound + 4.0 * se;
    pass = pass && ok;
    detail += " | (t=" + std::to_string(t).substr(0, 3) + ",A=" + std::to_string(A).substr(0, 1) +
              "): " + std::to_string(phat) + " <= " + std::to_string(bound) + "+4SE";
  }
  report(3, pass, "bridge tail vs closed-form envelope: " + detail);
}

void criterion_4_quotient_identity() {
  double t_start = now_s();
  bool pass = true;
  std::string detail;
  for (int seed = 0; seed < 20; ++seed) {
    auto x = sample_excursion(1500, derive_seed(404, seed));
    auto z = sample_snake(x, derive_seed(405, seed), SnakeBackend::Tree);
    DzeroTable table(x, z);
    int star = z.argmin();
    auto fast = quotient_from_source(table, star);
    auto oracle = quotient_from_source_oracle(table, star);
    double zmin = z.min();
    double worst = 0.0;
    for (int i = 0; i <= 1500; ++i) {
      worst = std::max(worst, std::abs(fast[i] - (z.values[i] - zmin)));
      worst = std::max(worst, std::abs(fast[i] - oracle[i]));
    }
    if (worst > 1e-9) {
      pass = false;
      detail += " seed " + std::to_string(seed) + " worst " + std::to_string(worst);
    }
  }
  double elapsed = now_s() - t_start;
  if (elapsed > 300.0) {
    pass = false;
    detail += " overtime";
  }
  report(4, pass,
         "quotient identity D(argmin Z, t) = Z_t - min Z on 20 snake instances (n=1500), " +
             std::to_string(elapsed).substr(0, 5) + "s" + detail);
}

struct BuiltFilling {
  // the instance lives behind a stable pointer: the filling refers into it
  std::unique_ptr<SampledInstance> inst;
  PipelineConfig cfg;
  std::unique_ptr<FillingGraph> filling;
  WeightState weights;
  MarginReport margins;
};

BuiltFilling build_one(const PipelineConfig& cfg) {
  BuiltFilling b;
  b.cfg = cfg;
  b.inst = std::make_unique<SampledInstance>(sample_instance(cfg));
  auto nets = build_nets(b.inst->space, cfg.alpha, cfg.n_max,
                         NetOrdering::Identity, derive_seed(cfg.seed, 31));
  b.filling = std::make_unique<FillingGraph>(build_filling(b.inst->space, nets));
  EmbeddingRef emb = b.inst->embedding_ref();
  b.weights = default_sigma(*b.filling, emb, cfg.eta, cfg.zeta, cfg.effective_strategy());
  b.margins = repair_sigma(*b.filling, b.weights);
  compute_nu_mu(*b.filling, b.weights);
  choose_parents(*b.filling, b.weights);
  regularize_pi(*b.filling, b.weights);
  return b;
}

void criteria_5_to_8_fillings() {
  std::vector<BuiltFilling> built;
  bool built_ok = true;
  std::string build_err;
  for (int k = 0; k < 14; ++k) {
    PipelineConfig cfg;
    cfg.source = "snake";
    cfg.n = 400;
    cfg.n_max = 4;
    cfg.seed = 1000 + k;
    if (k >= 10) cfg.strategy = "metric_only_with_event";
    try {
      built.push_back(build_one(cfg));
    } catch (const Error& e) {
      built_ok = false;
      build_err = e.what();
    }
  }
  for (int k = 0; k < 6; ++k) {
    PipelineConfig cfg;
    cfg.source = "quad";
    cfg.faces = 1500;
    cfg.subsample = 350;
    cfg.n_max = 4;
    cfg.seed = 2000 + k;
    try {
      built.push_back(build_one(cfg));
    } catch (const Error& e) {
      built_ok = false;
      build_err = e.what();
    }
  }

  // 5: regularization postconditions and the no-domination-chain property are asserted
  // inside regularize_pi; reaching here with 20 fillings means zero violations.
  report(5, built_ok && built.size() == 20,
         "pi-regularization postconditions and no-domination-chain on 20 fillings (14 snake + "
         "6 quad)" +
             (built_ok ? "" : ": " + build_err));

  // 6: H1/H2 exact scans.
  bool h_ok = built_ok;
  long h1 = 0, h2 = 0;
  for (auto& b : built) {
    try {
      auto rep = check_H_axioms(*b.filling, b.weights, 400, b.cfg.seed);
      h1 += rep.h1_violations;
      h2 += rep.h2_violations;
      if (rep.max_log_pi_minus_bound > 1e-9) h_ok = false;
    } catch (const Error&) {
      h_ok = false;
    }
  }
  report(6, h_ok && h1 == 0 && h2 == 0,
         "H1/H2 (rho in [eta,1-eta], pi ratios in [eta^2,eta^-2]): " + std::to_string(h1) + "+" +
             std::to_string(h2) + " violations, pi <= (1-eta)^n");

  // 7: repaired margins >= 1 - 1e-12 by the node-weighted shortest-path oracle.
  bool m_ok = built_ok;
  double worst_margin = 1e300;
  for (auto& b : built)
    for (int n = 1; n < b.filling->n_levels(); ++n)
      for (int q = 0; q < b.filling->level_size(n - 1); ++q) {
        double m = admissibility_margin(*b.filling, b.weights.sigma, n - 1, q);
        worst_margin = std::min(worst_margin, m);
        if (m < 1.0 - 1e-12) m_ok = false;
      }
  report(7, m_ok,
         "admissibility margins after repair >= 1 - 1e-12 (worst " +
             std::to_string(std::min(worst_margin, 9.0)) + ")");

  // 8: pi <= varpi with the lower-bounded modulus, on the embedded instances.
  bool v_ok = built_ok;
  int nontrivial = 0, checked = 0;
  double worst_excess = -1e300;
  for (auto& b : built) {
    if (!b.inst->embedding) continue;
    try {
      auto rep = varsigma_varpi(*b.filling, b.inst->embedding_ref(), b.weights);
      ++checked;
      nontrivial += rep.nontrivial;
      worst_excess = std::max(worst_excess, rep.max_log_excess);
      if (!rep.pi_bounded) v_ok = false;
    } catch (const Error&) {
      v_ok = false;
    }
  }
  report(8, v_ok && checked > 0,
         "pi(u) <= varpi(u) in log space (1e-12) on " + std::to_string(checked) +
             " embedded fillings; max log excess " + std::to_string(worst_excess) +
             " (varsigma < 1 at " + std::to_string(nontrivial) + " vertices)");
}

void criterion_9_modulus() {
  bool pass = true;
  std::string detail;
  for (double ratio : {2.0, 4.0, 10.0}) {
    double r1 = 60.0;
    GridAnnulus g = GridAnnulus::round(r1, r1 * ratio);
    ModulusReport m = grid_modulus(g, 1e-8);
    double target = std::log(ratio) / (2.0 * M_PI);
    auto [mr1, mr2] = g.measured_radii();
    auto [lo, hi] = teichmuller_bounds(m.modulus);
    bool ok = std::abs(m.modulus - target) <= 0.05 * target && lo <= mr2 / mr1 &&
              mr2 / mr1 <= hi * 1.05;
    pass = pass && ok;
    detail += " ratio " + std::to_string(ratio).substr(0, 4) + ": m=" +
              std::to_string(m.modulus).substr(0, 6) + "/" + std::to_string(target).substr(0, 6) +
              (ok ? "" : " BAD");
  }
  report(9, pass, "grid modulus within 5% and Teichmuller sandwich on round annuli:" + detail);
}

// shared between criteria 10 and 11
struct QuadRun {
  double box_estimate = 0.0;
  double volume_estimate = 0.0;
};

QuadRun criterion_10_raw_dimension() {
  double t_start = now_s();
  QuadRun run;
  bool pass = true;
  std::string detail;
  // The per-instance estimate fluctuates by about +-0.16 at this size, so the
  // criterion averages six independent 5e4-face instances (seeds pinned).
  double box_acc = 0.0, vol_acc = 0.0;
  int box_n = 0, vol_n = 0;
  for (unsigned seed = 777; seed < 783; ++seed) {
    QuadMap map = sample_quadrangulation(50000, seed);
    UnitGraph g = map.skeleton();
    int ecc = g.eccentricity(map.root_vertex());
    try {
      // bulk window: below ~10 the counts see bipartite lattice structure,
      // above ~0.45 ecc the annuli saturate
      auto box = box_dimension(g, 10.0, 0.45 * ecc, 8);
      box_acc += box.estimate;
      ++box_n;
    } catch (const Error& e) {
      pass = false;
      detail += std::string(" box fit failed: ") + e.what();
    }
    try {
      std::vector<double> radii;
      for (double r = 3.0; r <= 0.35 * ecc; r *= 1.3) radii.push_back(r);
      Rng rng = make_rng(seed * 3 + 1);
      std::uniform_int_distribution<int> pick(0, g.n() - 1);
      for (int k = 0; k < 10; ++k) {
        auto fit = volume_growth_exponent(g, pick(rng), radii);
        vol_acc += fit.estimate;
        ++vol_n;
      }
    } catch (const Error& e) {
      pass = false;
      detail += std::string(" volume fit failed: ") + e.what();
    }
  }
  run.box_estimate = box_n ? box_acc / box_n : 0.0;
  run.volume_estimate = vol_n ? vol_acc / vol_n : 0.0;
  pass = pass && run.box_estimate >= 3.2 && run.box_estimate <= 4.8 &&
         run.volume_estimate >= 3.2 && run.volume_estimate <= 4.8;
  double elapsed = now_s() - t_start;
  if (elapsed > 600.0) {
    pass = false;
    detail += " overtime";
  }
  report(10, pass,
         "raw dimension of 5e4-face quadrangulations in [3.2, 4.8]: box=" +
             std::to_string(run.box_estimate).substr(0, 5) + " volume=" +
             std::to_string(run.volume_estimate).substr(0, 5) + " (6-instance means), " +
             std::to_string(elapsed).substr(0, 5) + "s" + detail);
  return run;
}

void criterion_11_deformation(const QuadRun& run) {
  bool pass = true;
  std::string detail;
  try {
    PipelineConfig cfg;
    cfg.source = "quad";
    cfg.faces = 50000;
    cfg.subsample = 1500;
    cfg.n_max = 5;
    cfg.seed = 777;

    SampledInstance inst = sample_instance(cfg);
    PipelineResult res = run_pipeline(inst, cfg);

    // n_max = 3 is the truncation of the same build (every stage is
    // level-local), n_max = 5 the full set; level 0 is the constant root.
    auto levels = log_pi_by_level(res.filling, res.weights);
    std::vector<double> p_grid;
    for (double p = 0.25; p <= 8.0; p += 0.25) p_grid.push_back(p);
    auto ce3 = critical_exponent({levels.begin() + 1, levels.begin() + 4}, p_grid);
    const auto& ce5 = res.critexp;

    double raw = run.box_estimate;
    bool a = ce5.found && ce5.p_star <= raw - 0.5;
    bool b = ce5.p_star <= ce3.p_star + 1e-12;
    pass = a && b;
    detail = "p*(n_max=5)=" + std::to_string(ce5.p_star) + " p*(3)=" + std::to_string(ce3.p_star) +
             (ce3.found ? "" : " (no decay confirmed at 3 levels)") +
             " raw-0.5=" + std::to_string(raw - 0.5) +
             (res.embedding_degenerate ? " [embedding degenerate -> metric_only]" : "");
  } catch (const Error& e) {
    pass = false;
    detail = e.what();
  }
  report(11, pass, "deformation: p* <= raw - 0.5 and nonincreasing in n_max: " + detail);
}

void criterion_12_determinism() {
  PipelineConfig cfg;
  cfg.source = "snake";
  cfg.n = 200;
  cfg.n_max = 3;
  cfg.seed = 31337;
  cfg.workers = 1;
  auto i1 = sample_instance(cfg);
  auto r1 = run_pipeline(i1, cfg);
  PipelineConfig cfg2 = cfg;
  cfg2.workers = 2;
  auto i2 = sample_instance(cfg2);
  auto r2 = run_pipeline(i2, cfg2);
  bool pass = i1.space.raw() == i2.space.raw() && r1.weights.log_pi == r2.weights.log_pi &&
              r1.verify_json().dump() == r2.verify_json().dump() &&
              r1.dims_json().dump() == r2.dims_json().dump();
  report(12, pass, "pipeline bit-reproducible under fixed seeds and any worker count");
}

}  // namespace

int main() {
  std::printf("acceptance suite (tolerances pinned in code)\n");
  criterion_1_laplace();
  criterion_2_lifetime();
  criterion_3_bridge();
  criterion_4_quotient_identity();
  criteria_5_to_8_fillings();
  criterion_9_modulus();
  QuadRun run = criterion_10_raw_dimension();
  criterion_11_deformation(run);
  criterion_12_determinism();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
