#include "confdim/csbp.hpp"

#include <algorithm>
#include <cmath>

#include "confdim/errors.hpp"

namespace confdim {

namespace {
constexpr double kPi = 3.14159265358979323846;
// psi(u) = c u^{3/2} with c = sqrt(8/3); an increment of the Levy process over
// time s is sigma(s) * S with S the standard CMS draw and
// sigma(s) = (2 s / sqrt(3))^{2/3}   (from sqrt(2) sigma^{3/2} = s c).
double stable_scale(double s) { return std::pow(2.0 * s / std::sqrt(3.0), 2.0 / 3.0); }
}  // namespace

double CSBPPath::at_time(double t) const {
  if (values.empty()) return 0.0;
  auto k = static_cast<std::size_t>(std::llround(t / dt));
  if (k >= values.size()) return values.back();
  return values[k];
}

double laplace_u(double t, double lambda) {
  if (!(lambda > 0.0)) throw NonpositiveLambda("lambda must be positive");
  if (t < 0.0) throw ParameterOutOfRange("t must be >= 0");
  double base = 1.0 / std::sqrt(lambda) + std::sqrt(2.0 / 3.0) * t;
  return 1.0 / (base * base);
}

std::pair<double, double> lifetime_law(double y, double t) {
  if (!(y > 0.0) || !(t > 0.0)) throw NonpositiveInput("y and t must be positive");
  double cdf = std::exp(-1.5 * y / (t * t));
  double pdf = 3.0 * y * std::pow(t, -3.0) * cdf;
  return {cdf, pdf};
}

double bridge_tail_bound(double y, double T, double t, double A) {
  if (!(y > 0.0) || !(T > 0.0) || !(A > 0.0) || !(t > 0.0) || !(t < T))
    throw ParameterOutOfRange("need y,A > 0 and 0 < t < T");
  return std::pow(3.0, 1.5) * std::exp(-A + 3.0 * (std::sqrt(3.0) - 1.0) * y * (T - t) / (T * T * T));
}

double stable_increment_standard(Rng& rng) {
  // Chambers-Mallows-Stuck for alpha = 3/2, beta = +1:
  //   B = atan(beta tan(pi alpha/2))/alpha = -pi/6,  S = 2^{1/3}.
  constexpr double alpha = 1.5;
  constexpr double B = -kPi / 6.0;
  const double S = std::cbrt(2.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double V = (unif(rng) - 0.5) * kPi;  // uniform on (-pi/2, pi/2)
  double W = -std::log1p(-unif(rng)); // Exp(1)
  double x = S * std::sin(alpha * (V + B)) / std::pow(std::cos(V), 1.0 / alpha) *
             std::pow(std::cos(V - alpha * (V + B)) / W, (1.0 - alpha) / alpha);
  return x;
}

namespace {

// Exact residual lifetime from level y: P[tau <= s] = exp(-3y/(2 s^2)).
double residual_lifetime(double y, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u <= 0.0) u = unif(rng);
  return std::sqrt(1.5 * y / (-std::log(u)));
}

}  // namespace

CSBPPath sample_csbp(double y, double dt, double t_max, std::uint64_t seed,
                     const CSBPSampleOptions& opt) {
  if (!(y > 0.0)) throw NonpositiveInput("y must be positive");
  if (!(dt > 0.0) || dt > 1e-2) throw ParameterOutOfRange("dt must lie in (0, 1e-2]");
  if (!(t_max > 0.0)) throw ParameterOutOfRange("t_max must be positive");

  Rng rng = make_rng(seed);
  CSBPPath path;
  path.dt = dt;
  auto steps = static_cast<std::size_t>(std::ceil(t_max / dt));
  path.values.reserve(steps + 1);
  path.values.push_back(y);

  double cur = y;
  for (std::size_t k = 0; k < steps; ++k) {
    if (cur <= 0.0) {
      path.values.push_back(0.0);
      continue;
    }
    if (cur <= opt.absorb_threshold) {
      // Below the threshold the Euler steps crawl; splice the exact residual
      // lifetime instead and zero the remaining grid.
      path.lifetime = k * dt + residual_lifetime(cur, rng);
      cur = 0.0;
      path.values.push_back(0.0);
      continue;
    }
    double inc = stable_scale(cur * dt) * stable_increment_standard(rng);
    cur += inc;
    if (cur <= opt.absorb_threshold) {
      double level = std::max(cur, 0.0);
      path.lifetime = (k + 1) * dt + (level > 0.0 ? residual_lifetime(level, rng) : 0.0);
      cur = 0.0;
    }
    path.values.push_back(std::max(cur, 0.0));
  }
  return path;
}

CSBPPath sample_csbp_bridge(double y, double T, double tol, double dt, std::uint64_t seed,
                            std::uint64_t max_attempts) {
  if (!(tol > 0.0)) throw ParameterOutOfRange("tol must be positive");
  if (!(T > 0.0)) throw ParameterOutOfRange("T must be positive");
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    CSBPPath p = sample_csbp(y, dt, T + tol, derive_seed(seed, attempt));
    if (p.absorbed() && p.lifetime >= T && p.lifetime <= T + tol) return p;
  }
  throw RejectionBudgetExceeded("no bridge accepted in " + std::to_string(max_attempts) +
                                " attempts");
}

int count_good_scales(const std::vector<double>& values, const std::vector<double>& t, double A) {
  if (values.size() != t.size()) throw BadConfig("values/t size mismatch");
  for (std::size_t j = 0; j + 1 < t.size(); ++j)
    if (!(t[j] > t[j + 1]) || !(t[j + 1] > 0.0))
      throw NotDecreasing("t grid must be strictly decreasing and positive");
  if (!t.empty() && !(t.back() > 0.0)) throw NotDecreasing("t grid must be positive");
  int c = 0;
  for (std::size_t j = 0; j < t.size(); ++j)
    if (values[j] <= A * t[j] * t[j]) ++c;
  return c;
}

GoodScalesReport good_scales_diagnostic(double A, double b, double lambda, int n_scales,
                                        int n_seeds, double dt, std::uint64_t seed) {
  if (!(lambda > 0.0) || lambda >= 1.0) throw ParameterOutOfRange("lambda must lie in (0,1)");
  GoodScalesReport rep;
  rep.A = A;
  rep.b = b;
  rep.n_scales = n_scales;
  rep.n_seeds = n_seeds;
  int hits = 0;
  for (int s = 0; s < n_seeds; ++s) {
    // Hull-process surrogate: run the CSBP from 1 to extinction and reverse
    // time at the extinction point.
    CSBPPath p = sample_csbp(1.0, dt, 64.0, derive_seed(seed, s));
    if (!p.absorbed()) {
      continue;  // extremely long path; count as a miss
    }
    double t1 = p.lifetime / 2.0;
    std::vector<double> grid, vals;
    double t = t1;
    for (int j = 0; j < n_scales; ++j) {
      grid.push_back(t);
      double rev = p.lifetime - t;  // hull time t = CSBP time lifetime - t
      vals.push_back(p.at_time(rev));
      t *= lambda;
    }
    if (count_good_scales(vals, grid, A) >= static_cast<int>(std::ceil(b * n_scales))) ++hits;
  }
  rep.fraction = n_seeds > 0 ? static_cast<double>(hits) / n_seeds : 0.0;
  double miss = std::max(1.0 - rep.fraction, 1e-12);
  rep.alpha_hat = -std::log(miss) / std::max(n_scales, 1);
  return rep;
}

}  // namespace confdim
