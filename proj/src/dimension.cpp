#include "confdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "confdim/errors.hpp"

namespace confdim {

FitReport fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw DegenerateRange("need at least two points to fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw DegenerateRange("degenerate abscissa");
  FitReport rep;
  rep.n_points = n;
  rep.estimate = (n * sxy - sx * sy) / denom;
  double intercept = (sy - rep.estimate * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0, ymean = sy / n;
  for (int i = 0; i < n; ++i) {
    double e = y[i] - (intercept + rep.estimate * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - ymean) * (y[i] - ymean);
  }
  rep.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (n > 2) rep.std_error = std::sqrt(ss_res / (n - 2) / (sxx - sx * sx / n));
  rep.range_lo = *std::min_element(x.begin(), x.end());
  rep.range_hi = *std::max_element(x.begin(), x.end());
  return rep;
}

std::pair<double, double> auto_radius_window(double lo, double hi) {
  double llo = std::log(lo), lhi = std::log(hi);
  double span = lhi - llo;
  return {std::exp(llo + 0.15 * span), std::exp(lhi - 0.15 * span)};
}

namespace {

template <typename CountFn>
FitReport box_dim_impl(CountFn count, double r_min, double r_max, int n_radii) {
  if (!(r_min > 0.0) || !(r_max > r_min)) throw DegenerateRange("need 0 < r_min < r_max");
  if (n_radii < 4) throw DegenerateRange("need at least 4 radii");
  std::vector<double> xs, ys;
  for (int k = 0; k < n_radii; ++k) {
    double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (n_radii - 1));
    double cnt = static_cast<double>(count(r));
    xs.push_back(std::log(1.0 / r));
    ys.push_back(std::log(cnt));
  }
  // A fully flat count profile is a legitimate zero-dimensional answer.
  bool flat = std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys[0]; });
  FitReport rep = fit_line(xs, ys);
  if (!flat && rep.r_squared < 0.8)
    throw DegenerateRange("box-dimension fit rejected: r^2 = " + std::to_string(rep.r_squared));
  return rep;
}

}  // namespace

FitReport box_dimension(const FiniteMetricSpace& space, double r_min, double r_max, int n_radii) {
  return box_dim_impl([&](double r) { return space.covering_number(r); }, r_min, r_max, n_radii);
}

FitReport box_dimension(const UnitGraph& graph, double r_min, double r_max, int n_radii) {
  return box_dim_impl([&](double r) { return graph.covering_number(r); }, r_min, r_max, n_radii);
}

FitReport box_dimension_matrix(const std::vector<double>& dist, int n, double r_min, double r_max,
                               int n_radii) {
  auto count = [&](double r) {
    std::vector<int> chosen;
    for (int i = 0; i < n; ++i) {
      bool ok = true;
      for (int c : chosen)
        if (dist[static_cast<std::size_t>(i) * n + c] < r) {
          ok = false;
          break;
        }
      if (ok) chosen.push_back(i);
    }
    return chosen.size();
  };
  return box_dim_impl(count, r_min, r_max, n_radii);
}

namespace {

FitReport volume_impl(const std::vector<std::pair<double, double>>& rm, double total) {
  std::vector<double> xs, ys;
  for (auto [r, m] : rm) {
    if (m <= 0.0 || m >= total) continue;  // empty or saturated
    xs.push_back(std::log(r));
    ys.push_back(std::log(m));
  }
  if (xs.size() < 2) throw DegenerateRange("all radii empty or saturated");
  FitReport rep = fit_line(xs, ys);
  if (rep.r_squared < 0.8)
    throw DegenerateRange("volume fit rejected: r^2 = " + std::to_string(rep.r_squared));
  return rep;
}

}  // namespace

FitReport volume_growth_exponent(const FiniteMetricSpace& space, int center,
                                 const std::vector<double>& radii) {
  if (!space.has_mass()) throw MissingMass("volume growth needs masses");
  std::vector<std::pair<double, double>> rm;
  for (double r : radii) {
    double m = 0.0;
    for (int p : space.ball(center, r)) m += space.mass(p);
    rm.emplace_back(r, m);
  }
  return volume_impl(rm, space.total_mass());
}

FitReport volume_growth_exponent(const UnitGraph& graph, int center,
                                 const std::vector<double>& radii) {
  std::vector<std::pair<double, double>> rm;
  for (double r : radii)
    rm.emplace_back(r, static_cast<double>(graph.ball_size(center, r)));
  return volume_impl(rm, static_cast<double>(graph.n()));
}

CriticalExponentReport critical_exponent(const std::vector<std::vector<double>>& log_pi_by_level,
                                         const std::vector<double>& p_grid) {
  const int L = static_cast<int>(log_pi_by_level.size());
  if (L < 3) throw TooFewLevels("need at least 3 levels of pi values");
  for (std::size_t i = 1; i < p_grid.size(); ++i)
    if (!(p_grid[i] > p_grid[i - 1])) throw BadConfig("p grid must increase");

  CriticalExponentReport rep;
  rep.p_grid = p_grid;
  for (double p : p_grid) {
    std::vector<double> xs, ys;
    for (int n = 0; n < L; ++n) {
      const auto& lp = log_pi_by_level[n];
      if (lp.empty()) continue;
      double mx = -std::numeric_limits<double>::infinity();
      for (double v : lp) mx = std::max(mx, p * v);
      double s = 0.0;
      for (double v : lp) s += std::exp(p * v - mx);
      xs.push_back(static_cast<double>(n));
      ys.push_back(mx + std::log(s));
    }
    FitReport fit = fit_line(xs, ys);
    rep.slope.push_back(fit.estimate);
    rep.slope_se.push_back(fit.std_error);
    if (!rep.found && fit.estimate < 0.0 && fit.estimate + 2.0 * fit.std_error < 0.0) {
      rep.found = true;
      rep.p_star = p;
      rep.fit_at_p_star = fit;
    }
  }
  if (!rep.found) rep.p_star = p_grid.empty() ? 0.0 : p_grid.back();
  return rep;
}

FitReport deformed_dimension(const BoundaryMetric& bm, int n_radii) {
  const int k = static_cast<int>(bm.points.size());
  if (k < 2) throw DegenerateRange("boundary metric too small");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      double v = bm.value(a, b);
      if (v > 0.0) lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) throw DegenerateRange("flat boundary metric");
  auto [rlo, rhi] = auto_radius_window(lo, hi);
  return box_dimension_matrix(bm.values, k, rlo, rhi, n_radii);
}

}  // namespace confdim
