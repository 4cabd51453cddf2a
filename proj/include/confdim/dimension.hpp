#pragma once

#include <string>
#include <vector>

#include "confdim/metric_space.hpp"
#include "confdim/weights.hpp"

namespace confdim {

struct FitReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double r_squared = 1.0;
  int n_points = 0;
  double range_lo = 0.0, range_hi = 0.0;
  std::string note;
};

// Least-squares slope of log N(r) against log(1/r) over a geometric radius
// grid; N from greedy separated sets. Fits with r^2 < 0.8 are refused.
FitReport box_dimension(const FiniteMetricSpace& space, double r_min, double r_max, int n_radii);
FitReport box_dimension(const UnitGraph& graph, double r_min, double r_max, int n_radii);

// Same estimator over an explicit matrix of pairwise distances (deformed
// boundary metrics).
FitReport box_dimension_matrix(const std::vector<double>& dist, int n, double r_min, double r_max,
                               int n_radii);

// Slope of log mass(B(center, r)) against log r; saturated and empty radii
// are dropped.
FitReport volume_growth_exponent(const FiniteMetricSpace& space, int center,
                                 const std::vector<double>& radii);
FitReport volume_growth_exponent(const UnitGraph& graph, int center,
                                 const std::vector<double>& radii);

struct CriticalExponentReport {
  double p_star = 0.0;
  bool found = false;
  std::vector<double> p_grid;
  std::vector<double> slope;     // d log sum_) pi^p / dn
  std::vector<double> slope_se;
  FitReport fit_at_p_star;
};

// For each p, the slope of log sum_{u in V_n} pi(u)^p against n (log-sum-exp
// form); p* is the smallest grid p whose slope is negative at 2-SE confidence.
CriticalExponentReport critical_exponent(const std::vector<std::vector<double>>& log_pi_by_level,
                                         const std::vector<double>& p_grid);

// Box dimension of the deformed boundary metric.
FitReport deformed_dimension(const BoundaryMetric& bm, int n_radii = 10);

// Shared least-squares helper: slope of y against x with SE and r^2.
FitReport fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Geometric radius window trimmed 15% at both ends of the log range.
std::pair<double, double> auto_radius_window(double lo, double hi);

}  // namespace confdim
