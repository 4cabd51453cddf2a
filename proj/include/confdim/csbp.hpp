#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "confdim/rng.hpp"

namespace confdim {

// Path of the 3/2-stable CSBP (branching mechanism psi(u) = sqrt(8/3) u^{3/2})
// on a uniform time grid. Values are absorbed at zero.
struct CSBPPath {
  double dt = 0.0;
  std::vector<double> values;  // values[k] = Y at time k*dt
  double lifetime = -1.0;      // exact absorption time, < 0 if not absorbed

  double at_time(double t) const;  // value at the grid point nearest to t
  bool absorbed() const { return lifetime >= 0.0; }
};

// u_t(lambda) = (lambda^{-1/2} + sqrt(2/3) t)^{-2}; the Laplace exponent flow
// E_y[e^{-lambda Y_t}] = e^{-y u_t(lambda)}.
double laplace_u(double t, double lambda);

// (cdf, pdf) of the lifetime zeta at time t, started from y:
// cdf = exp(-3y/(2t^2)), pdf = 3y t^{-3} exp(-3y/(2t^2)).
std::pair<double, double> lifetime_law(double y, double t);

// Exponential envelope for the bridge tail, P_y[Y_t > A (T-t)^2 | zeta = T]
//   <= 3^{3/2} exp(-A + 3(sqrt(3)-1) y (T-t) / T^3).
double bridge_tail_bound(double y, double T, double t, double A);

// One standard draw of the totally skewed 3/2-stable law used for the
// spectrally positive Levy increments (Chambers-Mallows-Stuck, beta = +1,
// Samorodnitsky-Taqqu scale 1).
double stable_increment_standard(Rng& rng);

struct CSBPSampleOptions {
  double absorb_threshold = 1e-4;  // splice the exact residual lifetime below this level
};

// Euler-Lamperti path of the CSBP started from y, absorbed at zero.
// Deterministic given the seed. dt must lie in (0, 1e-2].
CSBPPath sample_csbp(double y, double dt, double t_max, std::uint64_t seed,
                     const CSBPSampleOptions& opt = {});

// Rejection-sampled bridge: path conditioned on lifetime in [T, T+tol].
CSBPPath sample_csbp_bridge(double y, double T, double tol, double dt, std::uint64_t seed,
                            std::uint64_t max_attempts = 1u << 20);

// #{j : values[j] <= A * t[j]^2} for a strictly decreasing positive t grid.
int count_good_scales(const std::vector<double>& values, const std::vector<double>& t, double A);

// Monte Carlo diagnostic of the multi-scale count: hull-process surrogate
// obtained by time-reversing CSBP paths at extinction.
struct GoodScalesReport {
  double A = 0.0;
  double b = 0.0;
  int n_scales = 0;
  int n_seeds = 0;
  double fraction = 0.0;   // fraction of seeds with count >= b * n_scales
  double alpha_hat = 0.0;  // -log(1 - fraction)/n_scales, clipped
};
GoodScalesReport good_scales_diagnostic(double A, double b, double lambda, int n_scales,
                                        int n_seeds, double dt, std::uint64_t seed);

}  // namespace confdim
