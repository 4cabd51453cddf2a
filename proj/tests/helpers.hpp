#pragma once

#include <cmath>
#include <vector>

#include "confdim/metric_space.hpp"

namespace confdim::testing {

// Path graph P_n with unit edges, as a dense metric.
inline FiniteMetricSpace path_space(int n, int root = 0, int anchor = -1) {
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(i) * n + j] = std::abs(i - j);
  return FiniteMetricSpace::build(std::move(d), n, root,
                                  anchor >= 0 ? std::optional<int>(anchor) : std::nullopt);
}

// Cycle C_n with unit edges.
inline FiniteMetricSpace cycle_space(int n, int root = 0, int anchor = -1) {
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int k = std::abs(i - j);
      d[static_cast<std::size_t>(i) * n + j] = std::min(k, n - k);
    }
  return FiniteMetricSpace::build(std::move(d), n, root,
                                  anchor >= 0 ? std::optional<int>(anchor) : std::nullopt);
}

// k x k unit-square grid of points with the Euclidean metric and uniform mass.
inline FiniteMetricSpace grid_space(int k, bool with_mass = false) {
  const int n = k * k;
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  auto xy = [&](int i) { return std::pair<double, double>{(i % k) / double(k - 1), (i / k) / double(k - 1)}; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto [xi, yi] = xy(i);
      auto [xj, yj] = xy(j);
      d[static_cast<std::size_t>(i) * n + j] = std::hypot(xi - xj, yi - yj);
    }
  std::optional<std::vector<double>> mass;
  if (with_mass) mass = std::vector<double>(n, 1.0 / n);
  return FiniteMetricSpace::build(std::move(d), n, 0, std::nullopt, std::move(mass), std::nullopt,
                                  /*check_triangle=*/n <= 400);
}

// Points on a segment [0, 1], equally spaced.
inline FiniteMetricSpace segment_space(int n) {
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d[static_cast<std::size_t>(i) * n + j] = std::abs(i - j) / double(n - 1);
  return FiniteMetricSpace::build(std::move(d), n, 0);
}

// Metric from explicit coordinates in the plane. Euclidean distances are
// exact, so the cubic triangle scan is only run on small fixtures.
inline FiniteMetricSpace points_space(const std::vector<std::pair<double, double>>& pts,
                                      int root = 0, int anchor = -1) {
  const int n = static_cast<int>(pts.size());
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d[static_cast<std::size_t>(i) * n + j] =
          std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  return FiniteMetricSpace::build(std::move(d), n, root,
                                  anchor >= 0 ? std::optional<int>(anchor) : std::nullopt,
                                  std::nullopt, std::nullopt, /*check_triangle=*/n <= 300);
}

}  // namespace confdim::testing
