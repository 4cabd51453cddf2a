#pragma once

#include <cstdint>
#include <vector>

#include "confdim/metric_space.hpp"

namespace confdim {

// Discretized normalized Brownian excursion: values at times i/n, endpoints 0.
struct ExcursionPath {
  int n_steps = 0;
  std::vector<double> values;  // size n_steps + 1
};

// Labels of the Brownian snake head along the excursion; Z_0 = 0 and,
// conditionally on X, Cov(Z_s, Z_t) = inf X over [s, t].
struct SnakeLabels {
  std::vector<double> values;  // size n_steps + 1
  int argmin() const;
  double min() const;
};

enum class SnakeBackend {
  Dense,  // exact factorization of the covariance matrix, n <= 4000
  Tree,   // sequential branch sampling along the contour, O(n)
};

// Random-walk bridge plus Vervaat rotation; deterministic given the seed.
ExcursionPath sample_excursion(int n, std::uint64_t seed);

SnakeLabels sample_snake(const ExcursionPath& x, std::uint64_t seed,
                         SnakeBackend backend = SnakeBackend::Tree);

// Precomputed minima for O(1) D-circ queries.
class DzeroTable {
public:
  DzeroTable(const ExcursionPath& x, const SnakeLabels& z);
  int n() const { return n_; }
  // D0(i,j) = Z_i + Z_j - 2 max(min Z on [i,j], min Z on [0,i] u [j,n])
  double operator()(int i, int j) const;

private:
  int n_ = 0;
  std::vector<double> z_;
  std::vector<double> pref_, suf_;
  std::vector<std::vector<double>> rmq_;
  double range_min(int i, int j) const;
};

double dzero(const ExcursionPath& x, const SnakeLabels& z, int i, int j);

// Quotient by the maximal pseudometric below D-circ: all-pairs shortest path
// over the complete graph with D-circ edge weights, classes merged at 1e-9.
struct QuotientResult {
  FiniteMetricSpace space;
  std::vector<int> class_of;  // time index -> point index in `space`
};

QuotientResult quotient_metric(const ExcursionPath& x, const SnakeLabels& z, int n_threads = 0);

// Single-source distances in the quotient pseudometric from time index src,
// by Dijkstra over the complete D-circ graph (used by the pipeline) .
std::vector<double> quotient_from_source(const DzeroTable& table, int src);

// Independent oracle for the same quantity: repeated relaxation sweeps until
// a fixed point (Bellman-Ford style); kept free of the Dijkstra code path.
std::vector<double> quotient_from_source_oracle(const DzeroTable& table, int src);

}  // namespace confdim
