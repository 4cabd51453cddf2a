#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confdim/embedding.hpp"
#include "confdim/filling.hpp"

namespace confdim {

// Embedding handle used by the sigma / varsigma computations: positions come
// from a drawn QuadMap whose vertices are linked to space points.
struct EmbeddingRef {
  const PlanarEmbedding* embedding = nullptr;
  const std::vector<int>* vertex_of_point = nullptr;  // space point -> map vertex
  bool valid() const { return embedding && vertex_of_point; }
};

enum class SigmaStrategy { Ratio, RatioWithEvent, MetricOnly, MetricOnlyWithEvent };

std::string to_string(SigmaStrategy s);
SigmaStrategy sigma_strategy_from_string(const std::string& s);

// Per-vertex weight data over a FillingGraph, flat-indexed. Probabilities are
// carried in log space so that eta as small as alpha^100 stays representable.
struct WeightState {
  double eta = 0.01;
  double zeta = 0.1;

  std::vector<double> sigma;          // weight function (repaired in place)
  std::vector<char> event_checked;    // F proxy evaluated for this vertex
  std::vector<char> event_failed;     // proxy evaluated and failed
  int zero_inradius_count = 0;

  std::vector<double> nu, mu;
  std::vector<int> parent;  // flat parent index, -1 at the root
  std::vector<double> log_pi, log_pi_prime, log_rho;
  std::vector<double> varsigma, log_varpi;

  bool has_pi() const { return !log_pi.empty(); }
};

// sigma(x, n): Euclidean diameter of the 4 alpha^n ball over the inradius of
// the filled alpha^{n-1+zeta} ball (clamped at 1), or 1 when the event proxy
// fails; the metric-only strategies use the intrinsic ratio alpha^{1-zeta}.
WeightState default_sigma(const FillingGraph& g, const EmbeddingRef& emb, double eta, double zeta,
                          SigmaStrategy strategy);

// Disconnection-event proxy: true iff some band of width 8 alpha^{n-1+zeta}
// inside [alpha^{n-1}/8, alpha^{n-1}/4] has no sampled middle-third ball that
// disconnects its inner and outer sides in the proximity graph.
bool check_F_event(const FiniteMetricSpace& space, int x, int n, double alpha, double zeta);

// Minimal sum of sigma over horizontal chains at level `parent_level + 1`
// whose first ball meets B_{alpha^{n-1}}(y) and whose last ball leaves
// B_{2 alpha^{n-1}}(y); +infinity when no crossing chain exists.
double admissibility_margin(const FillingGraph& g, const std::vector<double>& sigma,
                            int parent_level, int parent_id);

struct MarginReport {
  // min_margin[n] = smallest margin over parents at level n-1 (index by n).
  std::vector<double> min_margin;
  std::vector<double> scale_applied;
  int raised_vertices = 0;
};

// Scales sigma per level so that every crossing margin is >= 1; exact-zero
// margins are first resolved by raising sigma to 1 on the cheapest chain's
// argmin vertex, iteratively.
MarginReport repair_sigma(const FillingGraph& g, WeightState& state);

// nu(u) = 2 max sigma over the one- and two-step horizontal neighborhood of
// u (u itself included); mu = clamp(nu, eta, 1 - eta).
void compute_nu_mu(const FillingGraph& g, WeightState& state);

// parent(y, n+1) = nearest level-n net point, ties to the smaller id.
void choose_parents(const FillingGraph& g, WeightState& state);

// The level-by-level pi construction: pi'(u) = pi(parent) mu(u), then the
// regularization step replacing dominated values by eta * sup of their
// dominators. Postconditions are asserted exactly; throws AxiomViolation.
void regularize_pi(const FillingGraph& g, WeightState& state);

struct AxiomReport {
  int h1_violations = 0;
  int h2_violations = 0;
  double h3_min_ratio = 0.0;  // min over sampled Z-paths of sum pi / pi(u0,uN)
  int h3_paths = 0;
  double max_log_pi_minus_bound = 0.0;  // max of log pi(u) - n log(1-eta)
  std::string witness;
};

// H1/H2 exact scans plus the sampled H3 ratio. Throws H1Violation or
// H2Violation on a hard failure (the report carries the witness).
AxiomReport check_H_axioms(const FillingGraph& g, const WeightState& state, int n_paths,
                           std::uint64_t seed);

struct PairPi {
  int n = 0;                  // n(x, y)
  std::vector<int> witnesses;  // level-n net ids
  double log_pi = 0.0;        // log pi(x, y)
};

// n(x,y), the witness set, and pi(x,y) for distinct space points.
PairPi pi_of_pair(const FillingGraph& g, const WeightState& state, int x, int y);

enum class BoundaryMethod { PiComparator, GraphPathLower, GraphPathUpper };

struct BoundaryMetric {
  double epsilon = 1.0;
  BoundaryMethod method = BoundaryMethod::PiComparator;
  std::vector<int> points;     // space point indices (deepest net level)
  std::vector<double> values;  // row-major k x k
  double value(int i, int j) const { return values[static_cast<std::size_t>(i) * points.size() + j]; }
};

// Deformed boundary metric on the deepest net level. The pi-comparator is
// d(x,y) = pi(x,y)^epsilon; the graph methods run shortest paths with edge
// lengths len_rho(e) e^{-epsilon M_e}, M_e the max (lower) or min (upper) of
// d_rho(o, .) over the edge endpoints.
BoundaryMetric boundary_metric(const FillingGraph& g, const WeightState& state, double epsilon,
                               BoundaryMethod method, int max_points = 1200,
                               std::uint64_t seed = 0);

struct VarsigmaReport {
  bool pi_bounded = true;           // pi(u) <= varpi(u) everywhere
  double max_log_excess = -1e300;   // max log pi - log varpi
  int nontrivial = 0;               // vertices with varsigma < 1
  std::string witness;
};

// varsigma(x,n) = (eta + 128 e^{-2 pi m_n} + 2 [F proxy failed]) ^ 1 with the
// modulus lower-bounded through measured in/out radii, and the running
// product varpi along the parent tree; checks pi <= varpi in log space.
VarsigmaReport varsigma_varpi(const FillingGraph& g, const EmbeddingRef& emb, WeightState& state);

}  // namespace confdim
