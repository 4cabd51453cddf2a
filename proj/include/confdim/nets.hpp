#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confdim/metric_space.hpp"

namespace confdim {

// Nested maximal alpha^n-separated subsets A_0 c A_1 c ... c A_{n_max}.
struct NetHierarchy {
  double alpha = 0.0;
  std::vector<std::vector<int>> levels;  // levels[n] = point indices of A_n
  std::string ordering_id;               // how the greedy scan order was produced

  int n_max() const { return static_cast<int>(levels.size()) - 1; }
};

enum class NetOrdering { Identity, MassWeighted };

// Greedy nets over the given space. The scan order is the identity
// permutation or a mass-weighted random order (conditionally i.i.d. sampling
// without replacement, seeded). Level n+1 is seeded with A_n before the scan
// so that nesting holds by construction. Requires diam(space) < 1.
NetHierarchy build_nets(const FiniteMetricSpace& space, double alpha, int n_max,
                        NetOrdering ordering = NetOrdering::Identity,
                        std::uint64_t seed = 0);

// Invariant checks (nesting, separation, covering, #A_0 == 1); throws
// AxiomViolation with a witness when one fails.
void check_nets(const FiniteMetricSpace& space, const NetHierarchy& nets);

}  // namespace confdim
