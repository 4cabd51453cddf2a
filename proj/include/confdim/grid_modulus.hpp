#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "confdim/embedding.hpp"
#include "confdim/metric_space.hpp"

namespace confdim {

// Doubly connected grid region. Cells are tagged inner-boundary (potential 0),
// outer-boundary (potential 1), domain (solved), or outside.
class GridAnnulus {
public:
  enum Cell : unsigned char { Outside = 0, Domain = 1, Inner = 2, Outer = 3 };

  GridAnnulus(int width, int height) : w_(width), h_(height), cells_(width * height, Outside) {}

  int width() const { return w_; }
  int height() const { return h_; }
  Cell& at(int x, int y) { return cells_[y * w_ + x]; }
  Cell at(int x, int y) const { return cells_[y * w_ + x]; }

  // Rasterized round annulus r1 < |z| < r2 centered in the grid.
  static GridAnnulus round(double r1, double r2);

  // Euclidean radii of the tagged boundaries around the grid center:
  // R1 = max |cell| over inner cells, R2 = min |cell| over outer cells.
  std::pair<double, double> measured_radii() const;

private:
  int w_ = 0, h_ = 0;
  std::vector<Cell> cells_;
};

struct ModulusReport {
  double modulus = 0.0;
  double energy = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Conformal-modulus estimate of the grid annulus: m = 1/E where E is the
// Dirichlet energy of the 5-point harmonic potential (0 inner, 1 outer),
// solved by conjugate gradients to the given relative tolerance.
ModulusReport grid_modulus(const GridAnnulus& domain, double tol = 1e-8);

// (e^{2 pi m}/16 - 1, e^{2 pi m}): bounds on R2/R1 in terms of the modulus.
std::pair<double, double> teichmuller_bounds(double m);

// log(r_out/r_in) / (2 pi): the modulus of the round annulus, a lower bound
// for any domain containing it.
double modulus_from_ratio(double r_out, double r_in);

// Monte Carlo probe of the moment decay E[e^{-2 pi m_eps p}] over embedded
// annuli between the filled eps-ball and the R-ball around the root.
struct MomentProbeRow {
  double eps = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
};
struct MomentProbeReport {
  double p = 0.0;
  std::vector<MomentProbeRow> rows;
  double slope = 0.0;     // fitted d log estimate / d log eps
  double slope_se = 0.0;  // standard error of the fit
};

struct AnnulusSample {
  const FiniteMetricSpace* space = nullptr;
  const PlanarEmbedding* embedding = nullptr;
  std::vector<int> vertex_of_point;  // space point -> map vertex
};

MomentProbeReport modulus_moment_probe(const std::vector<AnnulusSample>& samples,
                                       const std::vector<double>& eps_grid, double p,
                                       double outer_radius, int grid_cells = 160);

// Shared helper: rasterize the faces incident to a point set and compute the
// grid modulus of the region between two tagged point sets.
ModulusReport embedded_annulus_modulus(const AnnulusSample& sample, const PointSet& inner_region,
                                       const PointSet& annulus_region, int grid_cells);

}  // namespace confdim
