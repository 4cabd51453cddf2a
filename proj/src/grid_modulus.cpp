#include "confdim/grid_modulus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

#include "confdim/errors.hpp"

namespace confdim {

GridAnnulus GridAnnulus::round(double r1, double r2) {
  if (!(r2 > r1) || !(r1 > 2.0)) throw BadRadii("need r2 > r1 > 2 grid cells");
  int half = static_cast<int>(std::ceil(r2)) + 2;
  int n = 2 * half + 1;
  GridAnnulus g(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      double dx = x - half, dy = y - half;
      double r = std::hypot(dx, dy);
      if (r > r1 && r < r2) g.at(x, y) = Domain;
    }
  // Tag boundary cells: non-domain cells 4-adjacent to the domain.
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (g.at(x, y) != Outside) continue;
      bool adj = false;
      if (x > 0 && g.at(x - 1, y) == Domain) adj = true;
      if (x + 1 < n && g.at(x + 1, y) == Domain) adj = true;
      if (y > 0 && g.at(x, y - 1) == Domain) adj = true;
      if (y + 1 < n && g.at(x, y + 1) == Domain) adj = true;
      if (!adj) continue;
      double r = std::hypot(x - half, y - half);
      g.at(x, y) = r <= r1 ? Inner : Outer;
    }
  return g;
}

std::pair<double, double> GridAnnulus::measured_radii() const {
  double cx = (w_ - 1) / 2.0, cy = (h_ - 1) / 2.0;
  double r1 = 0.0, r2 = std::numeric_limits<double>::infinity();
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x) {
      double r = std::hypot(x - cx, y - cy);
      if (at(x, y) == Inner) r1 = std::max(r1, r);
      if (at(x, y) == Outer) r2 = std::min(r2, r);
    }
  return {r1, r2};
}

ModulusReport grid_modulus(const GridAnnulus& domain, double tol) {
  const int w = domain.width(), h = domain.height();
  std::vector<int> id(static_cast<std::size_t>(w) * h, -1);
  std::vector<int> xs, ys;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (domain.at(x, y) == GridAnnulus::Domain) {
        id[y * static_cast<std::size_t>(w) + x] = static_cast<int>(xs.size());
        xs.push_back(x);
        ys.push_back(y);
      }
  const int n = static_cast<int>(xs.size());
  if (n == 0) throw NotDoublyConnected("empty domain");

  // The domain must touch both boundaries and form one
  // component between them.
  {
    std::vector<char> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    bool touch_in = false, touch_out = false;
    auto visit = [&](int x, int y, int from) {
      if (x < 0 || y < 0 || x >= w || y >= h) return;
      auto c = domain.at(x, y);
      if (c == GridAnnulus::Inner) touch_in = true;
      if (c == GridAnnulus::Outer) touch_out = true;
      if (c != GridAnnulus::Domain) return;
      int j = id[y * static_cast<std::size_t>(w) + x];
      if (!seen[j]) {
        seen[j] = 1;
        queue.push_back(j);
      }
      (void)from;
    };
    while (!queue.empty()) {
      int i = queue.front();
      queue.pop_front();
      visit(xs[i] - 1, ys[i], i);
      visit(xs[i] + 1, ys[i], i);
      visit(xs[i], ys[i] - 1, i);
      visit(xs[i], ys[i] + 1, i);
    }
    if (!touch_in || !touch_out)
      throw NotDoublyConnected("domain does not connect the two boundaries");
    for (char s : seen)
      if (!s) throw NotDoublyConnected("domain is not a single component");
  }

  // Matrix-free CG on the 5-point Laplacian with Dirichlet data folded into
  // the right-hand side; missing neighbors act as Neumann sides.
  std::vector<std::array<int, 4>> nbrs(n);
  std::vector<double> diag(n, 0.0), rhs(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int x = xs[i], y = ys[i];
    const int dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      nbrs[i][k] = -1;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      auto c = domain.at(nx, ny);
      if (c == GridAnnulus::Domain) {
        nbrs[i][k] = id[ny * static_cast<std::size_t>(w) + nx];
        diag[i] += 1.0;
      } else if (c == GridAnnulus::Inner) {
        diag[i] += 1.0;  // u = 0 there
      } else if (c == GridAnnulus::Outer) {
        diag[i] += 1.0;
        rhs[i] += 1.0;  // u = 1 there
      }
    }
    if (diag[i] == 0.0) diag[i] = 1.0;
  }

  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) {
      double s = diag[i] * v[i];
      for (int k = 0; k < 4; ++k)
        if (nbrs[i][k] >= 0) s -= v[nbrs[i][k]];
      out[i] = s;
    }
  };

  std::vector<double> u(n, 0.5), r(n), p(n), ap(n);
  apply(u, r);
  double rr = 0.0, bnorm = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = rhs[i] - r[i];
    rr += r[i] * r[i];
    bnorm += rhs[i] * rhs[i];
  }
  bnorm = std::max(std::sqrt(bnorm), 1e-30);
  p = r;
  int it = 0;
  const int max_it = 40 * static_cast<int>(std::sqrt(static_cast<double>(n))) + 2000;
  while (std::sqrt(rr) / bnorm > tol && it < max_it) {
    apply(p, ap);
    double pap = 0.0;
    for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;
    double alpha = rr / pap;
    double rr_new = 0.0;
    for (int i = 0; i < n; ++i) {
      u[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rr_new += r[i] * r[i];
    }
    double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++it;
  }

  // Dirichlet energy over edges with at least one domain endpoint; boundary
  // values are 0 (inner) and 1 (outer). Count each edge once.
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    const int x = xs[i], y = ys[i];
    // right and up edges between domain cells: count from the lower id side
    const int dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      auto c = domain.at(nx, ny);
      if (c == GridAnnulus::Domain) {
        int j = id[ny * static_cast<std::size_t>(w) + nx];
        if (j > i) {
          double d = u[i] - u[j];
          energy += d * d;
        }
      } else if (c == GridAnnulus::Inner) {
        energy += u[i] * u[i];
      } else if (c == GridAnnulus::Outer) {
        energy += (1.0 - u[i]) * (1.0 - u[i]);
      }
    }
  }

  ModulusReport rep;
  rep.energy = energy;
  rep.modulus = energy > 0.0 ? 1.0 / energy : std::numeric_limits<double>::infinity();
  rep.iterations = it;
  rep.residual = std::sqrt(rr) / bnorm;
  return rep;
}

std::pair<double, double> teichmuller_bounds(double m) {
  if (m < 0.0) throw NegativeModulus("modulus must be >= 0");
  double e = std::exp(2.0 * M_PI * m);
  return {e / 16.0 - 1.0, e};
}

double modulus_from_ratio(double r_out, double r_in) {
  if (!(r_in > 0.0) || r_out < r_in) throw BadRadii("need r_out >= r_in > 0");
  return std::log(r_out / r_in) / (2.0 * M_PI);
}

namespace {

// Paint the faces incident to `region` onto a grid; returns cell tags.
struct Raster {
  GridAnnulus grid;
  double scale, ox, oy;
};

void paint_faces(const AnnulusSample& s, const PointSet& region, GridAnnulus& g, double scale,
                 double ox, double oy, GridAnnulus::Cell tag, bool only_outside) {
  const QuadMap& q = *s.embedding->map;
  std::vector<char> in_set(q.n_vertices(), 0);
  for (int p : region) in_set[s.vertex_of_point[p]] = 1;
  std::vector<char> face_done(q.n_faces(), 0);
  for (int p : region) {
    int v = s.vertex_of_point[p];
    for (int h0 : q.halfedges_out(v)) {
      int f = q.face_of(h0);
      if (f == s.embedding->outer_face || face_done[f]) continue;
      face_done[f] = 1;
      std::vector<Vec2> poly;
      int h = q.face_halfedge(f);
      do {
        poly.push_back(s.embedding->pos[q.tail(h)]);
        h = q.next_in_face(h);
      } while (h != q.face_halfedge(f));
      double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
      for (std::size_t k = 1; k < poly.size(); ++k) {
        xmin = std::min(xmin, poly[k].x);
        xmax = std::max(xmax, poly[k].x);
        ymin = std::min(ymin, poly[k].y);
        ymax = std::max(ymax, poly[k].y);
      }
      int gx0 = std::max(0, static_cast<int>((xmin - ox) * scale));
      int gx1 = std::min(g.width() - 1, static_cast<int>((xmax - ox) * scale) + 1);
      int gy0 = std::max(0, static_cast<int>((ymin - oy) * scale));
      int gy1 = std::min(g.height() - 1, static_cast<int>((ymax - oy) * scale) + 1);
      for (int gy = gy0; gy <= gy1; ++gy)
        for (int gx = gx0; gx <= gx1; ++gx) {
          double px = ox + (gx + 0.5) / scale, py = oy + (gy + 0.5) / scale;
          // even-odd point-in-polygon
          bool inside = false;
          for (std::size_t k = 0; k < poly.size(); ++k) {
            Vec2 a = poly[k], b = poly[(k + 1) % poly.size()];
            if ((a.y > py) != (b.y > py)) {
              double t = (py - a.y) / (b.y - a.y);
              if (px < a.x + t * (b.x - a.x)) inside = !inside;
            }
          }
          if (!inside) continue;
          if (only_outside && g.at(gx, gy) != GridAnnulus::Outside) continue;
          g.at(gx, gy) = tag;
        }
    }
  }
}

}  // namespace

ModulusReport embedded_annulus_modulus(const AnnulusSample& sample, const PointSet& inner_region,
                                       const PointSet& annulus_region, int grid_cells) {
  // Bounding box over the union of regions.
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto extend = [&](const PointSet& ps) {
    for (int p : ps) {
      Vec2 v = sample.embedding->pos[sample.vertex_of_point[p]];
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  };
  extend(inner_region);
  extend(annulus_region);
  if (!(xmax > xmin) || !(ymax > ymin)) throw NotDoublyConnected("degenerate region");
  double span = std::max(xmax - xmin, ymax - ymin) * 1.05;
  double ox = (xmin + xmax) / 2 - span / 2, oy = (ymin + ymax) / 2 - span / 2;
  double scale = grid_cells / span;

  GridAnnulus g(grid_cells + 2, grid_cells + 2);
  // Everything not painted is "outside" and acts as the outer boundary side.
  paint_faces(sample, annulus_region, g, scale, ox, oy, GridAnnulus::Domain, false);
  paint_faces(sample, inner_region, g, scale, ox, oy, GridAnnulus::Inner, false);
  // Outer tag: outside cells adjacent to domain cells.
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      if (g.at(x, y) != GridAnnulus::Outside) continue;
      bool adj = false;
      if (x > 0 && g.at(x - 1, y) == GridAnnulus::Domain) adj = true;
      if (x + 1 < g.width() && g.at(x + 1, y) == GridAnnulus::Domain) adj = true;
      if (y > 0 && g.at(x, y - 1) == GridAnnulus::Domain) adj = true;
      if (y + 1 < g.height() && g.at(x, y + 1) == GridAnnulus::Domain) adj = true;
      if (adj) g.at(x, y) = GridAnnulus::Outer;
    }
  return grid_modulus(g, 1e-8);
}

MomentProbeReport modulus_moment_probe(const std::vector<AnnulusSample>& samples,
                                       const std::vector<double>& eps_grid, double p,
                                       double outer_radius, int grid_cells) {
  if (samples.size() < 2) throw InsufficientSamples("need at least two annulus samples");
  if (p < 0.0) throw ParameterOutOfRange("p must be >= 0");
  MomentProbeReport rep;
  rep.p = p;
  for (double eps : eps_grid) {
    MomentProbeRow row;
    row.eps = eps;
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (const auto& s : samples) {
      const auto& sp = *s.space;
      double R = outer_radius * sp.diameter();
      double val = 1.0;  // modulus 0 when the annulus degenerates
      try {
        PointSet inner = sp.filled_ball(sp.root(), eps * R, sp.anchor());
        PointSet outer_ball = sp.ball(sp.root(), R);
        std::vector<char> in_inner(sp.n_points(), 0);
        for (int q : inner) in_inner[q] = 1;
        PointSet annulus;
        for (int q : outer_ball)
          if (!in_inner[q]) annulus.push_back(q);
        if (!annulus.empty()) {
          ModulusReport m = embedded_annulus_modulus(s, inner, annulus, grid_cells);
          val = std::exp(-2.0 * M_PI * m.modulus * p);
        }
      } catch (const Error&) {
        val = 1.0;
      }
      sum += val;
      sum2 += val * val;
      ++n;
    }
    row.n_samples = n;
    row.estimate = sum / n;
    double var = std::max(sum2 / n - row.estimate * row.estimate, 0.0);
    row.std_error = std::sqrt(var / n);
    rep.rows.push_back(row);
  }
  // log-log fit of estimate vs eps
  int k = static_cast<int>(rep.rows.size());
  if (k >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rep.rows) {
      double lx = std::log(r.eps), ly = std::log(std::max(r.estimate, 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    double denom = k * sxx - sx * sx;
    rep.slope = denom != 0.0 ? (k * sxy - sx * sy) / denom : 0.0;
    double see = 0.0;
    for (const auto& r : rep.rows) {
      double lx = std::log(r.eps), ly = std::log(std::max(r.estimate, 1e-300));
      double pred = (sy - rep.slope * sx) / k + rep.slope * lx;
      see += (ly - pred) * (ly - pred);
    }
    if (k > 2 && denom > 0.0) rep.slope_se = std::sqrt(see / (k - 2) / (sxx - sx * sx / k));
  }
  return rep;
}

}  // namespace confdim
