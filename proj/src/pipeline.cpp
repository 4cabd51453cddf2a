#include "confdim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confdim/errors.hpp"
#include "confdim/io.hpp"
#include "confdim/rng.hpp"

namespace confdim {

void PipelineConfig::validate() const {
  if (source != "snake" && source != "quad") throw BadConfig("source must be snake or quad");
  if (!(alpha > 0.0) || alpha > 0.125) throw BadConfig("alpha must lie in (0, 1/8]");
  if (!(eta > 0.0) || !(eta < 0.5)) throw BadConfig("eta must lie in (0, 1/2)");
  if (!(zeta > 0.0) || !(zeta < 1.0)) throw BadConfig("zeta must lie in (0, 1)");
  if (!(epsilon > 0.0) || epsilon > 1.0) throw BadConfig("epsilon must lie in (0, 1]");
  if (n_max < 0) throw BadConfig("n_max must be >= 0");
  if (source == "snake" && n < 2) throw BadConfig("snake needs n >= 2");
  if (source == "quad" && faces < 1) throw BadConfig("quad needs faces >= 1");
  if (source == "quad" && subsample < 8) throw BadConfig("subsample must be >= 8");
  if (ordering != "identity" && ordering != "mass") throw BadConfig("ordering: identity or mass");
  if (!strategy.empty()) sigma_strategy_from_string(strategy);  // throws on junk
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["source"] = source;
  j["n"] = n;
  j["faces"] = faces;
  j["subsample"] = subsample;
  j["alpha"] = alpha;
  j["eta"] = eta;
  j["zeta"] = zeta;
  j["n_max"] = n_max;
  j["epsilon"] = epsilon;
  j["strategy"] = strategy;
  j["ordering"] = ordering;
  j["seed"] = seed;
  j["workers"] = workers;
  j["boundary_max_points"] = boundary_max_points;
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig c;
  c.source = j.value("source", c.source);
  c.n = j.value("n", c.n);
  c.faces = j.value("faces", c.faces);
  c.subsample = j.value("subsample", c.subsample);
  c.alpha = j.value("alpha", c.alpha);
  c.eta = j.value("eta", c.eta);
  c.zeta = j.value("zeta", c.zeta);
  c.n_max = j.value("n_max", c.n_max);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.strategy = j.value("strategy", c.strategy);
  c.ordering = j.value("ordering", c.ordering);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.boundary_max_points = j.value("boundary_max_points", c.boundary_max_points);
  return c;
}

std::string PipelineConfig::hash() const { return bytes_hash(to_json().dump()); }

SigmaStrategy PipelineConfig::effective_strategy() const {
  if (!strategy.empty()) return sigma_strategy_from_string(strategy);
  return source == "quad" ? SigmaStrategy::Ratio : SigmaStrategy::MetricOnly;
}

SampledInstance sample_instance(const PipelineConfig& cfg) {
  cfg.validate();
  SampledInstance inst;
  if (cfg.source == "snake") {
    ExcursionPath x = sample_excursion(cfg.n, derive_seed(cfg.seed, 11));
    SnakeLabels z = sample_snake(x, derive_seed(cfg.seed, 12), SnakeBackend::Tree);
    QuotientResult q = quotient_metric(x, z, cfg.workers);
    inst.space = q.space.normalized(0.9);
    return inst;
  }

  // quad source
  inst.map = std::make_unique<QuadMap>(sample_quadrangulation(cfg.faces, derive_seed(cfg.seed, 21)));
  const QuadMap& map = *inst.map;
  UnitGraph g = map.skeleton();
  const int V = map.n_vertices();

  // Vertex subsample: root and star first, then a seeded shuffle.
  int k = std::min(cfg.subsample, V);
  std::vector<int> chosen;
  {
    std::vector<int> order(V);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(derive_seed(cfg.seed, 22));
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> used(V, 0);
    auto push = [&](int v) {
      if (!used[v] && static_cast<int>(chosen.size()) < k) {
        used[v] = 1;
        chosen.push_back(v);
      }
    };
    push(map.root_vertex());
    push(map.star_vertex());
    for (int v : order) push(v);
    std::sort(chosen.begin() + 2, chosen.end());
  }
  inst.vertex_of_point = chosen;

  std::vector<double> dist(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<int> back(V, -1);
  for (int i = 0; i < k; ++i) back[chosen[i]] = i;
  for (int i = 0; i < k; ++i) {
    auto d = g.bfs(chosen[i]);
    for (int j = 0; j < k; ++j) dist[static_cast<std::size_t>(i) * k + j] = d[chosen[j]];
  }
  std::vector<double> mass(k, 1.0 / k);
  FiniteMetricSpace sp = FiniteMetricSpace::from_trusted(std::move(dist), k, /*root=*/0,
                                                         /*anchor=*/1, std::move(mass));
  inst.space = sp.normalized(0.9);

  if (cfg.effective_strategy() == SigmaStrategy::Ratio ||
      cfg.effective_strategy() == SigmaStrategy::RatioWithEvent) {
    inst.embedding = std::make_unique<PlanarEmbedding>(tutte_embed(map));
  }
  return inst;
}

std::vector<std::vector<double>> log_pi_by_level(const FillingGraph& g, const WeightState& st) {
  std::vector<std::vector<double>> out(g.n_levels());
  for (int n = 0; n < g.n_levels(); ++n) {
    out[n].reserve(g.level_size(n));
    for (int i = 0; i < g.level_size(n); ++i) out[n].push_back(st.log_pi[g.flat(n, i)]);
  }
  return out;
}

PipelineResult run_pipeline(const SampledInstance& inst, const PipelineConfig& cfg) {
  cfg.validate();
  const FiniteMetricSpace& space = inst.space;

  NetHierarchy nets = build_nets(space, cfg.alpha, cfg.n_max,
                                 cfg.ordering == "mass" ? NetOrdering::MassWeighted
                                                        : NetOrdering::Identity,
                                 derive_seed(cfg.seed, 31));
  PipelineResult res;
  res.nets = nets;
  res.filling = build_filling(space, nets);
  const FillingGraph& fill = res.filling;

  EmbeddingRef emb = inst.embedding_ref();
  SigmaStrategy strategy = cfg.effective_strategy();
  res.weights = default_sigma(fill, emb, cfg.eta, cfg.zeta, strategy);
  // Deep harmonic drawings of large maps crowd below double precision and
  // most vertex stars degenerate; the Euclidean sigma is then unusable and
  // the pipeline falls back to the intrinsic ratio.
  if ((strategy == SigmaStrategy::Ratio || strategy == SigmaStrategy::RatioWithEvent) &&
      res.weights.zero_inradius_count > (fill.n_vertices() - 1) / 4) {
    res.embedding_degenerate = true;
    strategy = strategy == SigmaStrategy::Ratio ? SigmaStrategy::MetricOnly
                                                : SigmaStrategy::MetricOnlyWithEvent;
    res.weights = default_sigma(fill, emb, cfg.eta, cfg.zeta, strategy);
  }
  res.strategy_used = to_string(strategy);
  res.margins = repair_sigma(fill, res.weights);
  compute_nu_mu(fill, res.weights);
  choose_parents(fill, res.weights);
  regularize_pi(fill, res.weights);
  res.axioms = check_H_axioms(fill, res.weights, 1000, derive_seed(cfg.seed, 32));

  res.delta = estimate_delta(fill, 2000, derive_seed(cfg.seed, 33));
  res.sandwich = sandwich_constants(fill, 2000, derive_seed(cfg.seed, 34));
  res.path_condition = check_path_condition(fill, 2);
  if (fill.n_vertices() <= 5000) fill.check_edge_rules();

  if (emb.valid()) res.varsigma = varsigma_varpi(fill, emb, res.weights);

  res.boundary = boundary_metric(fill, res.weights, cfg.epsilon, BoundaryMethod::PiComparator,
                                 cfg.boundary_max_points, derive_seed(cfg.seed, 35));

  // Dimension estimates; fits that refuse are recorded as absent.
  try {
    double d = space.diameter();
    auto [rlo, rhi] = auto_radius_window(d * 0.02, d * 0.45);
    res.raw_box = box_dimension(space, rlo, rhi, 8);
  } catch (const Error&) {
  }
  try {
    res.deformed_box = deformed_dimension(res.boundary);
  } catch (const Error&) {
  }
  if (space.has_mass()) {
    try {
      std::vector<double> radii;
      for (int k = 0; k < 8; ++k)
        radii.push_back(space.diameter() * std::pow(0.5, 7 - k) * 0.9);
      res.volume = volume_growth_exponent(space, space.root(), radii);
    } catch (const Error&) {
    }
  }
  if (fill.n_levels() >= 4) {
    std::vector<double> p_grid;
    for (double p = 0.25; p <= 8.0; p += 0.25) p_grid.push_back(p);
    // level 0 carries pi(o) = 1 identically and no decay information
    auto levels = log_pi_by_level(fill, res.weights);
    res.critexp = critical_exponent({levels.begin() + 1, levels.end()}, p_grid);
  }
  return res;
}

namespace {
nlohmann::json fit_json(const std::optional<FitReport>& f) {
  if (!f) return nullptr;
  nlohmann::json j;
  j["estimate"] = f->estimate;
  j["std_error"] = f->std_error;
  j["r_squared"] = f->r_squared;
  j["n_points"] = f->n_points;
  j["note"] = f->note;
  return j;
}
}  // namespace

nlohmann::json PipelineResult::verify_json() const {
  nlohmann::json j;
  j["sigma_strategy_used"] = strategy_used;
  j["embedding_degenerate"] = embedding_degenerate;
  j["h1_violations"] = axioms.h1_violations;
  j["h2_violations"] = axioms.h2_violations;
  j["h3_min_ratio"] = axioms.h3_min_ratio;
  j["max_log_pi_minus_corollary_bound"] = axioms.max_log_pi_minus_bound;
  j["regularization_postconditions"] = "pass";  // regularize_pi throws otherwise
  nlohmann::json margins_j = nlohmann::json::array();
  for (std::size_t n = 1; n < margins.min_margin.size(); ++n) {
    nlohmann::json m;
    m["level"] = n;
    m["min_margin"] = std::isfinite(margins.min_margin[n]) ? nlohmann::json(margins.min_margin[n])
                                                           : nlohmann::json("inf");
    m["scale_applied"] = margins.scale_applied[n];
    margins_j.push_back(m);
  }
  j["admissibility"] = margins_j;
  j["raised_vertices"] = margins.raised_vertices;
  j["delta_estimate"] = delta.delta;
  j["sandwich_c"] = sandwich.sandwich_c;
  j["path_condition_pass"] = path_condition.pass;
  j["path_condition_min_violating_L"] = path_condition.min_violating_length;
  if (varsigma) {
    j["pi_le_varpi"] = varsigma->pi_bounded;
    j["varsigma_nontrivial"] = varsigma->nontrivial;
    j["max_log_pi_minus_log_varpi"] = varsigma->max_log_excess;
  }
  return j;
}

nlohmann::json PipelineResult::dims_json() const {
  nlohmann::json j;
  j["raw_box"] = fit_json(raw_box);
  j["deformed_box"] = fit_json(deformed_box);
  j["volume_growth"] = fit_json(volume);
  nlohmann::json ce;
  ce["p_star"] = critexp.p_star;
  ce["found"] = critexp.found;
  ce["p_grid"] = critexp.p_grid;
  ce["slope"] = critexp.slope;
  ce["slope_se"] = critexp.slope_se;
  j["critical_exponent"] = ce;
  j["note"] =
      "box dimension is the computable surrogate; it upper-bounds Hausdorff "
      "dimension, so deformed estimates are conservative";
  return j;
}

bool PipelineResult::hard_pass() const {
  bool margins_ok = true;
  for (std::size_t n = 1; n < margins.min_margin.size(); ++n)
    if (margins.min_margin[n] < 1.0 - 1e-12) margins_ok = false;
  bool varsigma_ok = !varsigma || varsigma->pi_bounded;
  return axioms.h1_violations == 0 && axioms.h2_violations == 0 && margins_ok && varsigma_ok;
}

bool PipelineResult::soft_pass() const { return path_condition.pass; }

}  // namespace confdim
