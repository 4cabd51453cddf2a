#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "confdim/dimension.hpp"
#include "confdim/embedding.hpp"
#include "confdim/excursion.hpp"
#include "confdim/filling.hpp"
#include "confdim/metric_space.hpp"
#include "confdim/nets.hpp"
#include "confdim/quadmap.hpp"
#include "confdim/weights.hpp"

namespace confdim {

struct PipelineConfig {
  std::string source = "snake";  // snake | quad
  int n = 1500;                  // snake steps
  int faces = 20000;             // quad faces
  int subsample = 1500;          // quad metric sample size
  double alpha = 0.125;
  double eta = 0.01;
  double zeta = 0.1;
  int n_max = 4;
  double epsilon = 1.0;
  std::string strategy;  // empty = per-source default
  std::string ordering = "identity";
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  int boundary_max_points = 900;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  std::string hash() const;
  SigmaStrategy effective_strategy() const;
};

// A sampled instance: the metric space plus, for the quad source, the map,
// its harmonic drawing and the point -> vertex correspondence.
struct SampledInstance {
  FiniteMetricSpace space;  // diameter normalized to 0.9
  std::unique_ptr<QuadMap> map;
  std::unique_ptr<PlanarEmbedding> embedding;
  std::vector<int> vertex_of_point;

  EmbeddingRef embedding_ref() const {
    if (!embedding) return {};
    return {embedding.get(), &vertex_of_point};
  }
};

SampledInstance sample_instance(const PipelineConfig& cfg);

struct PipelineResult {
  NetHierarchy nets;
  FillingGraph filling;
  WeightState weights;
  std::string strategy_used;
  bool embedding_degenerate = false;
  MarginReport margins;
  AxiomReport axioms;
  GromovReport delta;
  GromovReport sandwich;
  PathConditionReport path_condition;
  std::optional<VarsigmaReport> varsigma;
  BoundaryMetric boundary;
  CriticalExponentReport critexp;
  std::optional<FitReport> raw_box;
  std::optional<FitReport> deformed_box;
  std::optional<FitReport> volume;

  nlohmann::json verify_json() const;
  nlohmann::json dims_json() const;
  bool hard_pass() const;
  bool soft_pass() const;
};

// Runs nets -> filling -> sigma -> repair -> nu/mu -> parents -> pi ->
// checks -> boundary metric -> dimension estimates.
PipelineResult run_pipeline(const SampledInstance& inst, const PipelineConfig& cfg);

// log pi grouped by level, for the critical-exponent estimator.
std::vector<std::vector<double>> log_pi_by_level(const FillingGraph& g, const WeightState& st);

}  // namespace confdim
