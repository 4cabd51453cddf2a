// confdim: sample Brownian-sphere discretizations, build hyperbolic fillings
// and weight deformations, and estimate dimension exponents.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "confdim/csbp.hpp"
#include "confdim/errors.hpp"
#include "confdim/grid_modulus.hpp"
#include "confdim/io.hpp"
#include "confdim/pipeline.hpp"
#include "confdim/rng.hpp"

namespace fs = std::filesystem;
using namespace confdim;
using nlohmann::json;

namespace {

struct CommonOpts {
  PipelineConfig cfg;
  std::string out_dir = "out";
};

void add_config_flags(CLI::App* app, CommonOpts& o) {
  app->add_option("--source", o.cfg.source, "snake or quad");
  app->add_option("--n", o.cfg.n, "snake steps");
  app->add_option("--faces", o.cfg.faces, "quadrangulation faces");
  app->add_option("--subsample", o.cfg.subsample, "quad metric sample size");
  app->add_option("--alpha", o.cfg.alpha, "net ratio, in (0, 1/8]");
  app->add_option("--eta", o.cfg.eta, "clamp parameter, in (0, 1/2)");
  app->add_option("--zeta", o.cfg.zeta, "band exponent, in (0, 1)");
  app->add_option("--n-max", o.cfg.n_max, "deepest net level");
  app->add_option("--epsilon", o.cfg.epsilon, "visual parameter, in (0, 1]");
  app->add_option("--strategy", o.cfg.strategy,
                  "sigma strategy: ratio | ratio_with_event | metric_only | "
                  "metric_only_with_event");
  app->add_option("--ordering", o.cfg.ordering, "net scan order: identity | mass");
  app->add_option("--seed", o.cfg.seed, "RNG seed");
  app->add_option("--workers", o.cfg.workers, "worker threads (0 = auto)");
  app->add_option("-o,--out", o.out_dir, "output directory");
}

json error_json(const std::string& code, const std::string& what) {
  json j;
  j["error"] = code;
  j["what"] = what;
  return j;
}

void write_manifest(const fs::path& dir, const PipelineConfig& cfg,
                    const std::vector<std::string>& outputs) {
  json m;
  m["tool_version"] = kToolVersion;
  m["config"] = cfg.to_json();
  m["config_hash"] = cfg.hash();
  json files;
  for (const auto& f : outputs)
    if (fs::exists(dir / f)) files[f] = file_hash(dir / f);
  m["outputs"] = files;
  write_text(dir / "manifest.json", m.dump(2));
}

int cmd_sample(const CommonOpts& o) {
  fs::create_directories(o.out_dir);
  SampledInstance inst = sample_instance(o.cfg);
  std::vector<std::string> outputs{"space.cdim", "space.cdim.json"};
  write_space(fs::path(o.out_dir) / "space.cdim", inst.space);
  if (inst.map) {
    write_quadmap(fs::path(o.out_dir) / "map.json", *inst.map);
    outputs.push_back("map.json");
    json vp = inst.vertex_of_point;
    write_text(fs::path(o.out_dir) / "points.json", vp.dump());
    outputs.push_back("points.json");
  }
  if (inst.embedding) {
    write_embedding_csv(fs::path(o.out_dir) / "embedding.csv", *inst.embedding);
    outputs.push_back("embedding.csv");
  }
  write_manifest(o.out_dir, o.cfg, outputs);
  std::printf("sampled %s instance: %d points, diam %.6f -> %s\n", o.cfg.source.c_str(),
              inst.space.n_points(), inst.space.diameter(), o.out_dir.c_str());
  return 0;
}

enum class Stage { Fill, Weigh, Deform, Dims, Full };

int run_stages(const CommonOpts& o, Stage stage) {
  fs::create_directories(o.out_dir);
  SampledInstance inst = sample_instance(o.cfg);
  std::vector<std::string> outputs;

  if (stage == Stage::Fill) {
    NetHierarchy nets = build_nets(inst.space, o.cfg.alpha, o.cfg.n_max,
                                   o.cfg.ordering == "mass" ? NetOrdering::MassWeighted
                                                            : NetOrdering::Identity,
                                   derive_seed(o.cfg.seed, 31));
    FillingGraph fill = build_filling(inst.space, nets);
    write_filling_edges_csv(fs::path(o.out_dir) / "filling_edges.csv", fill);
    json nj;
    nj["alpha"] = nets.alpha;
    nj["ordering"] = nets.ordering_id;
    nj["levels"] = nets.levels;
    write_text(fs::path(o.out_dir) / "nets.json", nj.dump());
    outputs = {"filling_edges.csv", "nets.json"};
    write_manifest(o.out_dir, o.cfg, outputs);
    std::printf("filling: %d vertices, %d edges\n", fill.n_vertices(), fill.n_edges());
    return 0;
  }

  PipelineResult res = run_pipeline(inst, o.cfg);
  write_filling_edges_csv(fs::path(o.out_dir) / "filling_edges.csv", res.filling);
  outputs.push_back("filling_edges.csv");
  write_weights_csv(fs::path(o.out_dir) / "weights.csv", res.filling, res.weights);
  outputs.push_back("weights.csv");
  {
    json mj = json::array();
    for (std::size_t n = 1; n < res.margins.min_margin.size(); ++n) {
      json m;
      m["level"] = n;
      m["min_margin"] = std::isfinite(res.margins.min_margin[n])
                            ? json(res.margins.min_margin[n])
                            : json("inf");
      m["scale_applied"] = res.margins.scale_applied[n];
      mj.push_back(m);
    }
    write_text(fs::path(o.out_dir) / "margins.json", mj.dump(2));
    outputs.push_back("margins.json");
  }
  if (stage == Stage::Deform || stage == Stage::Dims || stage == Stage::Full) {
    const auto& bm = res.boundary;
    std::string csv = "i,j,value\n";
    for (std::size_t a = 0; a < bm.points.size(); ++a)
      for (std::size_t b = a + 1; b < bm.points.size(); ++b)
        csv += std::to_string(bm.points[a]) + "," + std::to_string(bm.points[b]) + "," +
               std::to_string(bm.value(static_cast<int>(a), static_cast<int>(b))) + "\n";
    write_text(fs::path(o.out_dir) / "boundary_metric.csv", csv);
    outputs.push_back("boundary_metric.csv");
  }
  if (stage == Stage::Dims || stage == Stage::Full) {
    write_text(fs::path(o.out_dir) / "dims.json", res.dims_json().dump(2));
    outputs.push_back("dims.json");
    std::string csv = "p,slope,se\n";
    for (std::size_t i = 0; i < res.critexp.p_grid.size(); ++i)
      csv += std::to_string(res.critexp.p_grid[i]) + "," + std::to_string(res.critexp.slope[i]) +
             "," + std::to_string(res.critexp.slope_se[i]) + "\n";
    write_text(fs::path(o.out_dir) / "slope_table.csv", csv);
    outputs.push_back("slope_table.csv");
  }
  write_text(fs::path(o.out_dir) / "verify.json", res.verify_json().dump(2));
  outputs.push_back("verify.json");
  write_manifest(o.out_dir, o.cfg, outputs);

  std::printf("pipeline done: hard=%s soft=%s p*=%.3f\n", res.hard_pass() ? "pass" : "FAIL",
              res.soft_pass() ? "pass" : "warn", res.critexp.p_star);
  if (!res.hard_pass()) return 1;
  return res.soft_pass() ? 0 : 2;
}

int cmd_csbp_check(const CommonOpts& o, int budget) {
  fs::create_directories(o.out_dir);
  json rows = json::array();
  bool all_pass = true, inconclusive = false;

  auto run_laplace = [&](double y, double t, double lambda) {
    double target = std::exp(-y * laplace_u(t, lambda));
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < budget; ++k) {
      CSBPPath p = sample_csbp(y, 1e-3, t, derive_seed(o.cfg.seed, 1000 + k));
      double v = std::exp(-lambda * p.at_time(t));
      sum += v;
      sum2 += v * v;
    }
    double mean = sum / budget;
    double se = std::sqrt(std::max(sum2 / budget - mean * mean, 0.0) / budget);
    json r;
    r["check"] = "laplace";
    r["params"] = {{"y", y}, {"t", t}, {"lambda", lambda}};
    r["estimate"] = mean;
    r["se"] = se;
    r["target"] = target;
    if (se > 0.05) {
      r["verdict"] = "inconclusive";
      inconclusive = true;
    } else {
      bool pass = std::abs(mean - target) <= 4.0 * se + 0.01;
      r["verdict"] = pass ? "pass" : "fail";
      all_pass &= pass;
    }
    rows.push_back(r);
  };
  run_laplace(1.0, 0.5, 1.0);
  run_laplace(1.0, 1.0, 2.0);

  {  // lifetime cdf check
    double target = lifetime_law(1.5, 1.0).first;
    int hits = 0;
    for (int k = 0; k < budget; ++k) {
      CSBPPath p = sample_csbp(1.5, 1e-3, 1.0, derive_seed(o.cfg.seed, 5000000 + k));
      if (p.absorbed() && p.lifetime <= 1.0) ++hits;
    }
    double mean = static_cast<double>(hits) / budget;
    double se = std::sqrt(mean * (1 - mean) / budget);
    json r;
    r["check"] = "lifetime_cdf";
    r["estimate"] = mean;
    r["se"] = se;
    r["target"] = target;
    if (se > 0.05) {
      r["verdict"] = "inconclusive";
      inconclusive = true;
    } else {
      bool pass = std::abs(mean - target) <= 0.01 + 4.0 * se;
      r["verdict"] = pass ? "pass" : "fail";
      all_pass &= pass;
    }
    rows.push_back(r);
  }

  {  // bridge tail vs the closed-form bound
    double y = 1, T = 1, t = 0.5, A = 6;
    double bound = bridge_tail_bound(y, T, t, A);
    int accepted = 0, exceed = 0;
    int want = std::max(budget / 10, 200);
    for (int k = 0; k < budget * 40 && accepted < want; ++k) {
      CSBPPath p = sample_csbp(y, 5e-3, T + T / 100.0, derive_seed(o.cfg.seed, 9000000 + k), {});
      if (p.absorbed() && p.lifetime >= T && p.lifetime <= T + T / 100.0) {
        ++accepted;
        if (p.at_time(t) > A * (T - t) * (T - t)) ++exceed;
      }
    }
    json r;
    r["check"] = "bridge_tail";
    r["accepted"] = accepted;
    if (accepted < 50) {
      r["verdict"] = "inconclusive";
      inconclusive = true;
    } else {
      double mean = static_cast<double>(exceed) / accepted;
      double se = std::sqrt(std::max(mean * (1 - mean), 1.0 / accepted) / accepted);
      r["estimate"] = mean;
      r["se"] = se;
      r["bound"] = bound;
      bool pass = mean <= bound + 4.0 * se;
      r["verdict"] = pass ? "pass" : "fail";
      all_pass &= pass;
    }
    rows.push_back(r);
  }

  json rep;
  rep["budget"] = budget;
  rep["seed"] = o.cfg.seed;
  rep["checks"] = rows;
  rep["all_pass"] = all_pass;
  rep["inconclusive"] = inconclusive;
  write_text(fs::path(o.out_dir) / "csbp_report.json", rep.dump(2));
  {  // one sample path dump, columns t,Y
    CSBPPath p = sample_csbp(1.0, 1e-3, 2.0, o.cfg.seed);
    std::string csv = "t,Y\n";
    for (std::size_t k = 0; k < p.values.size(); ++k)
      csv += std::to_string(k * p.dt) + "," + std::to_string(p.values[k]) + "\n";
    write_text(fs::path(o.out_dir) / "path_sample.csv", csv);
  }
  std::printf("csbp-check: %s%s\n", all_pass ? "pass" : "FAIL",
              inconclusive ? " (some checks inconclusive)" : "");
  return all_pass ? (inconclusive ? 2 : 0) : 1;
}

int cmd_modulus_check(const CommonOpts& o) {
  fs::create_directories(o.out_dir);
  json rows = json::array();
  bool all_pass = true;
  for (double ratio : {2.0, 4.0, 10.0}) {
    double r1 = 60.0, r2 = r1 * ratio;
    GridAnnulus g = GridAnnulus::round(r1, r2);
    ModulusReport m = grid_modulus(g, 1e-8);
    double target = std::log(ratio) / (2.0 * M_PI);
    auto [mr1, mr2] = g.measured_radii();
    auto [lo, hi] = teichmuller_bounds(m.modulus);
    bool pass = std::abs(m.modulus - target) <= 0.05 * target && lo <= mr2 / mr1 &&
                mr2 / mr1 <= hi * 1.05;
    all_pass &= pass;
    json r;
    r["ratio"] = ratio;
    r["m"] = m.modulus;
    r["energy"] = m.energy;
    r["iterations"] = m.iterations;
    r["residual"] = m.residual;
    r["target"] = target;
    r["measured_R2_over_R1"] = mr2 / mr1;
    r["teichmuller"] = {{"lower", lo}, {"upper", hi}};
    r["pass"] = pass;
    rows.push_back(r);
  }
  json rep;
  rep["fixtures"] = rows;
  rep["all_pass"] = all_pass;
  write_text(fs::path(o.out_dir) / "modulus_report.json", rep.dump(2));
  std::printf("modulus-check: %s\n", all_pass ? "pass" : "FAIL");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian-sphere hyperbolic fillings and conformal-dimension estimates"};
  app.require_subcommand(1);

  CommonOpts o;
  int budget = 100000;

  auto* sample = app.add_subcommand("sample", "sample an instance and write its artifacts");
  add_config_flags(sample, o);
  auto* fill = app.add_subcommand("fill", "build the net hierarchy and filling graph");
  add_config_flags(fill, o);
  auto* weigh = app.add_subcommand("weigh", "run the weight pipeline (sigma .. pi)");
  add_config_flags(weigh, o);
  auto* deform = app.add_subcommand("deform", "compute the deformed boundary metric");
  add_config_flags(deform, o);
  auto* dims = app.add_subcommand("dims", "dimension estimates and critical exponent");
  add_config_flags(dims, o);
  auto* pipeline = app.add_subcommand("pipeline", "full run: sample through dims");
  add_config_flags(pipeline, o);
  auto* verify = app.add_subcommand("verify", "run every invariant check and report");
  add_config_flags(verify, o);
  auto* csbp = app.add_subcommand("csbp-check", "Monte Carlo checks of the CSBP transforms");
  add_config_flags(csbp, o);
  csbp->add_option("--budget", budget, "paths per Monte Carlo check");
  auto* modulus = app.add_subcommand("modulus-check", "grid modulus against round annuli");
  add_config_flags(modulus, o);

  try {
    app.parse(argc, argv);
    o.cfg.validate();
    if (sample->parsed()) return cmd_sample(o);
    if (fill->parsed()) return run_stages(o, Stage::Fill);
    if (weigh->parsed()) return run_stages(o, Stage::Weigh);
    if (deform->parsed()) return run_stages(o, Stage::Deform);
    if (dims->parsed()) return run_stages(o, Stage::Dims);
    if (pipeline->parsed() || verify->parsed()) return run_stages(o, Stage::Full);
    if (csbp->parsed()) return cmd_csbp_check(o, budget);
    if (modulus->parsed()) return cmd_modulus_check(o);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.what()).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("Unhandled", e.what()).dump() << "\n";
    return 1;
  }
  return 0;
}
