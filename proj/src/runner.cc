#include "dynint/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "dynint/analysis.hpp"
#include "dynint/estimator.hpp"
#include "dynint/io.hpp"

namespace dynint {
namespace {

namespace fs = std::filesystem;

Kernel identity_kernel(int s) { return Kernel::Identity(s, s); }

Distribution uniform(int s) { return Distribution::Constant(s, 1.0 / s); }

Distribution point_mass(int s, int at) {
  Distribution d = Distribution::Zero(s);
  d(at) = 1.0;
  return d;
}

template <class T, class Fn>
void write_file(const fs::path& path, Fn&& fn, const T& obj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out, obj);
}

void write_pair_table(const fs::path& path, const std::string& hash,
                      const Scenario& sc, const MomentReport& m,
                      const BoundConstants& constants) {
  CsvWriter csv(path, hash,
                {"i", "t", "i2", "t2", "cov", "lit", "regime", "bound"});
  const CigSequence cig = build_cig(sc.graphs, sc.design);
  const ExposureMap exposures(sc.graphs, sc.design, sc.radius);
  const double c =
      constants.covariance * (1.0 + sc.env.sigma() * sc.env.sigma());
  const int n = m.n_individuals;
  const int horizon = m.horizon;
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < horizon; ++t) {
      for (int j = 0; j < n; ++j) {
        for (int tp = 0; tp <= t; ++tp) {
          const auto tau = lit(cig, i, j, tp);
          const auto bound = cov_bound_lit(
              t, tp, tau, sc.radius, exposures.probability(i, t),
              exposures.probability(j, tp), sc.env.t_mix(), c);
          csv.cell(i + 1).cell(t + 1).cell(j + 1).cell(tp + 1);
          csv.cell(m.cov(i, t, j, tp));
          csv.cell(tau ? std::to_string(*tau + 1) : std::string("NONE"));
          csv.cell(bound ? 1 : 0);
          csv.cell(bound ? format_double(*bound) : std::string());
          csv.end_row();
        }
      }
    }
  }
}

void log_ledger(std::ostream& log, const Ledger& ledger) {
  for (const auto& row : ledger.rows) {
    log << "  " << row.name << ": " << to_string(row.verdict)
        << " measured=" << format_double(row.measured)
        << " bound=" << format_double(row.bound)
        << " checked=" << row.checked;
    if (!row.detail.empty()) log << " (" << row.detail << ")";
    log << '\n';
  }
}

std::string axis_key(const std::string& axis) {
  if (axis == "N" || axis == "n") return "graph.n";
  if (axis == "T" || axis == "t") return "graph.t";
  if (axis == "r") return "estimator.r";
  if (axis == "l" || axis == "ell" || axis == "block_len") {
    return "design.block_len";
  }
  if (axis == "p_birth") return "graph.p_birth";
  throw ConfigError("--axis", "unknown axis '" + axis +
                                  "' (expected N|T|r|l|p_birth)");
}

std::string axis_value(const std::string& key, double v) {
  if (key == "graph.p_birth") return format_double(v);
  if (v != std::floor(v)) {
    throw ConfigError("--values", "axis " + key + " takes integers, got " +
                                      format_double(v));
  }
  return std::to_string(static_cast<long long>(v));
}

}  // namespace

Environment make_environment(const EnvConfig& cfg, std::uint64_t seed) {
  const int s = cfg.n_states;
  if (cfg.family == "random") {
    Engine rng = make_engine(seed, kStreamEnvironment);
    return build_env(random_environment_spec(s, cfg.t_mix, cfg.sigma, rng));
  }
  EnvironmentSpec spec;
  spec.t_mix = cfg.t_mix;
  spec.sigma = cfg.sigma;
  spec.kernel_own_weight = cfg.kernel_own_weight;
  spec.initial = uniform(s);
  spec.base_kernels = {identity_kernel(s), identity_kernel(s)};
  spec.anchors = {uniform(s), uniform(s)};
  StateValues level(s);
  for (int k = 0; k < s; ++k) level(k) = s > 1 ? double(k) / (s - 1) : 0.5;
  if (cfg.family == "own_arm") {
    spec.outcome.values = {StateValues::Zero(s), StateValues::Ones(s)};
    spec.outcome.own_weight = 1.0;
  } else if (cfg.family == "tracking") {
    spec.anchors = {point_mass(s, 0), point_mass(s, s - 1)};
    spec.outcome.values = {0.5 * level,
                           (0.5 * level.array() + 0.5).matrix()};
    spec.outcome.own_weight = 1.0;
  } else {
    spec.outcome.values = {StateValues::Constant(s, 0.5),
                           StateValues::Constant(s, 0.5)};
  }
  return build_env(std::move(spec));
}

Scenario build_scenario(const ExperimentConfig& cfg) {
  Scenario sc;
  const auto& g = cfg.graph;
  if (g.kind == "static") {
    sc.graphs = make_static(g.n, g.horizon, g.edges);
  } else if (g.kind == "edgeless") {
    sc.graphs = make_static(g.n, g.horizon, {});
  } else if (g.kind == "complete") {
    std::vector<Edge> all;
    for (int a = 0; a < g.n; ++a) {
      for (int b = a + 1; b < g.n; ++b) all.push_back({a, b});
    }
    sc.graphs = make_static(g.n, g.horizon, all);
  } else if (g.kind == "dynamic_er") {
    sc.graphs = make_dynamic_er(g.n, g.horizon, g.er, cfg.seed);
  } else {
    sc.trajectories =
        random_walk_trajectories(g.n, g.horizon, g.v_max, cfg.seed);
    sc.graphs = make_metric(*sc.trajectories, g.kappa);
  }
  sc.env = make_environment(cfg.env, cfg.seed);
  const int l = cfg.resolved_block_len();
  const auto& part = cfg.design.partition;
  if (part == "singleton") {
    sc.design = make_uniform_design(g.n, g.horizon, l, singleton_partition(g.n));
  } else if (part == "single") {
    sc.design =
        make_uniform_design(g.n, g.horizon, l, single_block_partition(g.n));
  } else if (part == "grid") {
    sc.design = make_region_design(*sc.trajectories, l, cfg.design.cell_side);
  } else {
    sc.design = make_component_design(sc.graphs, l);
  }
  sc.radius = cfg.resolved_radius();
  return sc;
}

VerifyOptions verify_options(const ExperimentConfig& cfg) {
  VerifyOptions opt;
  opt.mode = cfg.oracle.mode;
  opt.exact.budget = cfg.oracle.budget;
  opt.mc.replications = cfg.oracle.replications;
  opt.mc.seed = cfg.seed;
  opt.mc.rao_blackwell = cfg.oracle.rao_blackwell;
  opt.mc.jobs = cfg.oracle.jobs;
  return opt;
}

int run_gen_graphs(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  const Scenario sc = build_scenario(cfg);
  write_file(dir / "graphs.txt", write_graph_text, sc.graphs);
  log << "wrote " << (dir / "graphs.txt").string() << " ("
      << sc.graphs.total_edges() << " edges)\n";
  return 0;
}

int run_verify(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  const Scenario sc = build_scenario(cfg);
  const Ledger ledger =
      verify_bounds(sc.env, sc.graphs, sc.design, sc.radius, verify_options(cfg));
  auto doc = to_json(ledger);
  doc["config_hash"] = cfg.hash();
  doc["config"] = cfg.raw;
  write_json(dir / "ledger.json", doc);
  log << "ledger " << (ledger.all_pass() ? "PASS" : "NOT ALL PASS") << '\n';
  log_ledger(log, ledger);
  return ledger.all_pass() ? 0 : 1;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  const std::string hash = cfg.hash();
  const Scenario sc = build_scenario(cfg);
  write_file(dir / "graphs.txt", write_graph_text, sc.graphs);
  write_file(dir / "design.txt", write_design_text, sc.design);

  const AssignmentMatrix w = sample_assignment(sc.design, cfg.seed);
  const OutcomePanel y = simulate(sc.env, sc.graphs, w, cfg.seed);
  const HtReport ht = ht_estimate(sc.graphs, sc.design, w, y, sc.radius);
  write_assignments_csv(dir / "assignments.csv", hash, w);
  write_cluster_arms_csv(dir / "cluster_arms.csv", hash, sc.design, w);
  write_outcomes_csv(dir / "outcomes.csv", hash, y);
  write_ht_csv(dir / "ht_report.csv", hash, ht);
  auto ht_doc = to_json(ht);
  ht_doc["config_hash"] = hash;
  write_json(dir / "ht_summary.json", ht_doc);

  VerifyOptions opt = verify_options(cfg);
  const Ledger ledger =
      verify_bounds(sc.env, sc.graphs, sc.design, sc.radius, opt);
  auto bounds_doc = to_json(ledger.bounds);
  bounds_doc["config_hash"] = hash;
  write_json(dir / "bounds.json", bounds_doc);
  write_cd_csv(dir / "cd_table.csv", hash, ledger.bounds);
  auto ledger_doc = to_json(ledger);
  ledger_doc["config_hash"] = hash;
  ledger_doc["config"] = cfg.raw;
  write_json(dir / "ledger.json", ledger_doc);
  if (cfg.output.pair_table && ledger.moments.has_pair_cov()) {
    write_pair_table(dir / "pair_table.csv", hash, sc, ledger.moments,
                     opt.constants);
  }

  log << "scenario " << cfg.name << " N=" << sc.graphs.n_individuals()
      << " T=" << sc.graphs.horizon() << " l=" << sc.design.block_len()
      << " r=" << sc.radius << " clusters=" << sc.design.n_clusters() << '\n';
  log << "estimate " << format_double(ht.estimate) << " true_ate "
      << format_double(ledger.moments.true_ate) << '\n';
  log << "ledger " << (ledger.all_pass() ? "PASS" : "NOT ALL PASS") << '\n';
  log_ledger(log, ledger);

  if (!cfg.sweep.grid_n.empty() && !cfg.sweep.grid_t.empty()) {
    CsvWriter csv(dir / "mse_table.csv", hash,
                  {"N", "T", "NT", "l", "r", "mean_estimate", "true_ate",
                   "bias", "variance", "mse", "mse_bound", "cd_avg", "cd_max",
                   "p_min", "verdict"});
    for (int n : cfg.sweep.grid_n) {
      for (int t : cfg.sweep.grid_t) {
        auto row_cfg = with_value(cfg, "graph.n", std::to_string(n));
        row_cfg = with_value(row_cfg, "graph.t", std::to_string(t));
        const Scenario rs = build_scenario(row_cfg);
        const Ledger rl = verify_bounds(rs.env, rs.graphs, rs.design,
                                        rs.radius, verify_options(row_cfg));
        const auto& m = rl.moments;
        csv.cell(n).cell(t).cell(n * t).cell(rs.design.block_len())
            .cell(rs.radius).cell(m.mean_estimate).cell(m.true_ate)
            .cell(m.bias).cell(m.variance).cell(m.mse())
            .cell(rl.bounds.mse_bound).cell(rl.bounds.cd_avg)
            .cell(rl.bounds.cd_max).cell(rl.bounds.p_min)
            .cell(std::string(to_string(rl.find("mse")->verdict)));
        csv.end_row();
        log << "  grid N=" << n << " T=" << t
            << " mse=" << format_double(m.mse())
            << " bound=" << format_double(rl.bounds.mse_bound) << '\n';
      }
    }
  }
  return 0;
}

int run_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values, std::ostream& log) {
  const std::string key = axis_key(axis);
  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  const std::string hash = cfg.hash();
  CsvWriter csv(dir / "sweep.csv", hash,
                {"axis", "value", "mean_estimate", "bias", "variance", "mse",
                 "bias_bound", "variance_bound", "mse_bound", "cd_avg",
                 "cd_max", "p_min", "all_pass"});
  // Wall time lives in its own file so sweep.csv stays reproducible.
  CsvWriter timing(dir / "sweep_timing.csv", hash,
                   {"axis", "value", "wall_seconds"});
  for (double v : values) {
    const std::string text = axis_value(key, v);
    const auto start = std::chrono::steady_clock::now();
    const auto row_cfg = with_value(cfg, key, text);
    const Scenario sc = build_scenario(row_cfg);
    const Ledger ledger = verify_bounds(sc.env, sc.graphs, sc.design,
                                        sc.radius, verify_options(row_cfg));
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const auto& m = ledger.moments;
    const auto& b = ledger.bounds;
    csv.cell(axis).cell(text).cell(m.mean_estimate).cell(m.bias)
        .cell(m.variance).cell(m.mse()).cell(b.bias_bound)
        .cell(b.variance_bound).cell(b.mse_bound).cell(b.cd_avg)
        .cell(b.cd_max).cell(b.p_min).cell(ledger.all_pass() ? 1 : 0);
    csv.end_row();
    timing.cell(axis).cell(text).cell(secs).end_row();
    log << axis << "=" << text << " bias=" << format_double(m.bias)
        << " variance=" << format_double(m.variance) << '\n';
  }
  return 0;
}

}  // namespace dynint
