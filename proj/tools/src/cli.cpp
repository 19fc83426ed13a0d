#include "cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "crad/eval.hpp"
#include "crad/generator.hpp"
#include "crad/graph.hpp"
#include "crad/inference.hpp"
#include "crad/report_io.hpp"
#include "crad/rng.hpp"
#include "crad/theta_io.hpp"
#include "manifest.hpp"

namespace crad::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kManifest = "manifest.json";

/// Removes everything written so far unless the run commits.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  ~Outputs() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) fs::remove(*it, ec);
    if (created_dir_) fs::remove(dir_, ec);
  }

  void prepare() {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    } else if (!fs::is_directory(dir_)) {
      throw std::runtime_error("'" + dir_.string() + "' is not a directory");
    }
  }
  fs::path path(const std::string& name) {
    written_.push_back(dir_ / name);
    return dir_ / name;
  }
  const fs::path& dir() const { return dir_; }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool created_dir_ = false;
  bool committed_ = false;
};

std::size_t default_threads() {
  if (const char* env = std::getenv("CRAD_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid CRAD_THREADS='" << env << "'\n";
  }
  return 1;
}

void add_fit_options(CLI::App* app, FitConfig& c, bool& regular_only) {
  app->add_option("--k", c.k, "Number of communities")->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--max-iter", c.max_iter, "EM iteration cap")->capture_default_str();
  app->add_option("--tol", c.convergence_tol, "Relative change of the bound that counts as converged")
      ->capture_default_str();
  app->add_option("--check-every", c.check_every, "Iterations between bound evaluations")
      ->capture_default_str();
  app->add_option("--restarts", c.n_restarts, "Random restarts")->capture_default_str();
  app->add_option("--eta-init", c.eta_init)->capture_default_str();
  app->add_option("--pi-init", c.pi_init)->capture_default_str();
  app->add_option("--mu-init", c.mu_init)->capture_default_str();
  app->add_option("--eta-max-iter", c.fixed_point_max_iter)->capture_default_str();
  app->add_option("--eta-tol", c.fixed_point_tol)->capture_default_str();
  app->add_flag("--freeze-pi-mu", c.freeze_pi_mu, "Keep pi and mu at their initial values");
  app->add_flag("--regular-only", regular_only, "Disable the anomaly component (Q = 0)");
  app->add_option("--max-nodes", c.max_nodes, "Refuse larger graphs unless --allow-large")
      ->capture_default_str();
  app->add_flag("--allow-large", c.allow_large);
  app->add_flag("!--no-scale-init", c.scale_init,
                "Keep the raw uniform(0,1) draw of w instead of matching the edge density");
}

ojson fit_config_json(const FitConfig& c) {
  ojson j;
  j["k"] = c.k;
  j["max_iter"] = c.max_iter;
  j["convergence_tol"] = c.convergence_tol;
  j["check_every"] = c.check_every;
  j["n_restarts"] = c.n_restarts;
  j["rng_seed"] = c.rng_seed;
  j["eta_init"] = c.eta_init;
  j["pi_init"] = c.pi_init;
  j["mu_init"] = c.mu_init;
  j["fixed_point_max_iter"] = c.fixed_point_max_iter;
  j["fixed_point_tol"] = c.fixed_point_tol;
  j["freeze_pi_mu"] = c.freeze_pi_mu;
  j["variant"] = c.variant == ModelVariant::full ? "full" : "regular_only";
  j["max_nodes"] = c.max_nodes;
  j["allow_large"] = c.allow_large;
  j["scale_init"] = c.scale_init;
  j["threads"] = c.threads;
  return j;
}

void print_config(const std::string& name, const ojson& config) {
  std::cout << "crad " << name << " resolved config:\n" << config.dump(2) << '\n';
}

ojson report_json(const EvaluationReport& r) { return ojson::parse(report_to_json(r)); }

void write_report_files(Outputs& out, Manifest& manifest,
                        const std::vector<EvaluationReport>& reports) {
  const fs::path jsonl = out.path("report.jsonl");
  const fs::path csv = out.path("report.csv");
  save_reports(reports, jsonl, csv);
  manifest.add_output(out.dir(), "report.jsonl");
  manifest.add_output(out.dir(), "report.csv");
}

void finish(Outputs& out, Manifest& manifest) {
  manifest.write(out.path(kManifest));
  out.commit();
  std::cout << "wrote " << (out.dir() / kManifest).string() << '\n';
}

LoadedGraph read_graph(const fs::path& path) {
  LoadedGraph loaded = load_edge_list(path);
  if (loaded.stats.self_loops_dropped || loaded.stats.duplicates_collapsed) {
    std::cerr << "note: " << path.string() << ": dropped " << loaded.stats.self_loops_dropped
              << " self-loop(s), collapsed " << loaded.stats.duplicates_collapsed
              << " duplicate edge(s)\n";
  }
  return loaded;
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  GeneratorConfig config;
  std::optional<double> avg_degree;
  std::optional<double> edges;
  fs::path out;
};

int cmd_generate(GenerateArgs& a) {
  GeneratorConfig& c = a.config;
  c.target_edges = a.edges ? *a.edges
                           : static_cast<double>(c.n_nodes) * a.avg_degree.value_or(60.0) / 2.0;
  ojson config;
  config["n_nodes"] = c.n_nodes;
  config["k"] = c.k;
  config["target_edges"] = c.target_edges;
  config["anomaly_density"] = c.anomaly_density;
  config["eta"] = c.eta;
  config["pi"] = c.pi;
  config["overlap"] = c.membership.overlap;
  config["distinct_in_out"] = c.membership.distinct_in_out;
  config["assortativity"] = c.affinity.assortativity;
  config["off_diagonal"] = c.affinity.off_diagonal;
  config["seed"] = c.seed;
  print_config("generate", config);

  Outputs out(a.out);
  out.prepare();
  const SyntheticNetwork net = sample(c);
  save_edge_list(net.graph, out.path("graph.txt"));
  save_labels(net.labels, net.graph, out.path("labels.txt"));
  save_theta(net.ground_truth, out.path("theta.json"), net.graph.node_ids());

  std::size_t anomalous_edges = 0;
  for (const auto& [i, j] : net.graph.edges()) anomalous_edges += net.labels.contains(i, j);
  const double e = static_cast<double>(net.graph.n_edges());
  Manifest manifest("generate", c.seed);
  manifest.set_config(config);
  for (const char* f : {"graph.txt", "labels.txt", "theta.json"}) manifest.add_output(out.dir(), f);
  ojson stats;
  stats["n_nodes"] = net.graph.n_nodes();
  stats["edges"] = net.graph.n_edges();
  stats["reciprocity"] = net.graph.n_edges() ? reciprocity(net.graph) : 0.0;
  stats["anomalous_pairs"] = net.labels.size();
  stats["anomalous_edges"] = anomalous_edges;
  stats["anomaly_density"] = e > 0 ? static_cast<double>(anomalous_edges) / e : 0.0;
  stats["zeta"] = net.zeta;
  stats["mu"] = net.ground_truth.mu;
  manifest.extra()["realized"] = stats;
  std::cout << "realized: " << stats.dump() << '\n';
  finish(out, manifest);
  return 0;
}

// ---- infer ------------------------------------------------------------------

struct FitArgs {
  FitConfig config;
  bool regular_only = false;
  fs::path input;
  fs::path out;
};

void resolve_fit(FitArgs& a, std::uint64_t seed, std::size_t threads) {
  a.config.rng_seed = seed;
  a.config.threads = threads;
  a.config.variant = a.regular_only ? ModelVariant::regular_only : ModelVariant::full;
  a.config.validate();
}

int cmd_infer(FitArgs& a) {
  ojson config = fit_config_json(a.config);
  config["input"] = a.input.string();
  print_config("infer", config);

  const LoadedGraph loaded = read_graph(a.input);
  const DirectedGraph& g = loaded.graph;
  Outputs out(a.out);
  out.prepare();
  const FitResult r = fit(g, a.config);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';

  save_theta(r.theta, out.path("theta.json"), g.node_ids());
  save_q(r.state.q, g, out.path("q.txt"));
  ojson run;
  run["final_objective"] = r.final_objective;
  run["objective_trace"] = r.objective_trace;
  run["iterations_run"] = r.iterations_run;
  run["converged"] = r.converged;
  run["restart_index"] = r.restart_index;
  ojson restarts = ojson::array();
  for (double v : r.restart_objectives) {
    if (std::isfinite(v)) restarts.push_back(v); else restarts.push_back(nullptr);
  }
  run["restart_objectives"] = restarts;
  run["warnings"] = r.warnings;
  {
    std::ofstream f(out.path("run.json"), std::ios::binary | std::ios::trunc);
    f << run.dump(2) << '\n';
    if (!f.flush()) throw std::runtime_error("cannot write run.json");
  }

  Manifest manifest("infer", a.config.rng_seed);
  manifest.set_config(config);
  manifest.add_input(a.input);
  for (const char* f : {"theta.json", "q.txt", "run.json"}) manifest.add_output(out.dir(), f);
  manifest.extra()["converged"] = r.converged;
  manifest.extra()["final_objective"] = r.final_objective;
  std::cout << "converged=" << (r.converged ? "true" : "false")
            << " iterations=" << r.iterations_run << " objective=" << r.final_objective
            << " eta=" << r.theta.eta << " pi=" << r.theta.pi << " mu=" << r.theta.mu << '\n';
  finish(out, manifest);
  return 0;
}

// ---- inject -----------------------------------------------------------------

struct InjectArgs {
  fs::path input;
  std::optional<double> density;
  std::optional<std::size_t> count;
  fs::path out;
};

int cmd_inject(InjectArgs& a, std::uint64_t seed) {
  const LoadedGraph loaded = read_graph(a.input);
  const DirectedGraph& g = loaded.graph;
  const std::size_t n = a.count ? *a.count
                                : static_cast<std::size_t>(std::llround(
                                      *a.density * static_cast<double>(g.n_edges())));
  ojson config;
  config["input"] = a.input.string();
  if (a.density) config["density"] = *a.density;
  config["edges_to_inject"] = n;
  config["seed"] = seed;
  print_config("inject", config);

  Outputs out(a.out);
  out.prepare();
  const InjectionResult r = inject_anomalies(g, n, seed);
  save_edge_list(r.graph, out.path("graph.txt"));
  save_labels(r.labels, r.graph, out.path("labels.txt"));
  Manifest manifest("inject", seed);
  manifest.set_config(config);
  manifest.add_input(a.input);
  manifest.add_output(out.dir(), "graph.txt");
  manifest.add_output(out.dir(), "labels.txt");
  manifest.extra()["edges_before"] = g.n_edges();
  manifest.extra()["edges_after"] = r.graph.n_edges();
  manifest.extra()["labelled_pairs"] = r.labels.size();
  finish(out, manifest);
  return 0;
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string metric;
  fs::path graph, q, labels, truth, theta;
  std::optional<std::size_t> budget;
  fs::path out;
};

int cmd_evaluate(EvaluateArgs& a, std::uint64_t seed) {
  ojson config;
  config["metric"] = a.metric;
  auto need = [&](const fs::path& p, const char* flag) {
    if (p.empty()) {
      throw CLI::RequiredError(std::string(flag) + " is required for --metric " + a.metric);
    }
    config[std::string(flag).substr(2)] = p.string();
  };
  std::vector<fs::path> inputs;
  EvaluationReport report;
  if (a.metric == "auc" || a.metric == "precision") {
    need(a.graph, "--graph");
    need(a.q, "--q");
    need(a.labels, "--labels");
    if (a.budget) config["budget"] = *a.budget;
    print_config("evaluate", config);
    const LoadedGraph loaded = read_graph(a.graph);
    const PairValues q = load_q(a.q, loaded.graph);
    const PairLabels labels = load_labels(a.labels, loaded.graph);
    report = a.metric == "auc" ? anomaly_auc(q, labels)
                               : precision_at_budget(q, labels, a.budget.value_or(labels.size()));
    inputs = {a.graph, a.q, a.labels};
  } else {
    need(a.truth, "--truth");
    need(a.theta, "--theta");
    print_config("evaluate", config);
    const ThetaDocument truth = load_theta(a.truth);
    const ThetaDocument fitted = load_theta(a.theta);
    if (!truth.node_ids.empty() && !fitted.node_ids.empty() &&
        truth.node_ids != fitted.node_ids) {
      throw std::runtime_error("ground truth and fitted parameters use different node orders");
    }
    report = cosine_similarity(truth.theta, fitted.theta);
    inputs = {a.truth, a.theta};
  }

  Outputs out(a.out);
  out.prepare();
  Manifest manifest("evaluate", seed);
  manifest.set_config(config);
  for (const auto& p : inputs) manifest.add_input(p);
  write_report_files(out, manifest, {report});
  manifest.extra()["report"] = report_json(report);
  std::cout << report.metric << " = ";
  if (report.empty) std::cout << "(empty)"; else std::cout << report.value;
  std::cout << '\n';
  finish(out, manifest);
  return 0;
}

// ---- cv ---------------------------------------------------------------------

int cmd_cv(FitArgs& a, std::size_t n_folds, std::uint64_t seed) {
  ojson config = fit_config_json(a.config);
  config["input"] = a.input.string();
  config["folds"] = n_folds;
  print_config("cv", config);

  const LoadedGraph loaded = read_graph(a.input);
  const DirectedGraph& g = loaded.graph;
  Outputs out(a.out);
  out.prepare();
  const FoldMask folds = make_folds(g.n_nodes(), n_folds, derive_seed(seed, 0x666f6c64));
  {
    std::ofstream f(out.path("folds.txt"), std::ios::binary | std::ios::trunc);
    f << "# id_i id_j fold\n";
    std::size_t p = 0;
    for (NodeIndex i = 0; i < g.n_nodes(); ++i) {
      for (NodeIndex j = i + 1; j < g.n_nodes(); ++j, ++p) {
        f << g.node_id(i) << ' ' << g.node_id(j) << ' ' << folds.fold[p] << '\n';
      }
    }
    if (!f.flush()) throw std::runtime_error("cannot write folds.txt");
  }
  const EvaluationReport report = cv_link_prediction(g, a.config, folds, seed);
  Manifest manifest("cv", seed);
  manifest.set_config(config);
  manifest.add_input(a.input);
  manifest.add_output(out.dir(), "folds.txt");
  write_report_files(out, manifest, {report});
  manifest.extra()["report"] = report_json(report);
  std::cout << "cv_link_auc = ";
  if (report.empty) std::cout << "(empty)"; else std::cout << report.value << " (sd " << report.sd << ")";
  std::cout << '\n';
  finish(out, manifest);
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Community, reciprocity and anomaly model for directed networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(
#ifdef CRAD_VERSION
      CRAD_VERSION
#else
      "unknown"
#endif
      ));

  std::uint64_t seed = 0;
  std::size_t threads = default_threads();
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--threads", threads,
                    "Worker threads (default from CRAD_THREADS, else 1); results do not depend on it")
        ->check(CLI::PositiveNumber);
  };

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a synthetic network with planted anomalies");
  common(g);
  g->add_option("--n", gen.config.n_nodes, "Number of nodes")->capture_default_str();
  g->add_option("--k", gen.config.k, "Number of communities")->capture_default_str();
  auto* deg = g->add_option("--avg-degree", gen.avg_degree,
                            "Average total (in + out) degree; target edges = N * degree / 2 "
                            "(default 60)");
  g->add_option("--edges", gen.edges, "Target number of directed edges")->excludes(deg);
  g->add_option("--eta", gen.config.eta, "Pair-interaction coefficient")->capture_default_str();
  g->add_option("--pi", gen.config.pi, "Anomalous edge rate")->capture_default_str();
  g->add_option("--rho-a", gen.config.anomaly_density, "Target fraction of anomalous edges")
      ->capture_default_str();
  g->add_option("--overlap", gen.config.membership.overlap, "Fraction of mixed-membership nodes")
      ->capture_default_str();
  g->add_flag("--distinct-in-out", gen.config.membership.distinct_in_out,
              "Draw v separately from u");
  g->add_option("--assortativity", gen.config.affinity.assortativity)->capture_default_str();
  g->add_option("--off-diagonal", gen.config.affinity.off_diagonal)->capture_default_str();
  g->add_option("--out", gen.out, "Output directory")->required();

  FitArgs inf;
  auto* i = app.add_subcommand("infer", "Fit the model to an edge list");
  common(i);
  i->add_option("--input", inf.input, "Edge list")->required()->check(CLI::ExistingFile);
  add_fit_options(i, inf.config, inf.regular_only);
  i->add_option("--out", inf.out, "Output directory")->required();

  InjectArgs inj;
  auto* j = app.add_subcommand("inject", "Add random edges and label them anomalous");
  common(j);
  j->add_option("--input", inj.input, "Edge list")->required()->check(CLI::ExistingFile);
  auto* dens = j->add_option("--density", inj.density,
                             "Edges to add as a fraction of the current edge count");
  auto* cnt = j->add_option("--count", inj.count, "Number of edges to add");
  dens->excludes(cnt);
  j->add_option("--out", inj.out, "Output directory")->required();

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score anomaly posteriors or memberships");
  common(e);
  e->add_option("--metric", ev.metric, "auc | precision | cs")
      ->required()
      ->check(CLI::IsMember({"auc", "precision", "cs"}));
  e->add_option("--graph", ev.graph, "Edge list the Q file refers to")->check(CLI::ExistingFile);
  e->add_option("--q", ev.q, "Q file from infer")->check(CLI::ExistingFile);
  e->add_option("--labels", ev.labels, "Label file")->check(CLI::ExistingFile);
  e->add_option("--budget", ev.budget, "Pairs to flag (default: number of labelled pairs)");
  e->add_option("--truth", ev.truth, "Ground-truth theta document")->check(CLI::ExistingFile);
  e->add_option("--theta", ev.theta, "Fitted theta document")->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "Output directory")->required();

  FitArgs cv;
  std::size_t n_folds = 5;
  auto* c = app.add_subcommand("cv", "Cross-validated link prediction");
  common(c);
  c->add_option("--input", cv.input, "Edge list")->required()->check(CLI::ExistingFile);
  c->add_option("--folds", n_folds, "Number of folds")->capture_default_str();
  add_fit_options(c, cv.config, cv.regular_only);
  c->add_option("--out", cv.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (*g) {
      gen.config.seed = seed;
      return cmd_generate(gen);
    }
    if (*i) {
      resolve_fit(inf, seed, threads);
      return cmd_infer(inf);
    }
    if (*j) {
      if (!inj.density && !inj.count) throw CLI::RequiredError("--density or --count");
      return cmd_inject(inj, seed);
    }
    if (*e) return cmd_evaluate(ev, seed);
    if (*c) {
      resolve_fit(cv, seed, threads);
      return cmd_cv(cv, n_folds, seed);
    }
  } catch (const CLI::Error& err) {
    std::cerr << "error: " << err.what() << "\n\n" << app.help() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 1;
}

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "crad");
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace crad::cli
