// Acceptance run: one PASS/FAIL/SKIP line per criterion. Tolerances and
// workloads are fixed here. Exit status is nonzero if any criterion fails.
//
//   crad_acceptance            all criteria
//   crad_acceptance 3 6        selected criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/src/cli.hpp"
#include "crad/eval.hpp"
#include "crad/generator.hpp"
#include "crad/graph.hpp"
#include "crad/inference.hpp"
#include "crad/model.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace crad;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Status::pass : Status::fail, std::move(detail)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---- 1 ----------------------------------------------------------------------

Outcome normalization() {
  std::mt19937_64 rng(101);
  double worst_sum = 0.0, worst_odds = 0.0, worst_indep = 0.0;
  std::size_t tables = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const std::size_t n = 2 + draw % 7, k = 1 + draw % 4;
    const auto t = oracle::random_theta(n, k, rng, 0.05 + 3.0 * (draw % 10) / 9.0);
    const auto a = anomalous_pair_distribution(t.pi);
    worst_sum = std::max(worst_sum, std::abs(a.sum() - 1.0));
    worst_indep = std::max(worst_indep, rel(a.p11 * a.p00, a.p10 * a.p01));
    for (NodeIndex i = 0; i < n; ++i) {
      for (NodeIndex j = i + 1; j < n; ++j) {
        const auto r = regular_pair_distribution(t, i, j);
        worst_sum = std::max(worst_sum, std::abs(r.sum() - 1.0));
        worst_odds = std::max(worst_odds, rel(r.p11 * r.p00 / (r.p10 * r.p01), t.eta));
        ++tables;
      }
    }
  }
  // The anomalous identity is a product of rounded values; a few ulps is the
  // floating-point reading of "exactly".
  const bool ok = worst_sum <= 1e-12 && worst_odds <= 1e-9 && worst_indep <= 4 * 4e-16;
  return verdict(ok, fmt("%zu regular + 1000 anomalous tables; max |sum-1| %.1e, max "
                         "odds rel err %.1e, anomalous p11p00 vs p10p01 rel %.1e",
                         tables, worst_sum, worst_odds, worst_indep));
}

// ---- 2 ----------------------------------------------------------------------

Outcome oracle_equivalence() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_q = 0.0, worst_edge = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 5, k = 1 + rep % 3;
    const auto t = oracle::random_theta(n, k, rng, 0.2 + unit(rng));
    const auto g = oracle::random_graph(n, 0.2 + 0.6 * unit(rng), rng);
    const auto a = oracle::dense_adjacency(g);
    const auto q = e_step_q(t, g);
    for (NodeIndex i = 0; i < n; ++i) {
      for (NodeIndex j = 0; j < n; ++j) {
        if (i == j) continue;
        const double lij = oracle::brute_lambda(t, i, j), lji = oracle::brute_lambda(t, j, i);
        if (i < j) {
          worst_q = std::max(worst_q, std::abs(q(i, j) - oracle::bayes_q(lij, lji, t.eta, t.pi,
                                                                       t.mu, a[i][j], a[j][i])));
        }
        const double qq = unit(rng);
        worst_edge = std::max(worst_edge, std::abs(expected_edge(t, qq, i, j) -
                                                   oracle::enumerated_expected_edge(
                                                       lij, lji, t.eta, t.pi, qq)));
      }
    }
  }
  return verdict(worst_q <= 1e-10 && worst_edge <= 1e-12,
                 fmt("50 graphs N<=6; max |Q - Bayes| %.1e, max |E[A] - enumeration| %.1e",
                     worst_q, worst_edge));
}

// ---- 3 ----------------------------------------------------------------------

Outcome monotonicity() {
  std::mt19937_64 rng(303);
  double worst_drop = 0.0;
  std::size_t checks = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 10 + rng() % 41, k = 1 + rep % 4;
    const auto g = oracle::random_graph(n, 0.05 + 0.1 * (rep % 4), rng);
    FitConfig c;
    c.k = k;
    c.n_restarts = 1;
    c.rng_seed = static_cast<std::uint64_t>(rep);
    c.max_iter = 200;
    c.check_every = 1;
    c.convergence_tol = 1e-300;  // never stops early
    c.pi_init = rep % 2 ? 0.1 : 1.0;
    const auto r = fit(g, c);
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t, ++checks) {
      worst_drop = std::max(worst_drop, r.objective_trace[t - 1] - r.objective_trace[t]);
    }
  }
  return verdict(worst_drop <= 1e-8, fmt("20 instances, %zu checks; largest decrease %.1e",
                                         checks, worst_drop));
}

// ---- 4 ----------------------------------------------------------------------

Outcome reduction() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 10 + 4 * rep, k = 1 + rep % 3;
    const auto g = oracle::random_graph(n, 0.15 + 0.03 * rep, rng);
    auto init = oracle::random_theta(n, k, rng, 0.5);
    init.mu = 0.0;
    init.pi = kEpsilon;
    FitConfig frozen;
    frozen.k = k;
    frozen.freeze_pi_mu = true;
    frozen.mu_init = 0.0;
    frozen.pi_init = kEpsilon;
    FitConfig plain = frozen;
    plain.variant = ModelVariant::regular_only;
    LatentParameters a = init, b = init;
    VariationalState sa, sb;
    for (int it = 0; it < 100; ++it) {
      em_iteration(a, sa, g, frozen);
      em_iteration(b, sb, g, plain);
      worst = std::max({worst, (a.u - b.u).cwiseAbs().maxCoeff(),
                        (a.v - b.v).cwiseAbs().maxCoeff(), (a.w - b.w).cwiseAbs().maxCoeff(),
                        std::abs(a.eta - b.eta)});
    }
  }
  return verdict(worst <= 1e-10,
                 fmt("10 instances x 100 iterations; max elementwise gap %.1e", worst));
}

// ---- 5 ----------------------------------------------------------------------

GeneratorConfig grid_config(double rho_a, double eta, std::uint64_t seed) {
  GeneratorConfig c;
  c.n_nodes = 500;
  c.k = 3;
  c.target_edges = 500 * 60.0;
  c.anomaly_density = rho_a;
  c.eta = eta;
  c.seed = seed;
  return c;
}

Outcome calibration() {
  bool ok = true;
  std::string detail;
  for (double rho : {0.1, 0.5, 0.9}) {
    double edges = 0.0, density = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto net = sample(grid_config(rho, 1.0, seed));
      std::size_t anomalous = 0;
      for (const auto& [i, j] : net.graph.edges()) anomalous += net.labels.contains(i, j);
      const auto e = static_cast<double>(net.graph.n_edges());
      edges += e / 10.0;
      density += static_cast<double>(anomalous) / e / 10.0;
    }
    const bool cell = std::abs(edges / 30000.0 - 1.0) <= 0.10 && std::abs(density - rho) <= 0.05;
    ok = ok && cell;
    detail += fmt("rho_a %.1f: E %.0f (target 30000), density %.3f; ", rho, edges, density);
  }
  return verdict(ok, detail);
}

// ---- 6, 7 -------------------------------------------------------------------

struct GridResult {
  std::map<std::pair<double, double>, double> auc, cs, cv;  // (log eta, rho_a)
  double fit_seconds = 0.0;
  double cv_seconds = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Recovery fits keep the best of the default 5 restarts; with a single start
// about one network in five lands in a merged-community optimum. CV fits use
// one start per fold, which keeps the 300 fold fits affordable.
GridResult run_grid() {
  GridResult out;
  for (double log_eta : {0.0, 3.0}) {
    for (double rho : {0.1, 0.3, 0.6}) {
      double auc = 0.0, cs = 0.0, cv = 0.0;
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto net = sample(grid_config(rho, std::exp(log_eta), seed));
        FitConfig c;
        c.k = 3;
        c.n_restarts = 5;
        c.pi_init = 1.0;
        c.rng_seed = seed;
        auto t0 = std::chrono::steady_clock::now();
        const auto r = fit(net.graph, c);
        auc += anomaly_auc(r.state.q, net.labels).value / 10.0;
        cs += cosine_similarity(net.ground_truth, r.theta).value / 10.0;
        out.fit_seconds += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        c.n_restarts = 1;
        cv += cv_link_prediction(net.graph, c, make_folds(500, 5, seed), seed).value / 10.0;
        out.cv_seconds += seconds_since(t0);
      }
      out.auc[{log_eta, rho}] = auc;
      out.cs[{log_eta, rho}] = cs;
      out.cv[{log_eta, rho}] = cv;
      std::printf("  grid log eta %.0f rho_a %.1f: anomaly AUC %.3f, CS %.3f, CV AUC %.3f\n",
                  log_eta, rho, auc, cs, cv);
      std::fflush(stdout);
    }
  }
  return out;
}

Outcome planted_recovery(const GridResult& r) {
  bool ok = r.fit_seconds <= 1800.0;
  std::string detail;
  for (double log_eta : {0.0, 3.0}) {
    for (double rho : {0.1, 0.3, 0.6}) ok = ok && r.auc.at({log_eta, rho}) >= 0.7;
    const double hi = r.cs.at({log_eta, 0.1}), lo = r.cs.at({log_eta, 0.6});
    ok = ok && hi > lo;
    detail += fmt("log eta %.0f: min AUC %.3f, CS(0.1) %.3f vs CS(0.6) %.3f; ", log_eta,
                  std::min({r.auc.at({log_eta, 0.1}), r.auc.at({log_eta, 0.3}),
                            r.auc.at({log_eta, 0.6})}),
                  hi, lo);
  }
  detail += fmt("fits %.0f s (limit 1800)", r.fit_seconds);
  return verdict(ok, detail);
}

Outcome reciprocity_effect(const GridResult& r) {
  double with = 0.0, without = 0.0;
  for (double rho : {0.1, 0.3, 0.6}) {
    with += r.cv.at({3.0, rho}) / 3.0;
    without += r.cv.at({0.0, rho}) / 3.0;
  }
  return verdict(with > without, fmt("mean CV AUC %.3f at log eta 3 vs %.3f at log eta 0; "
                                     "CV %.0f s",
                                     with, without, r.cv_seconds));
}

// ---- 8 ----------------------------------------------------------------------

struct Dataset {
  const char* file;
  double density;
  double pi_init;
  double precision;
};

Outcome real_data() {
  const char* root = std::getenv("CRAD_DATASETS");
  if (!root) return {Status::skip, "CRAD_DATASETS not set"};
  const Dataset sets[] = {{"vampire_bat.txt", 0.09, 0.1, 0.4},
                          {"uc_social.txt", 0.1, 0.3, 0.63},
                          {"pok.txt", 0.1, 0.3, 0.71}};
  bool ok = true, any = false;
  std::string detail;
  for (const auto& d : sets) {
    const fs::path path = fs::path(root) / d.file;
    if (!fs::exists(path)) {
      detail += fmt("%s missing; ", d.file);
      continue;
    }
    any = true;
    const auto g = load_edge_list(path).graph;
    if (std::string(d.file) == "vampire_bat.txt") {
      const double rec = reciprocity(g);
      const bool shape = g.n_nodes() == 19 && g.n_edges() == 103 && std::abs(rec - 0.64) <= 0.005;
      ok = ok && shape;
      detail += fmt("vampire bat N %zu E %zu reciprocity %.3f; ", g.n_nodes(), g.n_edges(), rec);
    }
    FitConfig c;
    c.k = 2;
    c.pi_init = d.pi_init;
    std::vector<std::uint64_t> seeds(10);
    for (std::size_t s = 0; s < seeds.size(); ++s) seeds[s] = s;
    const auto rep = inject_and_score(g, {d.density}, seeds, c).front();
    const bool hit = std::abs(rep.value - d.precision) <= 0.1;
    ok = ok && hit;
    detail += fmt("%s precision %.3f +- %.3f (expected %.2f +- 0.1); ", d.file, rep.value, rep.sd,
                  d.precision);
  }
  if (!any) return {Status::skip, detail + "no dataset found"};
  return verdict(ok, detail);
}

// ---- 9 ----------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = s.str();
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "crad_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto p = [&](const std::string& name) { return (root / name).string(); };

  // Silence the CLI's progress output while it runs.
  std::ostringstream sink;
  auto* out_buf = std::cout.rdbuf(sink.rdbuf());
  auto* err_buf = std::cerr.rdbuf(sink.rdbuf());

  using Args = std::vector<std::string>;
  const Args fit_flags = {"--k", "2", "--restarts", "2", "--max-iter", "100", "--seed", "5"};
  auto with = [](Args a, const Args& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const std::vector<std::pair<std::string, Args>> commands = {
      {"generate", {"generate", "--n", "80", "--k", "2", "--avg-degree", "10", "--eta", "5",
                    "--rho-a", "0.2", "--seed", "9"}},
      {"inject", {"inject", "--input", p("generate_a/graph.txt"), "--density", "0.1", "--seed",
                  "4"}},
      {"infer", with({"infer", "--input", p("inject_a/graph.txt"), "--threads", "2"}, fit_flags)},
      {"evaluate auc", {"evaluate", "--metric", "auc", "--graph", p("inject_a/graph.txt"), "--q",
                        p("infer_a/q.txt"), "--labels", p("inject_a/labels.txt")}},
      {"evaluate precision",
       {"evaluate", "--metric", "precision", "--graph", p("inject_a/graph.txt"), "--q",
        p("infer_a/q.txt"), "--labels", p("inject_a/labels.txt")}},
      {"evaluate cs", {"evaluate", "--metric", "cs", "--truth", p("generate_a/theta.json"),
                       "--theta", p("infer_a/theta.json")}},
      {"cv", with({"cv", "--input", p("generate_a/graph.txt"), "--folds", "3"}, fit_flags)},
  };

  bool ok = true;
  std::string detail;
  std::size_t compared = 0;
  for (const auto& [name, args] : commands) {
    std::string tag = name;
    std::replace(tag.begin(), tag.end(), ' ', '_');
    bool same = true;
    for (const char* run : {"_a", "_b"}) {
      if (cli::run(with(args, {"--out", p(tag + run)})) != 0) same = false;
    }
    if (same) {
      const auto a = snapshot(root / (tag + "_a")), b = snapshot(root / (tag + "_b"));
      same = !a.empty() && a == b;
      compared += a.size();
    }
    ok = ok && same;
    if (!same) detail += name + " differs; ";
  }
  std::cout.rdbuf(out_buf);
  std::cerr.rdbuf(err_buf);
  fs::remove_all(root);
  return verdict(ok, detail + fmt("%zu subcommand runs, %zu output files byte-identical",
                                  commands.size(), ok ? compared : 0));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto selected = [&](int c) { return wanted.empty() || wanted.contains(c); };

  bool failed = false;
  auto report = [&](int c, const Outcome& o, double seconds) {
    const char* s = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    std::printf("criterion %d: %s  %s  [%.1f s]\n", c, s, o.detail.c_str(), seconds);
    std::fflush(stdout);
    failed = failed || o.status == Status::fail;
  };
  auto timed = [&](int c, double limit, const std::function<Outcome()>& f) {
    if (!selected(c)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit > 0.0 && s > limit && o.status == Status::pass) {
      o = {Status::fail, o.detail + fmt("; over the %.0f s limit", limit)};
    }
    report(c, o, s);
  };

  timed(1, 5.0, normalization);
  timed(2, 10.0, oracle_equivalence);
  timed(3, 120.0, monotonicity);
  timed(4, 0.0, reduction);
  timed(5, 120.0, calibration);
  if (selected(6) || selected(7)) {
    try {
      const auto grid = run_grid();
      if (selected(6)) report(6, planted_recovery(grid), grid.fit_seconds);
      if (selected(7)) report(7, reciprocity_effect(grid), grid.cv_seconds);
    } catch (const std::exception& e) {
      for (int c : {6, 7})
        if (selected(c)) report(c, {Status::fail, std::string("error: ") + e.what()}, 0.0);
    }
  }
  timed(8, 0.0, real_data);
  timed(9, 0.0, determinism);
  return failed ? 1 : 0;
}
