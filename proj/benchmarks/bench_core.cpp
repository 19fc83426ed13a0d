#include <benchmark/benchmark.h>

#include "crad/generator.hpp"
#include "crad/inference.hpp"
#include "crad/model.hpp"

namespace {

crad::GeneratorConfig network_config(std::size_t n) {
  crad::GeneratorConfig c;
  c.n_nodes = n;
  c.k = 3;
  c.target_edges = 60.0 * static_cast<double>(n);
  c.anomaly_density = 0.2;
  c.eta = 20.0;
  c.seed = 1;
  return c;
}

struct Fixture {
  crad::SyntheticNetwork net;
  crad::LatentParameters theta;
  crad::VariationalState state;

  explicit Fixture(std::size_t n) : net(crad::sample(network_config(n))) {
    crad::FitConfig c;
    c.k = 3;
    theta = crad::initial_parameters(n, c, 7);
    state.k = theta.k();
    state.rho = crad::e_step_rho(theta, net.graph);
    state.q = crad::e_step_q(theta, net.graph);
  }
};

void BM_EStepQ(benchmark::State& s) {
  const Fixture f(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(crad::e_step_q(f.theta, f.net.graph));
  s.SetItemsProcessed(s.iterations() * s.range(0) * (s.range(0) - 1) / 2);
}
BENCHMARK(BM_EStepQ)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MStepMemberships(benchmark::State& s) {
  const Fixture f(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) {
    benchmark::DoNotOptimize(crad::m_step_memberships(f.theta, f.net.graph, f.state));
  }
}
BENCHMARK(BM_MStepMemberships)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LogPosterior(benchmark::State& s) {
  const Fixture f(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) {
    benchmark::DoNotOptimize(crad::log_posterior(f.theta, f.net.graph, f.state.q));
  }
}
BENCHMARK(BM_LogPosterior)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& s) {
  const auto c = network_config(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(crad::sample(c));
}
BENCHMARK(BM_Sample)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
