#include <benchmark/benchmark.h>

#include "uwfd/dfe.hpp"
#include "uwfd/experiments.hpp"
#include "uwfd/random.hpp"
#include "uwfd/receiver.hpp"
#include "uwfd/rls.hpp"
#include "uwfd/waveform.hpp"

using namespace uwfd;

static void BM_RlsUpdate(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  auto rng = make_stream(1, {});
  auto st = rls_init(dim, 0.98, 1e-4);
  std::vector<Eigen::VectorXcd> v(64, Eigen::VectorXcd(dim));
  for (auto& x : v)
    for (auto& e : x) e = complex_gaussian(rng, 1.0);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rls_update(st, v[k++ % v.size()], complex_gaussian(rng, 1.0)));
  }
}
BENCHMARK(BM_RlsUpdate)->Arg(30)->Arg(100);

static void BM_DesignDfe(benchmark::State& state) {
  auto rng = make_stream(2, {});
  CVec g(70);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = complex_gaussian(rng, std::exp(-0.25 * static_cast<double>(k)));
  const int l_ff = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(design_dfe(g, 1e-3, l_ff, 50));
}
BENCHMARK(BM_DesignDfe)->Arg(70);

static void BM_ReceiverCycle(benchmark::State& state) {
  const auto mode = static_cast<ReceiverMode>(state.range(0));
  ExperimentConfig cfg;
  cfg.symbols = 4000;
  const auto link = make_realization(cfg, 3);
  const CVec training(link.x.begin(), link.x.begin() + cfg.training_symbols);
  Receiver rx(cfg.receiver_config(), mode, training);
  std::size_t n = 0;
  for (auto _ : state) {
    if (n == link.x.size()) {
      state.PauseTiming();
      rx = Receiver(cfg.receiver_config(), mode, training);
      n = 0;
      state.ResumeTiming();
    }
    const ChannelTruth truth{link.si.at(n), link.remote.at(n)};
    benchmark::DoNotOptimize(rx.cycle(link.rx.y[n], link.i_ref[n], &truth));
    ++n;
  }
  state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_ReceiverCycle)->DenseRange(0, 2);

static void BM_LocalReference(benchmark::State& state) {
  FrontEndConfig fe;
  auto rng = make_stream(4, {});
  const auto bits = random_bits(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(make_local_reference(bits, fe, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LocalReference)->Arg(10000);

BENCHMARK_MAIN();
