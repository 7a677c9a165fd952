#include <benchmark/benchmark.h>

#include "sdp/countmin.hpp"
#include "sdp/hadamard.hpp"
#include "sdp/rangetree.hpp"
#include "sdp/rng.hpp"

namespace {

void BM_HadRandomize(benchmark::State& state) {
  sdp::HadParams p;
  p.n = 1024;
  p.domain_size = static_cast<std::uint64_t>(state.range(0));
  p.tau = 10;
  p.rho = 32;
  p.k = 1;
  const sdp::UserInput input({3});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sdp::randomize_had(input, p, ++seed, 0));
  }
  state.SetItemsProcessed(state.iterations() * (p.rho + p.k));
}
BENCHMARK(BM_HadRandomize)->Arg(1 << 10)->Arg(1 << 16);

void BM_HadKernelAnalyze(benchmark::State& state) {
  sdp::HadParams p;
  p.n = 1024;
  p.domain_size = static_cast<std::uint64_t>(state.range(0));
  p.tau = 10;
  p.rho = 0;
  p.k = 1;
  sdp::RandomStream rng(7);
  std::vector<sdp::HadMessage> messages;
  for (int i = 0; i < 4096; ++i) {
    sdp::HadMessage m(p.tau);
    for (auto& s : m) {
      s = static_cast<std::uint32_t>(rng.uniform_below(2 * p.domain_size) + 1);
    }
    messages.push_back(std::move(m));
  }
  for (auto _ : state) {
    sdp::HadRawAccumulator acc(p);
    for (const auto& m : messages) acc.add(m);
    benchmark::DoNotOptimize(acc.raw_counts());
  }
  state.SetItemsProcessed(state.iterations() * messages.size());
}
BENCHMARK(BM_HadKernelAnalyze)->Arg(1 << 10)->Arg(1 << 16);

// Single-query scan over the stored tuples; linear in the batch size.
void BM_HadOracleQuery(benchmark::State& state) {
  sdp::HadParams p;
  p.n = static_cast<std::uint64_t>(state.range(0));
  p.domain_size = 1 << 10;
  p.tau = 10;
  p.rho = 3;
  p.k = 1;
  sdp::HadBatch batch;
  for (std::uint64_t u = 0; u < p.n; ++u) {
    for (const auto& m :
         sdp::randomize_had(sdp::UserInput({5}), p, 99, u)) {
      batch.add(m);
    }
  }
  const sdp::HadOracle oracle = sdp::build_oracle_had(batch, p);
  std::uint32_t j = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.query(j % 1024 + 1));
    ++j;
  }
  state.SetItemsProcessed(state.iterations() * batch.total_messages());
}
BENCHMARK(BM_HadOracleQuery)->Arg(256)->Arg(1024)->Arg(4096);

void BM_HashEval(benchmark::State& state) {
  const sdp::HashFamily family(8, 1 << 16, 42);
  std::uint32_t j = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(family.eval(1 + (j & 7), j % 100000 + 1));
    ++j;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HashEval);

void BM_CMRandomize(benchmark::State& state) {
  sdp::CMParams p;
  p.n = 100000;
  p.domain_size = 1 << 16;
  p.rows = 14;
  p.buckets = 1 << 15;
  p.k = 1;
  p.gamma = static_cast<double>(state.range(0)) / 1000.0;
  const sdp::HashFamily family(p.rows, p.buckets, 42);
  const sdp::UserInput input({12345});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sdp::randomize_cm(input, p, family, ++seed, 0));
  }
}
BENCHMARK(BM_CMRandomize)->Arg(1)->Arg(10);

void BM_RangeDecomposition(benchmark::State& state) {
  const std::uint64_t b = static_cast<std::uint64_t>(state.range(0));
  sdp::RandomStream rng(3);
  for (auto _ : state) {
    std::uint64_t lo = rng.uniform_below(b) + 1;
    std::uint64_t hi = rng.uniform_below(b) + 1;
    if (lo > hi) std::swap(lo, hi);
    benchmark::DoNotOptimize(sdp::range_decomposition(lo, hi, b));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RangeDecomposition)->Arg(1 << 10)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
