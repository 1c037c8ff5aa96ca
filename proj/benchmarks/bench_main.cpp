#include <benchmark/benchmark.h>

#include <random>

#include "meshpress/codec.hpp"
#include "meshpress/entropy.hpp"
#include "meshpress/hierarchy.hpp"
#include "meshpress/metrics.hpp"
#include "meshpress/shapes.hpp"

namespace {

using namespace meshpress;

std::vector<std::size_t> skewed_symbols(std::size_t n, std::size_t alphabet) {
  std::mt19937_64 rng(11);
  std::geometric_distribution<std::size_t> g(0.2);
  std::vector<std::size_t> out(n);
  for (auto& s : out) s = std::min(g(rng), alphabet - 1);
  return out;
}

void BM_RangeEncode(benchmark::State& state) {
  const auto alphabet = static_cast<std::size_t>(state.range(0));
  const auto symbols = skewed_symbols(1 << 16, alphabet);
  for (auto _ : state) {
    RangeEncoder enc;
    AdaptiveModel m(alphabet);
    for (auto s : symbols) enc.encode(m, s);
    benchmark::DoNotOptimize(enc.finish());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(symbols.size()));
}
BENCHMARK(BM_RangeEncode)->Arg(2)->Arg(18)->Arg(256);

void BM_RangeDecode(benchmark::State& state) {
  const auto alphabet = static_cast<std::size_t>(state.range(0));
  const auto symbols = skewed_symbols(1 << 16, alphabet);
  RangeEncoder enc;
  AdaptiveModel m(alphabet);
  for (auto s : symbols) enc.encode(m, s);
  const auto bytes = enc.finish();
  for (auto _ : state) {
    RangeDecoder dec(bytes);
    AdaptiveModel d(alphabet);
    std::size_t sum = 0;
    for (std::size_t i = 0; i < symbols.size(); ++i) sum += dec.decode(d);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(symbols.size()));
}
BENCHMARK(BM_RangeDecode)->Arg(2)->Arg(18)->Arg(256);

void BM_BuildHierarchy(benchmark::State& state) {
  const TriMesh mesh = shapes::scanned_blob(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_hierarchy(mesh, WgcConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.vertex_count()));
}
BENCHMARK(BM_BuildHierarchy)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_Encode(benchmark::State& state) {
  const TriMesh mesh = shapes::cad_part();
  for (auto _ : state) benchmark::DoNotOptimize(encode(mesh));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.vertex_count()));
}
BENCHMARK(BM_Encode)->Unit(benchmark::kMillisecond);

void BM_Decode(benchmark::State& state) {
  const TriMesh mesh = shapes::cad_part();
  const auto bytes = encode(mesh).bytes;
  for (auto _ : state) benchmark::DoNotOptimize(decode(bytes));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.vertex_count()));
}
BENCHMARK(BM_Decode)->Unit(benchmark::kMillisecond);

void BM_SampledDistance(benchmark::State& state) {
  const TriMesh mesh = shapes::scanned_blob();
  const TriMesh base = decode(encode(mesh).bytes, 0).mesh;
  SamplingOptions opt;
  opt.samples_per_unit_area = density_for(mesh, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sampled_distance(mesh, base, opt));
}
BENCHMARK(BM_SampledDistance)->Arg(20'000)->Arg(200'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
