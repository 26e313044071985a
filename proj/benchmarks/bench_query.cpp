#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "skipdisk/dataset.hpp"
#include "skipdisk/index.hpp"
#include "skipdisk/search.hpp"

namespace {

using namespace skipdisk;

// End-to-end query latency over a small self-built index.  The build
// runs once per process; files live under the system temp directory.
struct IndexFixture {
  std::filesystem::path index_path;
  std::filesystem::path store_path;
  SkipDiskIndex index;
  VectorDataset queries;

  IndexFixture() {
    SyntheticSpec spec;
    spec.n = 5000;
    spec.dim = 64;
    spec.seed = 81;
    VectorDataset data = gen_synthetic(spec);
    spec.n = 64;
    spec.seed = 82;
    queries = gen_synthetic(spec);

    IndexConfig cfg;
    cfg.variant = Variant::pb;
    cfg.d_pq = 64;
    cfg.d_lb = 64;
    cfg.d_dade = 32;
    cfg.sub_dim = 4;
    cfg.pq_iters = 6;
    cfg.r = 24;
    cfg.l_build = 48;
    auto dir = std::filesystem::temp_directory_path();
    index_path = dir / "skipdisk_bench.skix";
    store_path = dir / "skipdisk_bench.skdv";
    index = build_index(data, cfg, 83, index_path, store_path);
  }
  ~IndexFixture() {
    index.store.reset();
    std::error_code ec;
    std::filesystem::remove(index_path, ec);
    std::filesystem::remove(store_path, ec);
  }
};

IndexFixture& fixture() {
  static IndexFixture f;
  return f;
}

void bm_search_sim(benchmark::State& state) {
  auto& f = fixture();
  SearchParams p;
  p.k = 10;
  p.l = static_cast<std::uint32_t>(state.range(0));
  p.b = 32;
  p.io.kind = IoBackendConfig::Kind::simulated;
  std::size_t qi = 0;
  for (auto _ : state) {
    p.io.seed = qi;
    SearchResult r = search(f.index, f.queries.vec(qi), p);
    benchmark::DoNotOptimize(r.ids.data());
    qi = (qi + 1) % f.queries.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_search_sim)->Arg(50)->Arg(100)->Arg(200);

void bm_search_real(benchmark::State& state) {
  auto& f = fixture();
  SearchParams p;
  p.k = 10;
  p.l = static_cast<std::uint32_t>(state.range(0));
  p.b = 32;
  std::size_t qi = 0;
  for (auto _ : state) {
    SearchResult r = search(f.index, f.queries.vec(qi), p);
    benchmark::DoNotOptimize(r.ids.data());
    qi = (qi + 1) % f.queries.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_search_real)->Arg(100);

void bm_search_baseline_sim(benchmark::State& state) {
  auto& f = fixture();
  SearchParams p;
  p.k = 10;
  p.l = 100;
  p.b = 1;
  p.io.kind = IoBackendConfig::Kind::simulated;
  std::size_t qi = 0;
  for (auto _ : state) {
    p.io.seed = qi;
    SearchResult r = search_baseline(f.index, f.queries.vec(qi), p);
    benchmark::DoNotOptimize(r.ids.data());
    qi = (qi + 1) % f.queries.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_search_baseline_sim);

}  // namespace

BENCHMARK_MAIN();
