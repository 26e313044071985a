#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "skipdisk/async_io.hpp"
#include "skipdisk/common.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/disk_store.hpp"

namespace {

using namespace skipdisk;

// One shared on-disk store for every I/O benchmark; lives under the
// system temp directory for the process lifetime.
struct StoreFixture {
  std::filesystem::path path;
  std::unique_ptr<DiskStore> store;

  StoreFixture() {
    SyntheticSpec spec;
    spec.n = 4096;
    spec.dim = 128;
    spec.seed = 71;
    VectorDataset data = gen_synthetic(spec);
    path = std::filesystem::temp_directory_path() /
           "skipdisk_bench_store.skdv";
    write_store(data, path);
    store = std::make_unique<DiskStore>(path);
  }
  ~StoreFixture() {
    store.reset();
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

StoreFixture& fixture() {
  static StoreFixture f;
  return f;
}

void bm_read_sync(benchmark::State& state) {
  auto& f = fixture();
  std::vector<float> buf(128);
  PointId id = 0;
  for (auto _ : state) {
    f.store->read_record(id, buf.data());
    benchmark::DoNotOptimize(buf.data());
    id = (id + 1) % 4096;
  }
  state.SetBytesProcessed(state.iterations() *
                          f.store->layout().record_size);
}
BENCHMARK(bm_read_sync);

void bm_async_queue_real(benchmark::State& state) {
  auto& f = fixture();
  const std::uint32_t depth = static_cast<std::uint32_t>(state.range(0));
  IoBackendConfig cfg;
  std::uint64_t done = 0;
  PointId id = 0;
  for (auto _ : state) {
    AsyncReadQueue queue(*f.store, depth, cfg);
    for (std::uint32_t i = 0; i < depth; ++i) {
      queue.issue_read(id);
      id = (id + 1) % 4096;
    }
    while (queue.pending() > 0) {
      done += queue.poll_completions().size();
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(done));
}
BENCHMARK(bm_async_queue_real)->Arg(1)->Arg(8)->Arg(32);

void bm_async_queue_sim(benchmark::State& state) {
  auto& f = fixture();
  const std::uint32_t depth = static_cast<std::uint32_t>(state.range(0));
  IoBackendConfig cfg;
  cfg.kind = IoBackendConfig::Kind::simulated;
  cfg.seed = 7;
  std::uint64_t done = 0;
  PointId id = 0;
  for (auto _ : state) {
    AsyncReadQueue queue(*f.store, depth, cfg);
    for (std::uint32_t i = 0; i < depth; ++i) {
      queue.issue_read(id);
      id = (id + 1) % 4096;
    }
    while (queue.pending() > 0) {
      done += queue.poll_completions().size();
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(done));
}
BENCHMARK(bm_async_queue_sim)->Arg(8)->Arg(32);

}  // namespace
