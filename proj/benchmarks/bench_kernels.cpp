#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "skipdisk/bf16.hpp"
#include "skipdisk/common.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/distance.hpp"
#include "skipdisk/pca.hpp"
#include "skipdisk/pivots.hpp"
#include "skipdisk/pq.hpp"

namespace {

using namespace skipdisk;

std::vector<float> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.normal());
  return v;
}

void bm_l2_sq(benchmark::State& state) {
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  std::vector<float> a = random_vec(d, 1), b = random_vec(d, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(l2_sq(a.data(), b.data(), d));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_l2_sq)->Arg(64)->Arg(128)->Arg(256)->Arg(768);

void bm_l2_sq_bf16(benchmark::State& state) {
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  std::vector<float> a = random_vec(d, 3);
  std::vector<float> bf = random_vec(d, 4);
  std::vector<Bf16> b(d);
  bf16_encode(bf.data(), b.data(), d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(l2_sq_bf16(a.data(), b.data(), d));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_l2_sq_bf16)->Arg(64)->Arg(128)->Arg(256)->Arg(768);

void bm_bf16_encode(benchmark::State& state) {
  const std::size_t d = static_cast<std::size_t>(state.range(0));
  std::vector<float> a = random_vec(d, 5);
  std::vector<Bf16> out(d);
  for (auto _ : state) {
    bf16_encode(a.data(), out.data(), d);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * d * 4);
}
BENCHMARK(bm_bf16_encode)->Arg(128)->Arg(768);

struct PqFixture {
  PqCodebook book;
  PqCodes codes;
  std::vector<float> query;

  explicit PqFixture(std::uint32_t d_pq) {
    SyntheticSpec spec;
    spec.n = 4000;
    spec.dim = d_pq;
    spec.seed = 11;
    VectorDataset data = gen_synthetic(spec);
    book = train_pq(data, 4, 4, 11);
    codes = pq_encode_all(book, data);
    query = random_vec(d_pq, 12);
  }
};

void bm_build_lut(benchmark::State& state) {
  static PqFixture fx(static_cast<std::uint32_t>(256));
  for (auto _ : state) {
    QueryLut lut = build_lut(fx.book, fx.query);
    benchmark::DoNotOptimize(lut.data());
  }
}
BENCHMARK(bm_build_lut);

void bm_adc_distance(benchmark::State& state) {
  static PqFixture fx(static_cast<std::uint32_t>(256));
  QueryLut lut = build_lut(fx.book, fx.query);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        adc_distance(lut, fx.codes.row(i), fx.book.m));
    i = (i + 1) % 4000;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_adc_distance);

void bm_lower_bound(benchmark::State& state) {
  const std::uint32_t d = 128;
  SyntheticSpec spec;
  spec.n = 10000;
  spec.dim = d;
  spec.seed = 21;
  static VectorDataset data = gen_synthetic(spec);
  static std::vector<std::uint8_t> resident(10000, 1);
  static PivotStore store =
      build_pivots(data, resident, PivotPrecision::bf16);
  std::vector<float> q = random_vec(d, 22);
  PointId id = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lower_bound(store, q, id));
    id = (id + 1) % 10000;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_lower_bound);

void bm_pca_apply(benchmark::State& state) {
  const std::uint32_t dim = 768;
  const std::uint32_t d_out = static_cast<std::uint32_t>(state.range(0));
  SyntheticSpec spec;
  spec.n = 2000;
  spec.dim = dim;
  spec.seed = 31;
  static VectorDataset data = gen_synthetic(spec);
  static PcaModel model = fit_pca(data, 2000, 31);
  std::vector<float> q = random_vec(dim, 32);
  std::vector<float> out(d_out);
  for (auto _ : state) {
    pca_apply(model, q, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_pca_apply)->Arg(128)->Arg(256)->Arg(768);

}  // namespace
