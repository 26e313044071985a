#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "skipdisk/common.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/distance.hpp"
#include "test_util.hpp"

using namespace skipdisk;
using test_util::TempDir;

TEST_SUITE("dataset") {

TEST_CASE("fvecs round-trip preserves bytes") {
  TempDir dir("fvecs");
  VectorDataset ds;
  ds.dim = 3;
  ds.data = {1.5f, -2.25f, 0.0f, 4.0f, 5.0f, -6.5f};
  auto p = dir.file("a.fvecs");
  write_fvecs(p, ds);
  VectorDataset back = read_fvecs(p);
  CHECK(back.dim == 3);
  CHECK(back.size() == 2);
  CHECK(back.data == ds.data);
}

TEST_CASE("ivecs round-trip preserves ids") {
  TempDir dir("ivecs");
  IdDataset ds;
  ds.k = 2;
  ds.data = {7, 9, 1, 0};
  auto p = dir.file("a.ivecs");
  write_ivecs(p, ds);
  IdDataset back = read_ivecs(p);
  CHECK(back.k == 2);
  CHECK(back.size() == 2);
  CHECK(back.data == ds.data);
}

TEST_CASE("bvecs records widen to float") {
  TempDir dir("bvecs");
  auto p = dir.file("a.bvecs");
  {
    std::ofstream f(p, std::ios::binary);
    std::int32_t d = 4;
    unsigned char payload[4] = {0, 1, 128, 255};
    f.write(reinterpret_cast<char*>(&d), 4);
    f.write(reinterpret_cast<char*>(payload), 4);
  }
  VectorDataset ds = read_bvecs(p);
  CHECK(ds.dim == 4);
  CHECK(ds.size() == 1);
  CHECK(ds.data == std::vector<float>{0.0f, 1.0f, 128.0f, 255.0f});
}

TEST_CASE("malformed files are rejected") {
  TempDir dir("bad");

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_fvecs(dir.file("nope.fvecs")), IoError);
  }
  SUBCASE("inconsistent dimension") {
    auto p = dir.file("dims.fvecs");
    std::ofstream f(p, std::ios::binary);
    std::int32_t d1 = 2, d2 = 3;
    float v[3] = {1, 2, 3};
    f.write(reinterpret_cast<char*>(&d1), 4);
    f.write(reinterpret_cast<char*>(v), 8);
    f.write(reinterpret_cast<char*>(&d2), 4);
    f.write(reinterpret_cast<char*>(v), 12);
    f.close();
    CHECK_THROWS_AS(read_fvecs(p), DataError);
  }
  SUBCASE("truncated record") {
    auto p = dir.file("trunc.fvecs");
    std::ofstream f(p, std::ios::binary);
    std::int32_t d = 4;
    float v[2] = {1, 2};
    f.write(reinterpret_cast<char*>(&d), 4);
    f.write(reinterpret_cast<char*>(v), 8);
    f.close();
    CHECK_THROWS_AS(read_fvecs(p), DataError);
  }
  SUBCASE("non-finite payload") {
    auto p = dir.file("nan.fvecs");
    std::ofstream f(p, std::ios::binary);
    std::int32_t d = 2;
    float v[2] = {1.0f, std::numeric_limits<float>::quiet_NaN()};
    f.write(reinterpret_cast<char*>(&d), 4);
    f.write(reinterpret_cast<char*>(v), 8);
    f.close();
    CHECK_THROWS_AS(read_fvecs(p), DataError);
  }
  SUBCASE("nonpositive dimension") {
    auto p = dir.file("zero.fvecs");
    std::ofstream f(p, std::ios::binary);
    std::int32_t d = 0;
    f.write(reinterpret_cast<char*>(&d), 4);
    f.close();
    CHECK_THROWS_AS(read_fvecs(p), DataError);
  }
}

TEST_CASE("synthetic generation is deterministic") {
  SyntheticSpec spec;
  spec.n = 500;
  spec.dim = 16;
  spec.seed = 31;
  VectorDataset a = gen_synthetic(spec);
  VectorDataset b = gen_synthetic(spec);
  CHECK(a.data == b.data);
  spec.seed = 32;
  VectorDataset c = gen_synthetic(spec);
  CHECK(a.data != c.data);
}

TEST_CASE("gaussian coordinates match N(0,1) moments") {
  SyntheticSpec spec;
  spec.n = 100000;
  spec.dim = 8;
  spec.seed = 77;
  VectorDataset ds = gen_synthetic(spec);
  double sum = 0, sum_sq = 0;
  for (float x : ds.data) {
    sum += x;
    sum_sq += static_cast<double>(x) * x;
  }
  double m = ds.data.size();
  double mean = sum / m;
  double var = sum_sq / m - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("clustered model with one cluster is a shifted gaussian") {
  SyntheticSpec spec;
  spec.n = 20000;
  spec.dim = 8;
  spec.model = SyntheticModel::clustered;
  spec.clusters = 1;
  spec.seed = 123;
  VectorDataset ds = gen_synthetic(spec);
  // Every point is center + unit noise: per-coordinate stddev about 1,
  // and the shared center (scale 4) shows up in the coordinate means.
  double max_abs_mean = 0;
  for (std::uint32_t j = 0; j < spec.dim; ++j) {
    double sum = 0, sum_sq = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      double x = ds.vec(i)[j];
      sum += x;
      sum_sq += x * x;
    }
    double mean = sum / static_cast<double>(ds.size());
    double var = sum_sq / static_cast<double>(ds.size()) - mean * mean;
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(0.05));
    max_abs_mean = std::max(max_abs_mean, std::abs(mean));
  }
  CHECK(max_abs_mean > 0.5);
}

TEST_CASE("clustered data groups around its centers") {
  SyntheticSpec spec;
  spec.n = 4000;
  spec.dim = 16;
  spec.model = SyntheticModel::clustered;
  spec.clusters = 8;
  spec.seed = 5;
  VectorDataset ds = gen_synthetic(spec);
  CHECK(ds.size() == 4000);
  // Coordinate variance is center variance plus noise variance, so it
  // must exceed the unit noise floor by a wide margin.
  double sum = 0, sum_sq = 0;
  for (float x : ds.data) {
    sum += x;
    sum_sq += static_cast<double>(x) * x;
  }
  double m = ds.data.size();
  double var = sum_sq / m - (sum / m) * (sum / m);
  CHECK(var > 4.0);
}

TEST_CASE("brute_force_knn matches a hand-checked layout") {
  VectorDataset base;
  base.dim = 1;
  base.data = {0.0f, 10.0f, 1.0f, 5.0f};
  VectorDataset queries;
  queries.dim = 1;
  queries.data = {0.9f, 7.9f};
  KnnResult r = brute_force_knn(base, queries, 2);
  CHECK(r.k == 2);
  // Query 0.9: nearest 1.0 (id 2) then 0.0 (id 0).
  CHECK(r.ids[0] == 2);
  CHECK(r.ids[1] == 0);
  // Query 7.9: nearest 10.0 (id 1) then 5.0 (id 3).
  CHECK(r.ids[2] == 1);
  CHECK(r.ids[3] == 3);
  CHECK(r.dist_sq[0] == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(r.dist_sq[2] == doctest::Approx(4.41).epsilon(1e-4));
}

TEST_CASE("brute_force_knn breaks exact ties by ascending id") {
  VectorDataset base;
  base.dim = 2;
  base.data = {1.0f, 0.0f, 1.0f, 0.0f, 3.0f, 0.0f, 1.0f, 0.0f};
  VectorDataset queries;
  queries.dim = 2;
  queries.data = {1.0f, 0.0f};
  KnnResult r = brute_force_knn(base, queries, 3);
  CHECK(r.ids[0] == 0);
  CHECK(r.ids[1] == 1);
  CHECK(r.ids[2] == 3);
}

TEST_CASE("brute_force_knn agrees with an independent scan") {
  VectorDataset base = test_util::make_gaussian(300, 12, 901);
  VectorDataset queries = test_util::make_gaussian(10, 12, 902);
  KnnResult r = brute_force_knn(base, queries, 5);
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    std::vector<std::pair<float, std::uint32_t>> all;
    for (std::size_t i = 0; i < base.size(); ++i) {
      all.push_back({l2_sq_scalar(queries.vec(qi).data(), base.vec(i).data(),
                                  base.dim),
                     static_cast<std::uint32_t>(i)});
    }
    std::sort(all.begin(), all.end());
    for (std::uint32_t j = 0; j < 5; ++j) {
      CHECK(r.ids[qi * 5 + j] == all[j].second);
    }
  }
}

TEST_CASE("recall_at_k counts membership") {
  std::vector<std::uint32_t> truth = {1, 2, 3, 4};
  std::vector<std::uint32_t> exact = {4, 3, 2, 1};
  std::vector<std::uint32_t> half = {1, 2, 9, 8};
  std::vector<std::uint32_t> none = {5, 6, 7, 8};
  CHECK(recall_at_k(exact, truth, 4) == 1.0);
  CHECK(recall_at_k(half, truth, 4) == 0.5);
  CHECK(recall_at_k(none, truth, 4) == 0.0);
  CHECK(recall_at_k(half, truth, 2) == 1.0);
}

}  // TEST_SUITE
