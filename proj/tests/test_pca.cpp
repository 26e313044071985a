#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "skipdisk/common.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/distance.hpp"
#include "skipdisk/pca.hpp"
#include "test_util.hpp"

using namespace skipdisk;

namespace {

// Anisotropic data: iid gaussian coordinates scaled so coordinate j has
// stddev (dim - j).  The principal axes are the coordinate axes.
VectorDataset make_scaled(std::size_t n, std::uint32_t dim,
                          std::uint64_t seed) {
  VectorDataset ds = test_util::make_gaussian(n, dim, seed);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = ds.vec(i);
    for (std::uint32_t j = 0; j < dim; ++j) {
      v[j] *= static_cast<float>(dim - j);
    }
  }
  return ds;
}

}  // namespace

TEST_SUITE("pca") {

TEST_CASE("rotation rows are orthonormal") {
  VectorDataset ds = test_util::make_gaussian(2000, 24, 301);
  PcaModel m = fit_pca(ds, 100000, 1);
  REQUIRE(m.dim == 24);
  for (std::uint32_t i = 0; i < m.dim; ++i) {
    for (std::uint32_t j = i; j < m.dim; ++j) {
      double dot = 0;
      for (std::uint32_t c = 0; c < m.dim; ++c) {
        dot += static_cast<double>(m.rotation[i * m.dim + c]) *
               m.rotation[j * m.dim + c];
      }
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-4).scale(1));
    }
  }
}

TEST_CASE("eigenvalues descend and follow planted variances") {
  VectorDataset ds = make_scaled(4000, 8, 302);
  PcaModel m = fit_pca(ds, 100000, 2);
  for (std::uint32_t j = 1; j < m.dim; ++j) {
    CHECK(m.eigenvalues[j - 1] >= m.eigenvalues[j]);
  }
  // Component j should recover variance (dim - j)^2 within sampling noise.
  for (std::uint32_t j = 0; j < m.dim; ++j) {
    double expected = static_cast<double>((8 - j) * (8 - j));
    CHECK(m.eigenvalues[j] == doctest::Approx(expected).epsilon(0.15));
  }
  // With axis-aligned components, row j concentrates on coordinate j.
  for (std::uint32_t j = 0; j < m.dim; ++j) {
    float diag = std::abs(m.rotation[j * m.dim + j]);
    CHECK(diag > 0.95f);
  }
}

TEST_CASE("sign convention makes the largest row coefficient positive") {
  VectorDataset ds = make_scaled(3000, 6, 303);
  PcaModel m = fit_pca(ds, 100000, 3);
  for (std::uint32_t j = 0; j < m.dim; ++j) {
    float best = 0.0f;
    for (std::uint32_t c = 0; c < m.dim; ++c) {
      float v = m.rotation[j * m.dim + c];
      if (std::abs(v) > std::abs(best)) best = v;
    }
    CHECK(best > 0.0f);
  }
}

TEST_CASE("mean matches the sample mean when the sample is the dataset") {
  VectorDataset ds = test_util::make_gaussian(1500, 5, 304);
  PcaModel m = fit_pca(ds, 100000, 4);
  for (std::uint32_t j = 0; j < 5; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) s += ds.vec(i)[j];
    CHECK(m.mean[j] ==
          doctest::Approx(s / static_cast<double>(ds.size())).epsilon(1e-4));
  }
}

TEST_CASE("prefix distances are monotone and bounded by the full distance") {
  VectorDataset ds = test_util::make_gaussian(600, 32, 305);
  PcaModel m = fit_pca(ds, 100000, 5);
  VectorDataset red = pca_apply_batch(m, ds, 32);
  Rng rng(306);
  for (int rep = 0; rep < 2000; ++rep) {
    std::size_t a = rng.bounded(ds.size());
    std::size_t b = rng.bounded(ds.size());
    float full_original = l2_sq(ds.vec(a).data(), ds.vec(b).data(), 32);
    float prev = 0.0f;
    for (std::uint32_t d : {1u, 8u, 16u, 32u}) {
      float part = l2_sq(red.vec(a).data(), red.vec(b).data(), d);
      CHECK(part >= prev * (1.0f - 1e-6f));
      CHECK(part <= full_original * (1.0f + 1e-5f) + 1e-5f);
      prev = part;
    }
    // The orthonormal rotation preserves the full-dimension distance.
    CHECK(prev == doctest::Approx(full_original).epsilon(1e-3).scale(1));
  }
}

TEST_CASE("short applications agree with prefixes of longer ones bitwise") {
  VectorDataset ds = test_util::make_gaussian(400, 20, 307);
  PcaModel m = fit_pca(ds, 100000, 6);
  std::vector<float> full(20), half(10), one(1);
  for (std::size_t i = 0; i < 50; ++i) {
    pca_apply(m, ds.vec(i), full);
    pca_apply(m, ds.vec(i), half);
    pca_apply(m, ds.vec(i), one);
    CHECK(std::memcmp(half.data(), full.data(), 10 * sizeof(float)) == 0);
    CHECK(std::memcmp(one.data(), full.data(), sizeof(float)) == 0);
  }
  VectorDataset batch = pca_apply_batch(m, ds, 10);
  for (std::size_t i = 0; i < 50; ++i) {
    pca_apply(m, ds.vec(i), half);
    CHECK(std::memcmp(batch.vec(i).data(), half.data(),
                      10 * sizeof(float)) == 0);
  }
}

TEST_CASE("fits are deterministic in data, cap and seed") {
  VectorDataset ds = test_util::make_gaussian(3000, 12, 308);
  PcaModel a = fit_pca(ds, 1000, 9);
  PcaModel b = fit_pca(ds, 1000, 9);
  CHECK(a.rotation == b.rotation);
  CHECK(a.mean == b.mean);
  CHECK(a.eigenvalues == b.eigenvalues);
  // A different sample seed fits on a different subset.
  PcaModel c = fit_pca(ds, 1000, 10);
  CHECK(a.rotation != c.rotation);
}

}  // TEST_SUITE
