#include <cstring>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "skipdisk/common.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/index.hpp"
#include "test_util.hpp"

using namespace skipdisk;
using test_util::TempDir;

namespace {

IndexConfig small_config(Variant v) {
  IndexConfig cfg;
  cfg.variant = v;
  cfg.d_pq = 24;
  cfg.d_lb = 24;
  cfg.d_dade = 12;
  cfg.sub_dim = 4;
  cfg.pq_iters = 4;
  cfg.r = 12;
  cfg.l_build = 24;
  cfg.keep_fraction = 0.5f;
  return cfg;
}

}  // namespace

TEST_SUITE("index") {

TEST_CASE("variant names round-trip") {
  for (Variant v :
       {Variant::base, Variant::pb, Variant::pbc, Variant::est}) {
    CHECK(variant_from_name(variant_name(v)) == v);
  }
  CHECK_THROWS_AS(variant_from_name("hnsw"), ConfigError);
}

TEST_CASE("clamp_prefixes shrinks to the data dimension") {
  IndexConfig cfg;  // defaults: d_pq 256, d_lb 256, d_dade 128
  cfg.clamp_prefixes(32);
  CHECK(cfg.d_pq == 32);
  CHECK(cfg.d_lb == 32);
  CHECK(cfg.d_dade == 32);
  IndexConfig wide;
  wide.clamp_prefixes(512);
  CHECK(wide.d_pq == 256);
  CHECK(wide.d_lb == 256);
  CHECK(wide.d_dade == 128);
}

TEST_CASE("validate rejects out-of-contract configurations") {
  IndexConfig good = small_config(Variant::pb);
  CHECK_NOTHROW(good.validate(24));

  auto bad = good;
  bad.d_pq = 0;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.d_pq = 48;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.d_lb = 25;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.d_dade = 0;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.sub_dim = 5;  // 24 % 5 != 0
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.pq_iters = 0;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.r = 1;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.l_build = 11;  // below r
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.alpha = 0.99f;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.keep_fraction = 0.0f;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.keep_fraction = 1.01f;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.p_s = 1.0f;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
  bad = good;
  bad.pca_sample_cap = 1;
  CHECK_THROWS_AS(bad.validate(24), ConfigError);
}

TEST_CASE("derived views follow the variant") {
  IndexConfig cfg = small_config(Variant::est);
  CHECK(cfg.pivot_prefix() == 12);
  CHECK(cfg.pivot_precision() == PivotPrecision::bf16);
  CHECK(cfg.resident_fraction() == 1.0f);
  cfg.variant = Variant::base;
  CHECK(cfg.pivot_prefix() == 24);
  CHECK(cfg.pivot_precision() == PivotPrecision::f32);
  cfg.variant = Variant::pbc;
  CHECK(cfg.resident_fraction() == 0.5f);
}

TEST_CASE("build, save and load round-trip every structure") {
  TempDir dir("index");
  VectorDataset data = test_util::make_gaussian(900, 24, 1001);
  IndexConfig cfg = small_config(Variant::est);
  SkipDiskIndex built = build_index(data, cfg, 55, dir.file("i.skix"),
                                    dir.file("i.skdv"));
  SkipDiskIndex loaded =
      load_index(dir.file("i.skix"), dir.file("i.skdv"), false);

  CHECK(loaded.n == 900);
  CHECK(loaded.dim == 24);
  CHECK(loaded.seed == 55);
  CHECK(loaded.config.variant == Variant::est);
  CHECK(loaded.config.d_dade == 12);
  CHECK(loaded.pca.rotation == built.pca.rotation);
  CHECK(loaded.pca.mean == built.pca.mean);
  CHECK(loaded.pq.centroids == built.pq.centroids);
  CHECK(loaded.codes.codes == built.codes.codes);
  CHECK(loaded.graph.adjacency == built.graph.adjacency);
  CHECK(loaded.graph.len == built.graph.len);
  CHECK(loaded.graph.entry == built.graph.entry);
  CHECK(loaded.pivots.d_prefix == built.pivots.d_prefix);
  CHECK(loaded.pivots.pivots_bf16 == built.pivots.pivots_bf16);
  CHECK(loaded.pivots.residuals == built.pivots.residuals);
  CHECK(loaded.calib.epsilon == built.calib.epsilon);
  CHECK(loaded.calib.sample_size == built.calib.sample_size);
  REQUIRE(loaded.store != nullptr);
  CHECK(loaded.store->layout().n == 900);
}

TEST_CASE("builds are bit-reproducible") {
  TempDir dir("det");
  VectorDataset data = test_util::make_gaussian(700, 16, 1002);
  IndexConfig cfg = small_config(Variant::pb);
  cfg.d_pq = 16;
  cfg.d_lb = 16;
  cfg.d_dade = 8;
  build_index(data, cfg, 9, dir.file("a.skix"), dir.file("a.skdv"));
  build_index(data, cfg, 9, dir.file("b.skix"), dir.file("b.skdv"));
  CHECK(test_util::read_file_bytes(dir.file("a.skix")) ==
        test_util::read_file_bytes(dir.file("b.skix")));
  CHECK(test_util::read_file_bytes(dir.file("a.skdv")) ==
        test_util::read_file_bytes(dir.file("b.skdv")));

  build_index(data, cfg, 10, dir.file("c.skix"), dir.file("c.skdv"));
  CHECK(test_util::read_file_bytes(dir.file("a.skix")) !=
        test_util::read_file_bytes(dir.file("c.skix")));
}

TEST_CASE("family builds match independent single builds byte for byte") {
  TempDir dir("family");
  VectorDataset data = test_util::make_gaussian(600, 16, 1003);
  IndexConfig pb = small_config(Variant::pb);
  pb.d_pq = 16;
  pb.d_lb = 16;
  pb.d_dade = 8;
  IndexConfig est = pb;
  est.variant = Variant::est;
  IndexConfig pbc = pb;
  pbc.variant = Variant::pbc;

  std::vector<IndexConfig> configs = {pb, est, pbc};
  std::vector<std::filesystem::path> paths = {
      dir.file("fam_pb.skix"), dir.file("fam_est.skix"),
      dir.file("fam_pbc.skix")};
  build_index_family(data, configs, 21, paths, dir.file("fam.skdv"));

  build_index(data, pb, 21, dir.file("one_pb.skix"), dir.file("one_pb.skdv"));
  build_index(data, est, 21, dir.file("one_est.skix"),
              dir.file("one_est.skdv"));
  build_index(data, pbc, 21, dir.file("one_pbc.skix"),
              dir.file("one_pbc.skdv"));

  CHECK(test_util::read_file_bytes(dir.file("fam_pb.skix")) ==
        test_util::read_file_bytes(dir.file("one_pb.skix")));
  CHECK(test_util::read_file_bytes(dir.file("fam_est.skix")) ==
        test_util::read_file_bytes(dir.file("one_est.skix")));
  CHECK(test_util::read_file_bytes(dir.file("fam_pbc.skix")) ==
        test_util::read_file_bytes(dir.file("one_pbc.skix")));
  CHECK(test_util::read_file_bytes(dir.file("fam.skdv")) ==
        test_util::read_file_bytes(dir.file("one_pb.skdv")));
}

TEST_CASE("family builds demand agreeing shared stages") {
  TempDir dir("fambad");
  VectorDataset data = test_util::make_gaussian(400, 16, 1004);
  IndexConfig a = small_config(Variant::pb);
  a.d_pq = 16;
  a.d_lb = 16;
  IndexConfig b = a;
  b.r = 10;  // graph stage differs
  std::vector<IndexConfig> configs = {a, b};
  std::vector<std::filesystem::path> paths = {dir.file("x.skix"),
                                              dir.file("y.skix")};
  CHECK_THROWS_AS(
      build_index_family(data, configs, 3, paths, dir.file("x.skdv")),
      ConfigError);
  std::vector<std::filesystem::path> short_paths = {dir.file("x.skix")};
  CHECK_THROWS_AS(
      build_index_family(data, configs, 3, short_paths, dir.file("x.skdv")),
      ConfigError);
}

TEST_CASE("memory accounting matches the closed forms") {
  TempDir dir("mem");
  const std::size_t n = 700;
  VectorDataset data = test_util::make_gaussian(n, 16, 1005);
  IndexConfig cfg = small_config(Variant::pbc);
  cfg.d_pq = 16;
  cfg.d_lb = 16;
  cfg.d_dade = 8;
  SkipDiskIndex idx =
      build_index(data, cfg, 4, dir.file("m.skix"), dir.file("m.skdv"));
  MemoryAccounting acc = account_memory(idx);

  const std::uint64_t m = 16 / 4;
  const std::uint64_t resident = (n + 1) / 2;  // ceil(keep_fraction * n)
  CHECK(idx.pivots.resident_count() == resident);
  CHECK(acc.graph_bytes == 4ull * cfg.r * n + n);
  CHECK(acc.pq_code_bytes == n * m);
  CHECK(acc.pq_codebook_bytes == m * 256ull * 4 * 4);
  CHECK(acc.pivot_bytes == resident * 2ull * cfg.d_lb);
  CHECK(acc.residual_bytes == resident * 4ull);
  CHECK(acc.bitmap_bytes == (n + 7) / 8);
  CHECK(acc.total() == acc.graph_bytes + acc.pq_code_bytes +
                           acc.pq_codebook_bytes + acc.pivot_bytes +
                           acc.residual_bytes + acc.bitmap_bytes);
}

TEST_CASE("corrupt index files are rejected") {
  TempDir dir("corrupt");
  VectorDataset data = test_util::make_gaussian(400, 16, 1006);
  IndexConfig cfg = small_config(Variant::pb);
  cfg.d_pq = 16;
  cfg.d_lb = 16;
  build_index(data, cfg, 2, dir.file("c.skix"), dir.file("c.skdv"));
  auto bytes = test_util::read_file_bytes(dir.file("c.skix"));

  SUBCASE("bad magic") {
    auto b = bytes;
    b[0] = 'Z';
    test_util::write_file_bytes(dir.file("c.skix"), b);
    CHECK_THROWS_AS(load_index(dir.file("c.skix"), dir.file("c.skdv"), false),
                    DataError);
  }
  SUBCASE("truncated file") {
    auto b = bytes;
    b.resize(b.size() / 2);
    test_util::write_file_bytes(dir.file("c.skix"), b);
    CHECK_THROWS_AS(load_index(dir.file("c.skix"), dir.file("c.skdv"), false),
                    DataError);
  }
  SUBCASE("missing store") {
    CHECK_THROWS_AS(
        load_index(dir.file("c.skix"), dir.file("absent.skdv"), false),
        IoError);
  }
}

}  // TEST_SUITE
