#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "skipdisk/common.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/distance.hpp"
#include "skipdisk/index.hpp"
#include "skipdisk/pca.hpp"
#include "skipdisk/pivots.hpp"
#include "skipdisk/search.hpp"
#include "test_util.hpp"

using namespace skipdisk;

namespace {

// One shared four-variant family over a 2000-point dataset; building it
// once keeps the suite fast.  Members are ordered so the stores close
// before the directory disappears.
struct SearchFixture {
  test_util::TempDir dir{"search"};
  VectorDataset base = test_util::make_gaussian(2000, 32, 2101);
  VectorDataset queries = test_util::make_gaussian(50, 32, 2102);
  KnnResult truth = brute_force_knn(base, queries, 20);
  std::vector<SkipDiskIndex> family;

  std::span<const PointId> truth_row(std::size_t qi) const {
    return {truth.ids.data() + qi * truth.k, truth.k};
  }

  SearchFixture() {
    IndexConfig pb;
    pb.variant = Variant::pb;
    pb.d_pq = 32;
    pb.d_lb = 32;
    pb.d_dade = 16;
    pb.sub_dim = 4;
    pb.pq_iters = 6;
    pb.r = 24;
    pb.l_build = 48;
    pb.keep_fraction = 0.5f;
    IndexConfig full = pb;
    full.variant = Variant::base;
    IndexConfig pbc = pb;
    pbc.variant = Variant::pbc;
    IndexConfig est = pb;
    est.variant = Variant::est;
    std::vector<IndexConfig> cfgs = {full, pb, pbc, est};
    std::vector<std::filesystem::path> paths = {
        dir.file("base.skix"), dir.file("pb.skix"), dir.file("pbc.skix"),
        dir.file("est.skix")};
    family = build_index_family(base, cfgs, 77, paths, dir.file("store.skdv"));
  }

  const SkipDiskIndex& by(Variant v) const {
    for (const auto& idx : family) {
      if (idx.config.variant == v) return idx;
    }
    throw std::logic_error("variant not in fixture");
  }

  std::span<const float> query(std::size_t i) const { return queries.vec(i); }
};

SearchFixture& fx() {
  static SearchFixture f;
  return f;
}

IdDataset truth_ids(const KnnResult& r) {
  IdDataset t;
  t.k = r.k;
  t.data = r.ids;
  return t;
}

void check_counter_identity(const SearchStats& s) {
  CHECK(s.candidates_generated ==
        s.filtered + s.io.reads_issued + s.drain_discarded);
  CHECK(s.io.reads_issued == s.io.reads_completed);
  CHECK(s.io.skip_count == s.filtered);
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("exhaustive search list recovers the true neighbors") {
  auto& f = fx();
  for (Variant v : {Variant::base, Variant::pb, Variant::pbc}) {
    const SkipDiskIndex& idx = f.by(v);
    SearchParams p;
    p.k = 10;
    p.l = 2000;
    p.b = 32;
    double recall_sum = 0.0;
    for (std::size_t qi = 0; qi < 20; ++qi) {
      SearchResult r = search(idx, f.query(qi), p);
      REQUIRE(r.ids.size() == 10);
      for (std::size_t i = 0; i + 1 < r.dist_sq.size(); ++i) {
        CHECK(r.dist_sq[i] <= r.dist_sq[i + 1]);
      }
      for (std::size_t i = 0; i < r.ids.size(); ++i) {
        CHECK(r.dist_sq[i] ==
              l2_sq(f.query(qi).data(), f.base.vec(r.ids[i]).data(), 32));
      }
      recall_sum += recall_at_k(r.ids, f.truth_row(qi), 10);
      check_counter_identity(r.stats);
    }
    CHECK(recall_sum / 20 >= 0.99);
  }
}

TEST_CASE("estimation variant stays usable at full search list") {
  auto& f = fx();
  SearchParams p;
  p.k = 10;
  p.l = 2000;
  p.b = 32;
  double recall_sum = 0.0;
  for (std::size_t qi = 0; qi < 20; ++qi) {
    SearchResult r = search(f.by(Variant::est), f.query(qi), p);
    recall_sum += recall_at_k(r.ids, f.truth_row(qi), 10);
    check_counter_identity(r.stats);
  }
  CHECK(recall_sum / 20 >= 0.6);
}

TEST_CASE("strict filtering never changes the result set") {
  auto& f = fx();
  SearchParams filtered;
  filtered.k = 10;
  filtered.l = 100;
  filtered.b = 16;
  SearchParams open = filtered;
  open.disable_filter = true;
  for (Variant v : {Variant::base, Variant::pb, Variant::pbc}) {
    const SkipDiskIndex& idx = f.by(v);
    for (std::size_t qi = 0; qi < f.queries.size(); ++qi) {
      SearchResult a = search(idx, f.query(qi), filtered);
      SearchResult b = search(idx, f.query(qi), open);
      CHECK(a.ids == b.ids);
      CHECK(a.dist_sq == b.dist_sq);
      CHECK(a.stats.io.reads_issued <= b.stats.io.reads_issued);
      CHECK(b.stats.filtered == 0);
      CHECK(b.stats.drain_discarded == 0);
      CHECK(b.stats.candidates_generated == b.stats.io.reads_issued);
    }
  }
}

TEST_CASE("partial residency costs reads, never results") {
  auto& f = fx();
  SearchParams p;
  p.k = 10;
  p.l = 100;
  p.b = 16;
  std::uint64_t reads_pb = 0, reads_pbc = 0;
  for (std::size_t qi = 0; qi < f.queries.size(); ++qi) {
    SearchResult a = search(f.by(Variant::pb), f.query(qi), p);
    SearchResult b = search(f.by(Variant::pbc), f.query(qi), p);
    CHECK(a.ids == b.ids);
    reads_pb += a.stats.io.reads_issued;
    reads_pbc += b.stats.io.reads_issued;
  }
  CHECK(reads_pbc >= reads_pb);
}

TEST_CASE("estimation audit log is self-consistent") {
  auto& f = fx();
  const SkipDiskIndex& idx = f.by(Variant::est);
  SearchParams p;
  p.k = 10;
  p.l = 100;
  p.b = 16;
  p.audit = true;
  std::size_t skips_seen = 0;
  std::vector<float> q_reduced(idx.pivots.d_prefix);
  for (std::size_t qi = 0; qi < f.queries.size(); ++qi) {
    SearchResult r = search(idx, f.query(qi), p);
    pca_apply(idx.pca, f.query(qi), q_reduced);
    for (const EstSkipRecord& rec : r.stats.est_skips) {
      CHECK(rec.lb > rec.eps_tau);
      CHECK(rec.lb == lower_bound(idx.pivots, q_reduced, rec.id));
    }
    skips_seen += r.stats.est_skips.size();
    // tau only tightens: infinities first, then non-increasing values.
    bool finite_seen = false;
    float prev = std::numeric_limits<float>::infinity();
    for (float t : r.stats.tau_trace) {
      if (std::isfinite(t)) {
        finite_seen = true;
        CHECK(t <= prev);
        prev = t;
      } else {
        CHECK(!finite_seen);
      }
    }
    CHECK(r.stats.filtered >= r.stats.est_skips.size());
  }
  CHECK(skips_seen > 0);
}

TEST_CASE("epsilon override widens or narrows the skip rule") {
  auto& f = fx();
  const SkipDiskIndex& idx = f.by(Variant::est);
  SearchParams none;
  none.k = 10;
  none.l = 100;
  none.b = 16;
  none.epsilon_override = 0.0f;  // lb > 0 skips everything boundable
  SearchParams all = none;
  all.epsilon_override = std::numeric_limits<float>::max();
  std::uint64_t reads_tight = 0, reads_loose = 0;
  for (std::size_t qi = 0; qi < 10; ++qi) {
    reads_tight += search(idx, f.query(qi), none).stats.io.reads_issued;
    SearchResult open = search(idx, f.query(qi), all);
    reads_loose += open.stats.io.reads_issued;
    CHECK(open.stats.filtered == 0);
  }
  CHECK(reads_tight < reads_loose);
}

TEST_CASE("baseline loop reads every popped node") {
  auto& f = fx();
  SearchParams p;
  p.k = 10;
  p.l = 2000;
  p.b = 4;  // baseline ignores extra depth; uses one slot at a time
  double recall_sum = 0.0;
  for (std::size_t qi = 0; qi < 20; ++qi) {
    SearchResult r = search_baseline(f.by(Variant::pb), f.query(qi), p);
    CHECK(r.stats.candidates_generated == r.stats.io.reads_issued);
    CHECK(r.stats.filtered == 0);
    for (std::size_t i = 0; i + 1 < r.dist_sq.size(); ++i) {
      CHECK(r.dist_sq[i] <= r.dist_sq[i + 1]);
    }
    recall_sum += recall_at_k(r.ids, f.truth_row(qi), 10);
  }
  CHECK(recall_sum / 20 >= 0.99);
}

TEST_CASE("simulated backend makes whole queries reproducible") {
  auto& f = fx();
  const SkipDiskIndex& idx = f.by(Variant::est);
  SearchParams p;
  p.k = 10;
  p.l = 100;
  p.b = 8;
  p.io.kind = IoBackendConfig::Kind::simulated;
  p.io.sim_mean_us = 40.0;
  p.io.sim_jitter_us = 10.0;
  p.io.seed = 99;
  SearchResult a = search(idx, f.query(3), p);
  SearchResult b = search(idx, f.query(3), p);
  CHECK(a.ids == b.ids);
  CHECK(a.dist_sq == b.dist_sq);
  CHECK(a.stats.simulated);
  CHECK(a.stats.latency == b.stats.latency);
  CHECK(a.stats.latency > 0.0);
  CHECK(a.stats.io.reads_issued == b.stats.io.reads_issued);
  CHECK(a.stats.filtered == b.stats.filtered);

  // For a strict variant the result is timing-independent, so a real
  // backend must agree with the simulated one on everything but time.
  // (est results may differ: its skips depend on when tau tightens.)
  SearchParams real = p;
  real.io = IoBackendConfig{};
  SearchResult sim_pb = search(f.by(Variant::pb), f.query(3), p);
  SearchResult c = search(f.by(Variant::pb), f.query(3), real);
  CHECK_FALSE(c.stats.simulated);
  CHECK(c.ids == sim_pb.ids);
  CHECK(c.dist_sq == sim_pb.dist_sq);
}

TEST_CASE("batch bench aggregates per-query series faithfully") {
  auto& f = fx();
  BenchParams bp;
  bp.search.k = 10;
  bp.search.l = 100;
  bp.search.b = 16;
  bp.search.io.kind = IoBackendConfig::Kind::simulated;
  bp.search.io.seed = 7;
  IdDataset truth = truth_ids(f.truth);
  BenchReport rep = batch_bench(f.by(Variant::pb), f.queries, bp, truth);

  CHECK(rep.variant == "pb");
  CHECK(rep.n_queries == 50);
  CHECK(rep.simulated);
  CHECK(rep.io_mode == "sim");
  REQUIRE(rep.latencies.size() == 50);
  REQUIRE(rep.recalls.size() == 50);
  REQUIRE(rep.reads.size() == 50);
  const double reads_mean =
      std::accumulate(rep.reads.begin(), rep.reads.end(), 0.0) / 50;
  CHECK(rep.reads_mean == doctest::Approx(reads_mean).epsilon(1e-9));
  const double recall_mean =
      std::accumulate(rep.recalls.begin(), rep.recalls.end(), 0.0) / 50;
  CHECK(rep.recall_mean == doctest::Approx(recall_mean).epsilon(1e-9));
  CHECK(rep.recall_mean > 0.5);
  CHECK(rep.latency_p50 == percentile(rep.latencies, 50.0));
  CHECK(rep.latency_p99 == percentile(rep.latencies, 99.0));
  CHECK(rep.generated_mean ==
        doctest::Approx(rep.filtered_mean + rep.reads_mean +
                        rep.drain_discarded_mean)
            .epsilon(1e-9));
  CHECK(rep.memory.total() > 0);
  CHECK(rep.bytes_read ==
        std::accumulate(rep.reads.begin(), rep.reads.end(), 0ull) *
            f.by(Variant::pb).store->layout().record_size);

  // A second identical run reproduces the whole report.
  BenchReport rep2 = batch_bench(f.by(Variant::pb), f.queries, bp, truth);
  CHECK(rep2.latencies == rep.latencies);
  CHECK(rep2.recalls == rep.recalls);
  CHECK(rep2.reads == rep.reads);
}

TEST_CASE("percentile uses nearest-rank semantics") {
  std::vector<double> v{30, 10, 40, 20};
  CHECK(percentile(v, 0.0) == 10.0);
  CHECK(percentile(v, 25.0) == 10.0);
  CHECK(percentile(v, 26.0) == 20.0);
  CHECK(percentile(v, 50.0) == 20.0);
  CHECK(percentile(v, 75.0) == 30.0);
  CHECK(percentile(v, 100.0) == 40.0);
  CHECK(percentile({}, 50.0) == 0.0);
}

TEST_CASE("parameter validation") {
  auto& f = fx();
  const SkipDiskIndex& idx = f.by(Variant::pb);
  SearchParams p;
  p.k = 10;
  p.l = 5;  // l < k
  CHECK_THROWS_AS(search(idx, f.query(0), p), ConfigError);
  p.l = 100;
  p.b = 0;
  CHECK_THROWS_AS(search(idx, f.query(0), p), ConfigError);
  p.b = 8;
  p.k = 0;
  CHECK_THROWS_AS(search(idx, f.query(0), p), ConfigError);
  std::vector<float> short_query(16, 0.0f);
  SearchParams ok;
  CHECK_THROWS_AS(search(idx, short_query, ok), DataError);

  BenchParams bp;
  bp.search.k = 10;
  bp.search.l = 50;
  VectorDataset bad_queries = test_util::make_gaussian(4, 16, 5);
  IdDataset truth = truth_ids(f.truth);
  CHECK_THROWS_AS(batch_bench(idx, bad_queries, bp, truth), DataError);
  IdDataset thin;
  thin.k = 4;  // below search.k
  thin.data.assign(4ull * f.queries.size(), 0);
  CHECK_THROWS_AS(batch_bench(idx, f.queries, bp, thin), DataError);
}

}  // TEST_SUITE
