#include "skipdisk/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <thread>

#include "skipdisk/distance.hpp"
#include "skipdisk/frontier.hpp"

namespace skipdisk {

namespace {

// Bounded top-K set over (squared distance, id) with lexicographic
// ordering; tau is the true (non-squared) K-th best distance.
class ResultSet {
 public:
  explicit ResultSet(std::uint32_t k) : k_(k) {}

  void insert(float dist_sq, PointId id) {
    std::pair<float, PointId> e{dist_sq, id};
    if (heap_.size() < k_) {
      heap_.push(e);
    } else if (e < heap_.top()) {
      heap_.pop();
      heap_.push(e);
    }
  }

  float tau() const {
    if (heap_.size() < k_) return std::numeric_limits<float>::infinity();
    return std::sqrt(heap_.top().first);
  }

  void drain_sorted(std::vector<PointId>* ids, std::vector<float>* dist_sq) {
    std::vector<std::pair<float, PointId>> v;
    v.reserve(heap_.size());
    while (!heap_.empty()) {
      v.push_back(heap_.top());
      heap_.pop();
    }
    std::sort(v.begin(), v.end());
    for (auto& [d, id] : v) {
      ids->push_back(id);
      dist_sq->push_back(d);
    }
  }

 private:
  std::uint32_t k_;
  std::priority_queue<std::pair<float, PointId>> heap_;  // max on top
};

using LbEntry = std::pair<float, PointId>;  // (lower bound, id), min first
using CandidateHeap =
    std::priority_queue<LbEntry, std::vector<LbEntry>, std::greater<LbEntry>>;

struct QueryContext {
  const SkipDiskIndex& index;
  const SearchParams& params;
  std::span<const float> query;
  float epsilon;
  bool estimation;  // est rule vs strict rule

  std::vector<float> q_reduced;   // pivot-prefix coordinates
  QueryLut lut;
  FrontierList frontier;
  CandidateHeap cand;
  ResultSet results;
  std::vector<std::uint8_t> visited;
  SearchStats stats;
  float tau = std::numeric_limits<float>::infinity();

  QueryContext(const SkipDiskIndex& idx, std::span<const float> q,
               const SearchParams& p)
      : index(idx),
        params(p),
        query(q),
        frontier(p.l),
        results(p.k),
        visited(idx.n, 0) {
    estimation = idx.config.variant == Variant::est && !p.disable_filter;
    epsilon = p.epsilon_override.value_or(idx.calib.epsilon);

    const std::uint32_t d_pivot = idx.pivots.d_prefix;
    const std::uint32_t d_need = std::max(idx.pq.d_pq(), d_pivot);
    q_reduced.resize(d_need);
    pca_apply(idx.pca, q, q_reduced);
    lut = build_lut(idx.pq, {q_reduced.data(), idx.pq.d_pq()});
  }

  void update_tau() {
    float t = results.tau();
    tau = t;
    if (params.audit) stats.tau_trace.push_back(t);
  }

  float adc(PointId id) const {
    return adc_distance(lut, index.codes.row(id), index.pq.m);
  }

  // First sight of a node: score into the frontier and enqueue as a disk
  // candidate with its pivot lower bound.
  void admit(PointId id) {
    visited[id] = 1;
    frontier.insert(adc(id), id);
    float lb = lower_bound(index.pivots,
                           {q_reduced.data(), index.pivots.d_prefix}, id);
    ++stats.lb_computed;
    cand.push({lb, id});
    ++stats.candidates_generated;
  }

  // Filter decision for the current tau.  disable_filter fetches all.
  bool passes(float lb) const {
    if (params.disable_filter) return true;
    if (estimation) {
      return filter_estimation(lb, tau, epsilon) == FilterDecision::fetch;
    }
    return filter_strict(lb, tau) == FilterDecision::fetch;
  }

  void harvest(AsyncReadQueue& queue) {
    for (Completion& c : queue.poll_completions()) {
      float d = l2_sq(query.data(), c.payload.data(), index.dim);
      ++stats.exact_distances;
      results.insert(d, c.id);
      update_tau();
    }
  }

  // Issue reads for passing candidates until the queue is full; on the
  // first failing candidate, drop that candidate and stop.  When
  // drain_all is set (post-traversal), a failing minimum discards the
  // entire remaining candidate set.
  void issue_from_candidates(AsyncReadQueue& queue, bool drain_all) {
    while (!cand.empty() && queue.free_slots() > 0) {
      auto [lb, id] = cand.top();
      if (passes(lb)) {
        cand.pop();
        queue.issue_read(id);
        continue;
      }
      cand.pop();
      ++stats.filtered;
      if (params.audit && estimation) {
        stats.est_skips.push_back(EstSkipRecord{id, lb, epsilon * tau});
      }
      if (drain_all) {
        stats.drain_discarded += cand.size();
        CandidateHeap empty;
        cand.swap(empty);
      }
      break;
    }
  }
};

}  // namespace

SearchResult search(const SkipDiskIndex& index, std::span<const float> query,
                    const SearchParams& params) {
  if (query.size() != index.dim) throw DataError("search: dimension mismatch");
  if (params.k == 0 || params.l < params.k) {
    throw ConfigError("search: require L >= K >= 1");
  }
  if (params.b == 0) throw ConfigError("search: require B >= 1");

  auto wall_start = std::chrono::steady_clock::now();
  QueryContext ctx(index, query, params);
  AsyncReadQueue queue(*index.store, params.b, params.io);

  ctx.admit(index.graph.entry);
  while (ctx.frontier.has_unchecked()) {
    auto e = ctx.frontier.pop_unchecked();
    ctx.harvest(queue);
    ctx.issue_from_candidates(queue, /*drain_all=*/false);
    for (PointId nb : index.graph.neighbors(e.id)) {
      if (!ctx.visited[nb]) ctx.admit(nb);
    }
  }

  // Drain: service the remaining candidates and in-flight reads.  The
  // strict rule discards all of C once its minimum fails; the loop ends
  // with both the candidate set and the queue empty.
  while (!ctx.cand.empty() || queue.pending() > 0) {
    if (queue.pending() > 0) {
      std::size_t before = ctx.stats.exact_distances;
      ctx.harvest(queue);
      if (ctx.stats.exact_distances == before && !queue.simulated()) {
        std::this_thread::yield();
      }
    }
    ctx.issue_from_candidates(queue, /*drain_all=*/true);
  }

  SearchResult out;
  ctx.stats.io = queue.stats();
  ctx.stats.io.skip_count = ctx.stats.filtered;
  ctx.stats.simulated = queue.simulated();
  if (queue.simulated()) {
    ctx.stats.latency = static_cast<double>(queue.sim_clock());
  } else {
    ctx.stats.latency =
        std::chrono::duration<double, std::micro>(
            std::chrono::steady_clock::now() - wall_start)
            .count();
  }
  ctx.results.drain_sorted(&out.ids, &out.dist_sq);
  out.stats = std::move(ctx.stats);
  return out;
}

SearchResult search_baseline(const SkipDiskIndex& index,
                             std::span<const float> query,
                             const SearchParams& params) {
  if (query.size() != index.dim) {
    throw DataError("search_baseline: dimension mismatch");
  }
  if (params.k == 0 || params.l < params.k) {
    throw ConfigError("search_baseline: require L >= K >= 1");
  }

  auto wall_start = std::chrono::steady_clock::now();
  QueryContext ctx(index, query, params);
  // Depth-1 queue: issue, poll to completion, continue.  Keeps the
  // simulated clock meaningful for the synchronous reference too.
  IoBackendConfig io = params.io;
  AsyncReadQueue queue(*index.store, 1, io);

  ctx.visited[index.graph.entry] = 1;
  ctx.frontier.insert(ctx.adc(index.graph.entry), index.graph.entry);

  while (ctx.frontier.has_unchecked()) {
    auto e = ctx.frontier.pop_unchecked();
    // Every popped candidate is read from disk, so the candidate stream
    // equals the read stream and the counter identity degenerates to
    // generated == reads_issued.
    ++ctx.stats.candidates_generated;
    queue.issue_read(e.id);
    while (queue.pending() > 0) {
      std::size_t before = ctx.stats.exact_distances;
      ctx.harvest(queue);
      if (ctx.stats.exact_distances == before && !queue.simulated()) {
        std::this_thread::yield();
      }
    }
    for (PointId nb : index.graph.neighbors(e.id)) {
      if (!ctx.visited[nb]) {
        ctx.visited[nb] = 1;
        ctx.frontier.insert(ctx.adc(nb), nb);
      }
    }
  }

  SearchResult out;
  ctx.stats.io = queue.stats();
  ctx.stats.simulated = queue.simulated();
  if (queue.simulated()) {
    ctx.stats.latency = static_cast<double>(queue.sim_clock());
  } else {
    ctx.stats.latency =
        std::chrono::duration<double, std::micro>(
            std::chrono::steady_clock::now() - wall_start)
            .count();
  }
  ctx.results.drain_sorted(&out.ids, &out.dist_sq);
  out.stats = std::move(ctx.stats);
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double rank = std::ceil(q / 100.0 * static_cast<double>(values.size()));
  std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  if (idx >= values.size()) idx = values.size() - 1;
  return values[idx];
}

BenchReport batch_bench(const SkipDiskIndex& index,
                        const VectorDataset& queries, const BenchParams& params,
                        const IdDataset& truth) {
  const std::size_t nq = queries.size();
  if (queries.dim != index.dim) {
    throw DataError("batch_bench: query dimension mismatch");
  }
  if (truth.size() < nq || truth.k < params.search.k) {
    throw DataError("batch_bench: truth does not cover queries at K");
  }

  BenchReport rep;
  rep.variant = variant_name(index.config.variant);
  rep.k = params.search.k;
  rep.l = params.search.l;
  rep.b = params.search.b;
  rep.n_queries = nq;
  rep.baseline = params.baseline;
  rep.threads = std::max<std::uint32_t>(1, params.threads);
  rep.simulated = params.search.io.kind == IoBackendConfig::Kind::simulated;
  rep.io_mode = rep.simulated
                    ? "sim"
                    : (index.store->mode() == DiskStore::Mode::direct
                           ? "direct"
                           : "buffered");
  rep.memory = account_memory(index);
  rep.latencies.resize(nq);
  rep.recalls.resize(nq);
  rep.reads.resize(nq);

  std::vector<std::uint64_t> filtered(nq), generated(nq), drained(nq),
      exact(nq), bytes(nq);

  auto run_one = [&](std::size_t qi) {
    SearchParams sp = params.search;
    // Per-query derived seed keeps simulated delays independent across
    // queries yet reproducible across runs.
    sp.io.seed = derive_seed(params.search.io.seed, qi);
    SearchResult res = params.baseline
                           ? search_baseline(index, queries.vec(qi), sp)
                           : search(index, queries.vec(qi), sp);
    rep.latencies[qi] = res.stats.latency;
    rep.reads[qi] = res.stats.io.reads_issued;
    filtered[qi] = res.stats.filtered;
    generated[qi] = res.stats.candidates_generated;
    drained[qi] = res.stats.drain_discarded;
    exact[qi] = res.stats.exact_distances;
    bytes[qi] = res.stats.io.bytes_read;
    rep.recalls[qi] =
        recall_at_k(res.ids, truth.row(qi), params.search.k);
  };

  if (rep.threads <= 1) {
    for (std::size_t qi = 0; qi < nq; ++qi) run_one(qi);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::uint32_t t = 0; t < rep.threads; ++t) {
      pool.emplace_back([&] {
        while (true) {
          std::size_t qi = next.fetch_add(1);
          if (qi >= nq) break;
          run_one(qi);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  double lat_sum = 0, rec_sum = 0, read_sum = 0, filt_sum = 0, gen_sum = 0,
         drain_sum = 0, exact_sum = 0;
  for (std::size_t qi = 0; qi < nq; ++qi) {
    lat_sum += rep.latencies[qi];
    rec_sum += rep.recalls[qi];
    read_sum += static_cast<double>(rep.reads[qi]);
    filt_sum += static_cast<double>(filtered[qi]);
    gen_sum += static_cast<double>(generated[qi]);
    drain_sum += static_cast<double>(drained[qi]);
    exact_sum += static_cast<double>(exact[qi]);
    rep.bytes_read += bytes[qi];
  }
  double dn = static_cast<double>(nq);
  rep.recall_mean = rec_sum / dn;
  rep.latency_mean = lat_sum / dn;
  rep.latency_p50 = percentile(rep.latencies, 50.0);
  rep.latency_p99 = percentile(rep.latencies, 99.0);
  rep.latency_p999 = percentile(rep.latencies, 99.9);
  rep.reads_mean = read_sum / dn;
  rep.filtered_mean = filt_sum / dn;
  rep.generated_mean = gen_sum / dn;
  rep.drain_discarded_mean = drain_sum / dn;
  rep.exact_mean = exact_sum / dn;
  rep.filtered_fraction = gen_sum > 0 ? filt_sum / gen_sum : 0.0;
  return rep;
}

}  // namespace skipdisk
