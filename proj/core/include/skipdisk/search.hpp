#pragma once

// Query engine.  The traversal walks the in-memory graph ordered by PQ
// distances while disk reads for promising candidates run asynchronously
// underneath; pivot lower bounds skip reads that provably (strict rule)
// or probably (estimation rule) cannot enter the result set.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skipdisk/async_io.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/index.hpp"

namespace skipdisk {

struct SearchParams {
  std::uint32_t k = 10;
  std::uint32_t l = 100;  // search-list capacity, >= k
  std::uint32_t b = 32;   // max in-flight reads
  std::optional<float> epsilon_override;  // est only; default from index
  bool disable_filter = false;  // diagnostic: every candidate is fetched
  bool audit = false;           // record tau trace and est skip log
  IoBackendConfig io;           // backend selection for this query
};

// One estimation-rule skip, recorded when audit is on: the candidate,
// its lower bound, and epsilon * tau at the moment of the decision.
struct EstSkipRecord {
  PointId id;
  float lb;
  float eps_tau;
};

struct SearchStats {
  IoStats io;
  std::uint64_t candidates_generated = 0;
  std::uint64_t lb_computed = 0;
  std::uint64_t filtered = 0;
  std::uint64_t drain_discarded = 0;
  std::uint64_t exact_distances = 0;
  // Wall-clock microseconds (real backend) or virtual ticks (simulated).
  double latency = 0.0;
  bool simulated = false;
  std::vector<float> tau_trace;          // audit only
  std::vector<EstSkipRecord> est_skips;  // audit only
};

struct SearchResult {
  std::vector<PointId> ids;     // ascending by exact distance
  std::vector<float> dist_sq;   // disk-verified squared distances
  SearchStats stats;
};

SearchResult search(const SkipDiskIndex& index, std::span<const float> query,
                    const SearchParams& params);

// Synchronous reference loop: one blocking record read per popped node,
// no filtering.  Uses a depth-1 queue so simulated timing works here too.
SearchResult search_baseline(const SkipDiskIndex& index,
                             std::span<const float> query,
                             const SearchParams& params);

struct BenchParams {
  SearchParams search;
  bool baseline = false;
  std::uint32_t threads = 1;  // >1 runs queries on independent threads
};

struct BenchReport {
  std::string variant;
  std::uint32_t k = 0, l = 0, b = 0;
  std::size_t n_queries = 0;
  bool baseline = false;
  bool simulated = false;
  std::string io_mode;   // "direct" | "buffered" | "sim"
  std::uint32_t threads = 1;
  double recall_mean = 0.0;
  double latency_mean = 0.0, latency_p50 = 0.0, latency_p99 = 0.0,
         latency_p999 = 0.0;
  double reads_mean = 0.0;
  double filtered_mean = 0.0;
  double filtered_fraction = 0.0;  // filtered / candidates generated
  double drain_discarded_mean = 0.0;
  double generated_mean = 0.0;
  double exact_mean = 0.0;
  std::uint64_t bytes_read = 0;
  MemoryAccounting memory;
  // Per-query raw series, in query order.
  std::vector<double> latencies;
  std::vector<double> recalls;
  std::vector<std::uint64_t> reads;
};

// truth must cover every query with at least params.search.k ids.
BenchReport batch_bench(const SkipDiskIndex& index,
                        const VectorDataset& queries, const BenchParams& params,
                        const IdDataset& truth);

// Nearest-rank percentile of an unsorted sample (q in [0, 100]).
double percentile(std::vector<double> values, double q);

}  // namespace skipdisk
