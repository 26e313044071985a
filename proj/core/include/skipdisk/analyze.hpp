#pragma once

// Diagnostics: how tight the pivot lower bounds are, how the estimation
// threshold trades reads for recall, and how much variance a rotation
// prefix captures.

#include <cstdint>
#include <span>
#include <vector>

#include "skipdisk/dataset.hpp"
#include "skipdisk/pca.hpp"
#include "skipdisk/search.hpp"

namespace skipdisk {

struct TightnessParams {
  std::size_t n_pairs = 2000;        // random (query, point) pairs
  std::size_t cluster_sample = 10000;  // points fitting the comparator
  std::uint32_t kmeans_iters = 8;
  std::uint64_t seed = 42;
};

struct TightnessRow {
  std::uint32_t d_prefix = 0;
  // Mean lower-bound / true-distance ratio (1.0 would be a perfect bound).
  double mean_ratio_point = 0.0;    // per-point bf16 pivots
  double mean_ratio_cluster = 0.0;  // 256 shared cluster pivots
  double point_tighter_fraction = 0.0;  // pairs where per-point bound wins
};

struct TightnessReport {
  std::vector<TightnessRow> rows;  // one per requested prefix
  std::size_t pairs_used = 0;      // zero-distance pairs are dropped
};

// Compares per-point pivots against a cluster-pivot scheme of equal
// codebook size at each prefix dimension.  Requires >= 256 points.
TightnessReport tightness_report(const VectorDataset& data,
                                 const PcaModel& pca,
                                 std::span<const std::uint32_t> prefixes,
                                 const TightnessParams& params);

struct EpsilonSweepRow {
  float epsilon = 0.0f;
  double recall_mean = 0.0;
  double reads_mean = 0.0;
  double filtered_mean = 0.0;
  double latency_mean = 0.0;
};

// Re-runs the query batch once per epsilon override.  Only meaningful
// for an estimation-variant index; anything else is a ConfigError.
std::vector<EpsilonSweepRow> epsilon_sweep(const SkipDiskIndex& index,
                                           const VectorDataset& queries,
                                           const IdDataset& truth,
                                           const SearchParams& base,
                                           std::span<const float> epsilons);

// Fraction of total variance captured by the first d_prefix components.
double explained_variance(const PcaModel& pca, std::uint32_t d_prefix);

// Smallest prefix whose explained variance reaches `target` (in (0, 1]).
std::uint32_t suggest_prefix_dim(const PcaModel& pca, double target);

}  // namespace skipdisk
