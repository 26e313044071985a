#pragma once

// Per-point pivot lower bounds and estimation-based filtering.
//
// Every resident point i keeps a compressed pivot: its PCA prefix
// truncated to bf16, plus the exact residual dist(prefix, pivot) as a
// 32-bit float.  For a query prefix q the triangle inequality gives
//   |dist(q, pivot_i) - residual_i| <= dist(q, prefix_i) <= dist(q, p_i),
// a disk-free lower bound on the true distance.  Non-resident points
// (point-level pruning) report a lower bound of 0 and are never skipped.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skipdisk/bf16.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/graph.hpp"
#include "skipdisk/pca.hpp"

namespace skipdisk {

enum class PivotPrecision : std::uint8_t { bf16 = 2, f32 = 4 };

struct PivotStore {
  std::uint32_t d_prefix = 0;
  PivotPrecision precision = PivotPrecision::bf16;
  std::vector<std::uint8_t> resident;  // n flags
  std::vector<std::uint32_t> slot;     // n; index into pivot arrays, or ~0u
  std::vector<Bf16> pivots_bf16;       // resident_count * d_prefix
  std::vector<float> pivots_f32;       // resident_count * d_prefix (f32 mode)
  std::vector<float> residuals;        // resident_count

  std::size_t size() const { return resident.size(); }
  std::size_t resident_count() const { return residuals.size(); }
  bool is_resident(PointId id) const { return resident[id] != 0; }
};

// reduced must hold the PCA prefixes (d_prefix coordinates) of the
// indexed points.  Pivots and residuals are stored only for flagged
// points; with bf16 precision residuals obey the truncation bound
// residual <= 2^-7 * ||prefix|| + 1e-6 (asserted here at build time).
PivotStore build_pivots(const VectorDataset& reduced,
                        std::span<const std::uint8_t> resident_flags,
                        PivotPrecision precision);

// True (non-squared) distance between the query prefix and the stored
// pivot of a resident id.
float query_pivot_distance(const PivotStore& store,
                           std::span<const float> q_reduced, PointId id);

// |dist(q, pivot) - residual| for resident ids, 0 for non-resident ones.
float lower_bound(const PivotStore& store, std::span<const float> q_reduced,
                  PointId id);

struct EstimationCalibration {
  float epsilon = 1.0f;
  float p_s = 0.4f;
  std::uint32_t d_prefix = 0;
  std::uint64_t sample_size = 0;
};

// Pairs are full-dimensional (query, point) vectors; ratios
// dist_prefix/dist_full are collected and epsilon is the empirical
// (1 - p_s)-quantile, clamped to (0, 1].  Zero-distance pairs are
// skipped; all pairs degenerate is an error.
EstimationCalibration calibrate_epsilon(
    const PcaModel& pca,
    std::span<const std::pair<std::span<const float>, std::span<const float>>>
        sample_pairs,
    float p_s, std::uint32_t d_prefix);

enum class FilterDecision : std::uint8_t { fetch, skip };

// Strict rule (Base/PB/PBC): skip iff lb >= tau.  Estimation rule (Est):
// skip iff lb > epsilon * tau.  A zero lower bound always fetches, which
// covers non-resident points at any tau.
inline FilterDecision filter_strict(float lb, float tau) {
  if (lb == 0.0f) return FilterDecision::fetch;
  return lb >= tau ? FilterDecision::skip : FilterDecision::fetch;
}
inline FilterDecision filter_estimation(float lb, float tau, float epsilon) {
  if (lb == 0.0f) return FilterDecision::fetch;
  return lb > epsilon * tau ? FilterDecision::skip : FilterDecision::fetch;
}

// One-step estimation test for a single candidate.
FilterDecision estimation_filter(const PivotStore& store,
                                 const EstimationCalibration& calib,
                                 std::span<const float> q_reduced, PointId id,
                                 float tau);

// Top ceil(keep_fraction * n) points by (indegree desc, id asc).
std::vector<std::uint8_t> select_resident_points(const NeighborGraph& graph,
                                                 float keep_fraction);

}  // namespace skipdisk
