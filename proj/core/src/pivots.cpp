#include "skipdisk/pivots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "skipdisk/distance.hpp"

namespace skipdisk {

PivotStore build_pivots(const VectorDataset& reduced,
                        std::span<const std::uint8_t> resident_flags,
                        PivotPrecision precision) {
  const std::size_t n = reduced.size();
  if (resident_flags.size() != n) {
    throw DataError("build_pivots: resident flag count mismatch");
  }
  for (float x : reduced.data) {
    if (!std::isfinite(x)) throw DataError("build_pivots: non-finite input");
  }

  PivotStore store;
  store.d_prefix = reduced.dim;
  store.precision = precision;
  store.resident.assign(resident_flags.begin(), resident_flags.end());
  store.slot.assign(n, kInvalidId);

  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (resident_flags[i]) store.slot[i] = static_cast<std::uint32_t>(count++);
  }
  store.residuals.resize(count);
  if (precision == PivotPrecision::bf16) {
    store.pivots_bf16.resize(count * reduced.dim);
  } else {
    store.pivots_f32.resize(count * reduced.dim);
  }

  std::vector<float> widened(reduced.dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (!resident_flags[i]) continue;
    std::size_t s = store.slot[i];
    auto p = reduced.vec(i);
    float residual = 0.f;
    if (precision == PivotPrecision::bf16) {
      Bf16* out = store.pivots_bf16.data() + s * reduced.dim;
      bf16_encode(p.data(), out, reduced.dim);
      bf16_decode(out, widened.data(), reduced.dim);
      residual = std::sqrt(l2_sq(p.data(), widened.data(), reduced.dim));
      // Truncation bound, checked for every stored point.
      float norm = std::sqrt(norm_sq(p.data(), reduced.dim));
      if (residual > norm * 0x1.0p-7f + 1e-6f) {
        throw DataError("build_pivots: residual exceeds truncation bound");
      }
    } else {
      std::copy(p.begin(), p.end(),
                store.pivots_f32.data() + s * reduced.dim);
      residual = 0.f;  // full-precision pivot equals the prefix exactly
    }
    store.residuals[s] = residual;
  }
  return store;
}

float query_pivot_distance(const PivotStore& store,
                           std::span<const float> q_reduced, PointId id) {
  if (id >= store.size()) throw DataError("query_pivot_distance: bad id");
  if (!store.is_resident(id)) {
    throw DataError("query_pivot_distance: non-resident id");
  }
  if (q_reduced.size() != store.d_prefix) {
    throw DataError("query_pivot_distance: prefix length mismatch");
  }
  std::size_t s = store.slot[id];
  float d_sq;
  if (store.precision == PivotPrecision::bf16) {
    d_sq = l2_sq_bf16(q_reduced.data(),
                      store.pivots_bf16.data() + s * store.d_prefix,
                      store.d_prefix);
  } else {
    d_sq = l2_sq(q_reduced.data(), store.pivots_f32.data() + s * store.d_prefix,
                 store.d_prefix);
  }
  return std::sqrt(d_sq);
}

float lower_bound(const PivotStore& store, std::span<const float> q_reduced,
                  PointId id) {
  if (id >= store.size()) throw DataError("lower_bound: bad id");
  if (!store.is_resident(id)) return 0.0f;
  float d = query_pivot_distance(store, q_reduced, id);
  return std::fabs(d - store.residuals[store.slot[id]]);
}

EstimationCalibration calibrate_epsilon(
    const PcaModel& pca,
    std::span<const std::pair<std::span<const float>, std::span<const float>>>
        sample_pairs,
    float p_s, std::uint32_t d_prefix) {
  if (!(p_s > 0.0f && p_s < 1.0f)) {
    throw ConfigError("calibrate_epsilon: p_s must be in (0, 1)");
  }
  if (d_prefix == 0 || d_prefix > pca.dim) {
    throw ConfigError("calibrate_epsilon: d_prefix out of range");
  }
  if (sample_pairs.size() < 1000) {
    throw ConfigError("calibrate_epsilon: need at least 1000 sample pairs");
  }

  std::vector<float> ratios;
  ratios.reserve(sample_pairs.size());
  std::vector<float> qr(d_prefix), pr(d_prefix);
  for (const auto& [q, p] : sample_pairs) {
    float full = std::sqrt(l2_sq(q.data(), p.data(), pca.dim));
    if (full == 0.0f) continue;  // degenerate pair carries no information
    pca_apply(pca, q, qr);
    pca_apply(pca, p, pr);
    float sub = std::sqrt(l2_sq(qr.data(), pr.data(), d_prefix));
    ratios.push_back(sub / full);
  }
  if (ratios.empty()) {
    throw DataError("calibrate_epsilon: all sample pairs degenerate");
  }

  std::sort(ratios.begin(), ratios.end());
  // Empirical (1 - p_s)-quantile as the order statistic of rank
  // ceil((1 - p_s) * m).
  std::size_t m = ratios.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil((1.0 - static_cast<double>(p_s)) * static_cast<double>(m)));
  if (rank == 0) rank = 1;
  if (rank > m) rank = m;
  float eps = ratios[rank - 1];
  eps = std::min(eps, 1.0f);
  eps = std::max(eps, 1e-6f);

  EstimationCalibration calib;
  calib.epsilon = eps;
  calib.p_s = p_s;
  calib.d_prefix = d_prefix;
  calib.sample_size = m;
  return calib;
}

FilterDecision estimation_filter(const PivotStore& store,
                                 const EstimationCalibration& calib,
                                 std::span<const float> q_reduced, PointId id,
                                 float tau) {
  if (tau < 0.0f) throw ConfigError("estimation_filter: tau must be >= 0");
  float lb = lower_bound(store, q_reduced, id);
  return filter_estimation(lb, tau, calib.epsilon);
}

std::vector<std::uint8_t> select_resident_points(const NeighborGraph& graph,
                                                 float keep_fraction) {
  if (!(keep_fraction > 0.0f && keep_fraction <= 1.0f)) {
    throw ConfigError("select_resident_points: keep_fraction out of range");
  }
  const std::size_t n = graph.size();
  std::vector<std::uint8_t> flags(n, 0);
  std::size_t keep = static_cast<std::size_t>(
      std::ceil(static_cast<double>(keep_fraction) * static_cast<double>(n)));
  if (keep >= n) {
    std::fill(flags.begin(), flags.end(), 1);
    return flags;
  }
  std::vector<std::uint32_t> deg = indegree_counts(graph);
  std::vector<PointId> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::nth_element(ids.begin(), ids.begin() + keep, ids.end(),
                   [&](PointId a, PointId b) {
                     return deg[a] > deg[b] || (deg[a] == deg[b] && a < b);
                   });
  for (std::size_t i = 0; i < keep; ++i) flags[ids[i]] = 1;
  return flags;
}

}  // namespace skipdisk
