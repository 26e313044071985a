#include "skipdisk/analyze.hpp"

#include <algorithm>
#include <cmath>

#include "skipdisk/bf16.hpp"
#include "skipdisk/common.hpp"
#include "skipdisk/distance.hpp"
#include "skipdisk/pq.hpp"

namespace skipdisk {

namespace {

struct SampledPair {
  PointId q = 0;
  PointId p = 0;
  double dist = 0.0;  // true full-dimensional distance
};

std::uint32_t nearest_centroid(std::span<const float> x,
                               const std::vector<float>& centroids,
                               std::uint32_t dim) {
  std::uint32_t best = 0;
  float best_d = l2_sq(x, std::span<const float>(centroids.data(), dim));
  for (std::uint32_t c = 1; c < 256; ++c) {
    float d =
        l2_sq(x, std::span<const float>(centroids.data() + c * dim, dim));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

TightnessReport tightness_report(const VectorDataset& data,
                                 const PcaModel& pca,
                                 std::span<const std::uint32_t> prefixes,
                                 const TightnessParams& params) {
  if (data.size() < 256) {
    throw ConfigError("tightness_report: need at least 256 points");
  }
  if (data.dim != pca.dim) {
    throw DataError("tightness_report: rotation dimension mismatch");
  }
  if (prefixes.empty()) {
    throw ConfigError("tightness_report: no prefix dimensions given");
  }
  std::uint32_t d_max = 0;
  for (std::uint32_t d : prefixes) {
    if (d == 0 || d > data.dim) {
      throw ConfigError("tightness_report: prefix out of range");
    }
    d_max = std::max(d_max, d);
  }
  if (params.n_pairs == 0) {
    throw ConfigError("tightness_report: n_pairs must be positive");
  }

  VectorDataset reduced = pca_apply_batch(pca, data, d_max);
  std::size_t n = data.size();

  Rng rng(params.seed);
  std::vector<SampledPair> pairs;
  pairs.reserve(params.n_pairs);
  for (std::size_t t = 0; t < params.n_pairs; ++t) {
    PointId q = static_cast<PointId>(rng.bounded(n));
    PointId p = static_cast<PointId>(rng.bounded(n));
    while (p == q) p = static_cast<PointId>(rng.bounded(n));
    double dist = std::sqrt(
        static_cast<double>(l2_sq(data.vec(q), data.vec(p))));
    if (dist == 0.0) continue;
    pairs.push_back({q, p, dist});
  }
  if (pairs.empty()) {
    throw DataError("tightness_report: all sampled pairs coincide");
  }

  // Comparator training set: an evenly strided slice of the reduced data,
  // re-packed because kmeans256 expects contiguous rows.
  std::size_t sample = std::min(params.cluster_sample, n);
  sample = std::max<std::size_t>(sample, 256);
  std::size_t stride = std::max<std::size_t>(1, n / sample);

  TightnessReport report;
  report.pairs_used = pairs.size();
  report.rows.reserve(prefixes.size());

  std::vector<float> widened(d_max);
  for (std::uint32_t d : prefixes) {
    std::vector<float> packed;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n && count < sample; i += stride, ++count) {
      auto row = reduced.vec(i);
      packed.insert(packed.end(), row.begin(), row.begin() + d);
    }
    KmeansResult km =
        kmeans256(packed.data(), count, d, params.kmeans_iters,
                  derive_seed(params.seed, d));

    TightnessRow row;
    row.d_prefix = d;
    double sum_point = 0.0;
    double sum_cluster = 0.0;
    std::size_t tighter = 0;
    for (const SampledPair& pr : pairs) {
      std::span<const float> qr(reduced.vec(pr.q).data(), d);
      std::span<const float> prd(reduced.vec(pr.p).data(), d);

      for (std::uint32_t j = 0; j < d; ++j) {
        widened[j] = bf16_to_float(bf16_from_float(prd[j]));
      }
      std::span<const float> wid(widened.data(), d);
      double resid = std::sqrt(static_cast<double>(l2_sq(prd, wid)));
      double dq = std::sqrt(static_cast<double>(l2_sq(qr, wid)));
      double lb_point = std::max(0.0, dq - resid);

      std::uint32_t c = nearest_centroid(prd, km.centroids, d);
      std::span<const float> cent(km.centroids.data() + c * d, d);
      double resid_c = std::sqrt(static_cast<double>(l2_sq(prd, cent)));
      double dq_c = std::sqrt(static_cast<double>(l2_sq(qr, cent)));
      double lb_cluster = std::max(0.0, dq_c - resid_c);

      sum_point += lb_point / pr.dist;
      sum_cluster += lb_cluster / pr.dist;
      if (lb_point > lb_cluster) ++tighter;
    }
    double dn = static_cast<double>(pairs.size());
    row.mean_ratio_point = sum_point / dn;
    row.mean_ratio_cluster = sum_cluster / dn;
    row.point_tighter_fraction = static_cast<double>(tighter) / dn;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<EpsilonSweepRow> epsilon_sweep(const SkipDiskIndex& index,
                                           const VectorDataset& queries,
                                           const IdDataset& truth,
                                           const SearchParams& base,
                                           std::span<const float> epsilons) {
  if (index.config.variant != Variant::est) {
    throw ConfigError("epsilon_sweep: index is not an estimation variant");
  }
  if (epsilons.empty()) {
    throw ConfigError("epsilon_sweep: no epsilon values given");
  }
  std::vector<EpsilonSweepRow> rows;
  rows.reserve(epsilons.size());
  for (float eps : epsilons) {
    if (!(eps >= 0.0f)) {
      throw ConfigError("epsilon_sweep: epsilon must be non-negative");
    }
    BenchParams bp;
    bp.search = base;
    bp.search.epsilon_override = eps;
    BenchReport rep = batch_bench(index, queries, bp, truth);
    EpsilonSweepRow row;
    row.epsilon = eps;
    row.recall_mean = rep.recall_mean;
    row.reads_mean = rep.reads_mean;
    row.filtered_mean = rep.filtered_mean;
    row.latency_mean = rep.latency_mean;
    rows.push_back(row);
  }
  return rows;
}

double explained_variance(const PcaModel& pca, std::uint32_t d_prefix) {
  if (d_prefix == 0 || d_prefix > pca.dim) {
    throw ConfigError("explained_variance: prefix out of range");
  }
  double total = 0.0;
  double head = 0.0;
  for (std::uint32_t i = 0; i < pca.dim; ++i) {
    total += pca.eigenvalues[i];
    if (i < d_prefix) head += pca.eigenvalues[i];
  }
  if (total <= 0.0) return 1.0;
  return head / total;
}

std::uint32_t suggest_prefix_dim(const PcaModel& pca, double target) {
  if (!(target > 0.0) || target > 1.0) {
    throw ConfigError("suggest_prefix_dim: target must be in (0, 1]");
  }
  double total = 0.0;
  for (std::uint32_t i = 0; i < pca.dim; ++i) total += pca.eigenvalues[i];
  if (total <= 0.0) return 1;
  double head = 0.0;
  for (std::uint32_t i = 0; i < pca.dim; ++i) {
    head += pca.eigenvalues[i];
    if (head / total >= target) return i + 1;
  }
  return pca.dim;
}

}  // namespace skipdisk
