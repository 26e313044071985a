#include "skipdisk/pq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skipdisk/distance.hpp"

namespace skipdisk {

namespace {
constexpr std::uint32_t kK = 256;

// Nearest centroid by exhaustive scan; ties resolved to the lowest index
// by strict inequality.
std::uint32_t nearest_centroid(const float* x, const float* centroids,
                               std::uint32_t dim, float* dist_out) {
  std::uint32_t best = 0;
  float best_d = std::numeric_limits<float>::infinity();
  for (std::uint32_t c = 0; c < kK; ++c) {
    float d = l2_sq(x, centroids + static_cast<std::size_t>(c) * dim, dim);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}
}  // namespace

KmeansResult kmeans256(const float* data, std::size_t n, std::uint32_t dim,
                       std::uint32_t iters, std::uint64_t seed) {
  if (n < kK) throw DataError("kmeans256: need at least 256 points");
  Rng rng(seed);
  KmeansResult res;
  res.centroids.resize(static_cast<std::size_t>(kK) * dim);
  res.assignment.resize(n);

  // k-means++ seeding.
  std::vector<float> min_d(n, std::numeric_limits<float>::infinity());
  std::size_t first = rng.bounded(n);
  std::copy_n(data + first * dim, dim, res.centroids.data());
  for (std::uint32_t c = 1; c < kK; ++c) {
    const float* prev = res.centroids.data() +
                        static_cast<std::size_t>(c - 1) * dim;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      float d = l2_sq(data + i * dim, prev, dim);
      if (d < min_d[i]) min_d[i] = d;
      total += min_d[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      double run = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        run += min_d[i];
        if (run >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.bounded(n);  // all points coincide with chosen centroids
    }
    std::copy_n(data + pick * dim,
                dim, res.centroids.data() + static_cast<std::size_t>(c) * dim);
  }

  std::vector<double> sums(static_cast<std::size_t>(kK) * dim);
  std::vector<std::size_t> counts(kK);
  std::vector<float> point_err(n);
  for (std::uint32_t it = 0; it < iters; ++it) {
    // Assign.
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      float d = 0.f;
      res.assignment[i] = static_cast<std::uint8_t>(
          nearest_centroid(data + i * dim, res.centroids.data(), dim, &d));
      point_err[i] = d;
      obj += d;
    }
    res.objective.push_back(obj / static_cast<double>(n));

    // Update.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t c = res.assignment[i];
      ++counts[c];
      double* s = sums.data() + static_cast<std::size_t>(c) * dim;
      const float* x = data + i * dim;
      for (std::uint32_t j = 0; j < dim; ++j) s[j] += x[j];
    }
    for (std::uint32_t c = 0; c < kK; ++c) {
      float* ctr = res.centroids.data() + static_cast<std::size_t>(c) * dim;
      if (counts[c] > 0) {
        const double* s = sums.data() + static_cast<std::size_t>(c) * dim;
        for (std::uint32_t j = 0; j < dim; ++j) {
          ctr[j] = static_cast<float>(s[j] / static_cast<double>(counts[c]));
        }
      } else {
        // Re-seed an empty cluster from the point farthest from its
        // assigned centroid, so no codeword goes to waste.
        std::size_t far = 0;
        float far_d = -1.f;
        for (std::size_t i = 0; i < n; ++i) {
          if (point_err[i] > far_d) {
            far_d = point_err[i];
            far = i;
          }
        }
        std::copy_n(data + far * dim, dim, ctr);
        point_err[far] = 0.f;  // avoid re-picking for the next empty cluster
      }
    }
  }
  // Final assignment so res.assignment matches the returned centroids.
  for (std::size_t i = 0; i < n; ++i) {
    res.assignment[i] = static_cast<std::uint8_t>(
        nearest_centroid(data + i * dim, res.centroids.data(), dim, nullptr));
  }
  return res;
}

PqCodebook train_pq(const VectorDataset& reduced, std::uint32_t sub_dim,
                    std::uint32_t iters, std::uint64_t seed) {
  if (sub_dim == 0 || reduced.dim % sub_dim != 0) {
    throw ConfigError("train_pq: d_pq must be divisible by sub_dim");
  }
  if (reduced.size() < kK) {
    throw DataError("train_pq: need at least 256 training points");
  }
  const std::uint32_t m = reduced.dim / sub_dim;
  const std::size_t n = reduced.size();
  PqCodebook cb;
  cb.m = m;
  cb.sub_dim = sub_dim;
  cb.centroids.resize(static_cast<std::size_t>(m) * kK * sub_dim);

  std::vector<float> sub(n * static_cast<std::size_t>(sub_dim));
  for (std::uint32_t s = 0; s < m; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const float* row = reduced.vec(i).data() +
                         static_cast<std::size_t>(s) * sub_dim;
      std::copy_n(row, sub_dim, sub.data() + i * sub_dim);
    }
    KmeansResult km =
        kmeans256(sub.data(), n, sub_dim, iters,
                  derive_seed(derive_seed(seed, seed_tag::kKmeans), s));
    std::copy(km.centroids.begin(), km.centroids.end(),
              cb.centroids.begin() +
                  static_cast<std::size_t>(s) * kK * sub_dim);
  }
  return cb;
}

void pq_encode(const PqCodebook& cb, std::span<const float> reduced,
               std::uint8_t* out) {
  if (reduced.size() != cb.d_pq()) {
    throw DataError("pq_encode: length mismatch");
  }
  for (std::uint32_t s = 0; s < cb.m; ++s) {
    out[s] = static_cast<std::uint8_t>(nearest_centroid(
        reduced.data() + static_cast<std::size_t>(s) * cb.sub_dim,
        cb.centroids.data() + static_cast<std::size_t>(s) * kK * cb.sub_dim,
        cb.sub_dim, nullptr));
  }
}

PqCodes pq_encode_all(const PqCodebook& cb, const VectorDataset& reduced) {
  PqCodes out;
  out.m = cb.m;
  out.codes.resize(reduced.size() * static_cast<std::size_t>(cb.m));
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    pq_encode(cb, reduced.vec(i), out.codes.data() + i * cb.m);
  }
  return out;
}

std::vector<float> pq_reconstruct(const PqCodebook& cb,
                                  const std::uint8_t* code_row) {
  std::vector<float> out(cb.d_pq());
  for (std::uint32_t s = 0; s < cb.m; ++s) {
    std::copy_n(cb.centroid(s, code_row[s]), cb.sub_dim,
                out.data() + static_cast<std::size_t>(s) * cb.sub_dim);
  }
  return out;
}

QueryLut build_lut(const PqCodebook& cb, std::span<const float> q_reduced) {
  if (q_reduced.size() != cb.d_pq()) {
    throw DataError("build_lut: length mismatch");
  }
  QueryLut lut(static_cast<std::size_t>(cb.m) * kK);
  for (std::uint32_t s = 0; s < cb.m; ++s) {
    const float* q = q_reduced.data() + static_cast<std::size_t>(s) * cb.sub_dim;
    for (std::uint32_t c = 0; c < kK; ++c) {
      lut[static_cast<std::size_t>(s) * kK + c] =
          l2_sq(q, cb.centroid(s, c), cb.sub_dim);
    }
  }
  return lut;
}

}  // namespace skipdisk
