#pragma once

// Product quantization over PCA-reduced prefixes.  Each sub_dim-wide
// subspace is vector-quantized with its own 256-entry codebook; queries
// score candidates with an asymmetric-distance lookup table (one table
// per query, m x 256 squared partial distances).

#include <cstdint>
#include <span>
#include <vector>

#include "skipdisk/dataset.hpp"

namespace skipdisk {

struct PqCodebook {
  std::uint32_t m = 0;        // subspace count
  std::uint32_t sub_dim = 0;  // dims per subspace; m * sub_dim = d_pq
  std::vector<float> centroids;  // m * 256 * sub_dim

  std::uint32_t d_pq() const { return m * sub_dim; }
  const float* centroid(std::uint32_t s, std::uint32_t c) const {
    return centroids.data() +
           (static_cast<std::size_t>(s) * 256 + c) * sub_dim;
  }
};

// Per-point codes, row-major n x m, one byte per subspace.
struct PqCodes {
  std::uint32_t m = 0;
  std::vector<std::uint8_t> codes;

  std::size_t size() const { return m == 0 ? 0 : codes.size() / m; }
  const std::uint8_t* row(std::size_t i) const { return codes.data() + i * m; }
};

using QueryLut = std::vector<float>;  // m * 256 squared partial distances

// Plain k-means with k fixed at 256: k-means++ seeding, a fixed number of
// Lloyd iterations, empty clusters re-seeded from the point currently
// farthest from its assigned centroid.  Shared by the quantizer and the
// cluster-pivot comparison in analyze.
struct KmeansResult {
  std::vector<float> centroids;   // 256 * dim
  std::vector<std::uint8_t> assignment;  // n
  std::vector<double> objective;  // mean squared error after each iteration
};
KmeansResult kmeans256(const float* data, std::size_t n, std::uint32_t dim,
                       std::uint32_t iters, std::uint64_t seed);

// reduced must be n x d_pq with d_pq divisible by sub_dim and n >= 256.
PqCodebook train_pq(const VectorDataset& reduced, std::uint32_t sub_dim,
                    std::uint32_t iters, std::uint64_t seed);

// Nearest centroid per subspace, ties to the lowest index.
void pq_encode(const PqCodebook& cb, std::span<const float> reduced,
               std::uint8_t* out);
PqCodes pq_encode_all(const PqCodebook& cb, const VectorDataset& reduced);

// Concatenation of the centroids selected by a code row.
std::vector<float> pq_reconstruct(const PqCodebook& cb,
                                  const std::uint8_t* code_row);

QueryLut build_lut(const PqCodebook& cb, std::span<const float> q_reduced);

inline float adc_distance(const QueryLut& lut, const std::uint8_t* code_row,
                          std::uint32_t m) {
  float acc = 0.f;
  for (std::uint32_t s = 0; s < m; ++s) {
    acc += lut[static_cast<std::size_t>(s) * 256 + code_row[s]];
  }
  return acc;
}

}  // namespace skipdisk
