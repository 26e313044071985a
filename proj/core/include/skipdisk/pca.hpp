#pragma once

// PCA rotation used to order coordinates by decreasing variance.  After
// the rotation, distances over a coordinate prefix are monotonically
// nondecreasing in the prefix length and the full-dimension distance is
// preserved (orthonormal transform), which is what makes truncated
// vectors usable as distance lower bounds.

#include <cstdint>
#include <span>
#include <vector>

#include "skipdisk/dataset.hpp"

namespace skipdisk {

struct PcaModel {
  std::uint32_t dim = 0;
  std::vector<float> mean;         // dim
  std::vector<float> rotation;     // dim x dim, row-major; row i = component i
  std::vector<float> eigenvalues;  // dim, descending

  bool empty() const { return dim == 0; }
};

// Fits on a seeded sample of at most sample_cap points (the whole dataset
// when it is smaller).  Components are sorted by descending eigenvalue;
// each component's sign is fixed so its largest-magnitude coefficient is
// positive, making the model a pure function of (data, sample_cap, seed).
PcaModel fit_pca(const VectorDataset& data, std::size_t sample_cap,
                 std::uint64_t seed);

// y[0:d_prefix] = R[0:d_prefix,:] * (x - mean).  Only the requested
// prefix rows are evaluated; prefixes of a longer application agree with
// shorter applications coordinate for coordinate.
void pca_apply(const PcaModel& model, std::span<const float> x,
               std::span<float> out);

// Batch application; returns an n x d_prefix dataset.
VectorDataset pca_apply_batch(const PcaModel& model, const VectorDataset& data,
                              std::uint32_t d_prefix);

}  // namespace skipdisk
