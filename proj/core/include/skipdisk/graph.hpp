#pragma once

// Bounded-degree proximity graph (Vamana construction) kept fully in
// memory.  Adjacency is a flat n x R id table plus one length byte per
// row, so memory accounting is exactly 4*R*n + n bytes.

#include <cstdint>
#include <span>
#include <vector>

#include "skipdisk/dataset.hpp"

namespace skipdisk {

struct NeighborGraph {
  std::uint32_t r = 0;   // max out-degree
  PointId entry = 0;     // medoid
  std::vector<PointId> adjacency;  // n * r, first len[i] entries valid
  std::vector<std::uint8_t> len;   // n

  std::size_t size() const { return len.size(); }
  std::span<const PointId> neighbors(PointId i) const {
    return {adjacency.data() + static_cast<std::size_t>(i) * r, len[i]};
  }
};

struct BuildParams {
  std::uint32_t r = 64;
  std::uint32_t l_build = 200;
  float alpha = 1.2f;
};

// Id of the point nearest the dataset centroid (ties to the lowest id),
// both computed over a deterministic sample of min(n, 100000) points.
PointId medoid(const VectorDataset& data);

// Candidates are (squared distance to the target, id), sorted ascending.
// Graduated occlusion pruning: a candidate c' is occluded at slack s by
// an already-kept c when d(target, c') >= s * d(c, c').  Keeping starts
// at s = 1 and relaxes multiplicatively up to alpha, admitting the
// nearest non-occluded candidates each round, until r are kept or the
// slack budget is exhausted.  Duplicates of kept points are discarded.
std::vector<PointId> robust_prune(
    const VectorDataset& data,
    std::span<const std::pair<float, PointId>> sorted_candidates, float alpha,
    std::uint32_t r);

NeighborGraph build_vamana(const VectorDataset& data, const BuildParams& params,
                           std::uint64_t seed);

std::vector<std::uint32_t> indegree_counts(const NeighborGraph& graph);

// Fraction of nodes reachable from the entry point (connectivity sanity).
double reachable_fraction(const NeighborGraph& graph);

}  // namespace skipdisk
