#pragma once

// Index composition: configuration, the end-to-end build pipeline
// (PCA -> PQ -> graph -> residency -> pivots -> files), serialization,
// and per-structure memory accounting.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "skipdisk/async_io.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/disk_store.hpp"
#include "skipdisk/graph.hpp"
#include "skipdisk/pca.hpp"
#include "skipdisk/pivots.hpp"
#include "skipdisk/pq.hpp"

namespace skipdisk {

// base: full-precision pivots at d_lb (dimension-level pruning only).
// pb:   bf16 pivots at d_lb.
// pbc:  pb plus point-level pruning (keep_fraction resident by indegree).
// est:  bf16 pivots at d_dade with estimation filtering (epsilon * tau).
enum class Variant : std::uint32_t { base = 0, pb = 1, pbc = 2, est = 3 };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);  // ConfigError on unknown

struct IndexConfig {
  Variant variant = Variant::pb;
  std::uint32_t d_pq = 256;
  std::uint32_t d_lb = 256;
  std::uint32_t d_dade = 128;
  std::uint32_t sub_dim = 4;
  std::uint32_t pq_iters = 10;
  std::uint32_t r = 64;
  std::uint32_t l_build = 200;
  float alpha = 1.2f;
  float keep_fraction = 0.5f;  // consulted for pbc only
  float p_s = 0.4f;            // est calibration error parameter
  std::uint64_t pca_sample_cap = 100000;

  std::uint32_t pivot_prefix() const {
    return variant == Variant::est ? d_dade : d_lb;
  }
  PivotPrecision pivot_precision() const {
    return variant == Variant::base ? PivotPrecision::f32
                                    : PivotPrecision::bf16;
  }
  float resident_fraction() const {
    return variant == Variant::pbc ? keep_fraction : 1.0f;
  }

  // Shrinks prefix lengths that exceed the data dimension; convenience
  // for default configs applied to low-dimensional datasets.
  void clamp_prefixes(std::uint32_t dim);
  // Throws ConfigError on violated invariants.
  void validate(std::uint32_t dim) const;
};

struct MemoryAccounting {
  std::uint64_t graph_bytes = 0;        // 4*R*n + n (flat table + length bytes)
  std::uint64_t pq_code_bytes = 0;      // n * m
  std::uint64_t pq_codebook_bytes = 0;  // m * 256 * sub_dim * 4
  std::uint64_t pivot_bytes = 0;        // resident * precision * d_prefix
  std::uint64_t residual_bytes = 0;     // resident * 4
  std::uint64_t bitmap_bytes = 0;       // ceil(n / 8)
  std::uint64_t total() const {
    return graph_bytes + pq_code_bytes + pq_codebook_bytes + pivot_bytes +
           residual_bytes + bitmap_bytes;
  }
};

struct SkipDiskIndex {
  IndexConfig config;
  std::uint64_t n = 0;
  std::uint32_t dim = 0;
  std::uint64_t seed = 0;
  PcaModel pca;
  PqCodebook pq;
  PqCodes codes;
  NeighborGraph graph;
  PivotStore pivots;
  EstimationCalibration calib;  // meaningful for est; identity otherwise
  std::unique_ptr<DiskStore> store;
};

MemoryAccounting account_memory(const SkipDiskIndex& index);

// Builds every structure, writes the store and index files, and returns
// the loaded index (store opened buffered; reopen via load_index for
// direct I/O).  Deterministic for fixed (data, config, seed).
SkipDiskIndex build_index(const VectorDataset& data, const IndexConfig& config,
                          std::uint64_t seed,
                          const std::filesystem::path& index_path,
                          const std::filesystem::path& store_path);

// Builds several variants over one dataset and store file in one shot.
// All configs must agree on the shared stages (PCA, PQ, graph); the
// produced files are byte-identical to independent build_index calls
// with the same seed, the shared work is just not repeated.
std::vector<SkipDiskIndex> build_index_family(
    const VectorDataset& data, std::span<const IndexConfig> configs,
    std::uint64_t seed, std::span<const std::filesystem::path> index_paths,
    const std::filesystem::path& store_path);

SkipDiskIndex load_index(const std::filesystem::path& index_path,
                         const std::filesystem::path& store_path,
                         bool try_direct = true);

// ADC-guided traversal of the in-memory structures collecting
// candidate-style (query id, point id) pairs for epsilon calibration.
std::vector<std::pair<PointId, PointId>> collect_calibration_pairs(
    const VectorDataset& data, const NeighborGraph& graph,
    const PcaModel& pca, const PqCodebook& pq, const PqCodes& codes,
    std::size_t n_queries, std::size_t per_query, std::uint64_t seed);

}  // namespace skipdisk
