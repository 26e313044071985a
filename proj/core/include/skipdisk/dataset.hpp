#pragma once

// In-memory vector datasets and the fvecs/ivecs/bvecs on-disk formats:
// each record is a little-endian int32 dimension followed by that many
// float32 / int32 / uint8 payload entries.  Every record in a file must
// share one dimension.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "skipdisk/common.hpp"

namespace skipdisk {

// Dense row-major collection of n vectors of equal dimension.
struct VectorDataset {
  std::uint32_t dim = 0;
  std::vector<float> data;  // n * dim entries

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }

  std::span<const float> vec(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  std::span<float> vec(std::size_t i) {
    return {data.data() + i * dim, dim};
  }
};

// Ground-truth id lists, one row of k ids per query.
struct IdDataset {
  std::uint32_t k = 0;
  std::vector<std::uint32_t> data;  // n * k entries

  std::size_t size() const { return k == 0 ? 0 : data.size() / k; }

  std::span<const std::uint32_t> row(std::size_t i) const {
    return {data.data() + i * k, k};
  }
};

// Readers validate dimension consistency, finiteness (fvecs) and record
// framing, throwing DataError for malformed content and IoError for
// filesystem failures.
VectorDataset read_fvecs(const std::filesystem::path& path);
IdDataset read_ivecs(const std::filesystem::path& path);
VectorDataset read_bvecs(const std::filesystem::path& path);  // widened to float

void write_fvecs(const std::filesystem::path& path, const VectorDataset& ds);
void write_ivecs(const std::filesystem::path& path, const IdDataset& ds);

enum class SyntheticModel { gaussian, clustered };

struct SyntheticSpec {
  std::size_t n = 0;
  std::uint32_t dim = 0;
  SyntheticModel model = SyntheticModel::gaussian;
  std::uint32_t clusters = 64;     // clustered model only
  float center_scale = 4.0f;       // stddev of cluster-center coordinates
  float cluster_spread = 1.0f;     // within-cluster stddev per coordinate
  std::uint64_t seed = 0;
};

// Deterministic synthetic data.  gaussian: iid N(0, 1) coordinates.
// clustered: centers drawn N(0, center_scale^2), points assigned to a
// seeded uniform center and perturbed with N(0, cluster_spread^2);
// clusters=1 degenerates to a gaussian shifted by the single center.
VectorDataset gen_synthetic(const SyntheticSpec& spec);

// Exact k nearest neighbors by quadratic scan; ties broken by ascending
// id.  Returns ids and squared distances, row-major [queries x k].
struct KnnResult {
  std::uint32_t k = 0;
  std::vector<std::uint32_t> ids;
  std::vector<float> dist_sq;
};
KnnResult brute_force_knn(const VectorDataset& base,
                          const VectorDataset& queries, std::uint32_t k);

// |result ∩ truth| / k for one query.  Membership is by id.
double recall_at_k(std::span<const std::uint32_t> result,
                   std::span<const std::uint32_t> truth, std::uint32_t k);

}  // namespace skipdisk
