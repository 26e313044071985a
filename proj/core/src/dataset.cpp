#include "skipdisk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "skipdisk/distance.hpp"

namespace skipdisk {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  return f;
}

// Reads one little-endian i32 record header; false on clean EOF.
bool read_dim(std::FILE* f, const std::filesystem::path& path,
              std::uint32_t* dim_out) {
  std::int32_t d = 0;
  std::size_t got = std::fread(&d, sizeof(d), 1, f);
  if (got == 0) {
    if (std::feof(f)) return false;
    throw IoError("read failed on " + path.string());
  }
  if (d <= 0) {
    throw DataError(path.string() + ": non-positive record dimension");
  }
  *dim_out = static_cast<std::uint32_t>(d);
  return true;
}

template <typename T>
void read_payload(std::FILE* f, const std::filesystem::path& path, T* dst,
                  std::size_t count) {
  if (std::fread(dst, sizeof(T), count, f) != count) {
    throw DataError(path.string() + ": truncated record");
  }
}

}  // namespace

VectorDataset read_fvecs(const std::filesystem::path& path) {
  FilePtr f = open_or_throw(path, "rb");
  VectorDataset ds;
  std::uint32_t d = 0;
  while (read_dim(f.get(), path, &d)) {
    if (ds.dim == 0) {
      ds.dim = d;
    } else if (d != ds.dim) {
      throw DataError(path.string() + ": inconsistent record dimensions");
    }
    std::size_t off = ds.data.size();
    ds.data.resize(off + d);
    read_payload(f.get(), path, ds.data.data() + off, d);
    for (std::size_t i = off; i < off + d; ++i) {
      if (!std::isfinite(ds.data[i])) {
        throw DataError(path.string() + ": non-finite value in record");
      }
    }
  }
  return ds;
}

IdDataset read_ivecs(const std::filesystem::path& path) {
  FilePtr f = open_or_throw(path, "rb");
  IdDataset ds;
  std::uint32_t d = 0;
  while (read_dim(f.get(), path, &d)) {
    if (ds.k == 0) {
      ds.k = d;
    } else if (d != ds.k) {
      throw DataError(path.string() + ": inconsistent record dimensions");
    }
    std::size_t off = ds.data.size();
    ds.data.resize(off + d);
    read_payload(f.get(), path, ds.data.data() + off, d);
  }
  return ds;
}

VectorDataset read_bvecs(const std::filesystem::path& path) {
  FilePtr f = open_or_throw(path, "rb");
  VectorDataset ds;
  std::uint32_t d = 0;
  std::vector<std::uint8_t> raw;
  while (read_dim(f.get(), path, &d)) {
    if (ds.dim == 0) {
      ds.dim = d;
    } else if (d != ds.dim) {
      throw DataError(path.string() + ": inconsistent record dimensions");
    }
    raw.resize(d);
    read_payload(f.get(), path, raw.data(), d);
    std::size_t off = ds.data.size();
    ds.data.resize(off + d);
    for (std::uint32_t i = 0; i < d; ++i) {
      ds.data[off + i] = static_cast<float>(raw[i]);
    }
  }
  return ds;
}

void write_fvecs(const std::filesystem::path& path, const VectorDataset& ds) {
  if (ds.dim == 0 && !ds.data.empty()) {
    throw DataError("write_fvecs: zero dimension with non-empty data");
  }
  FilePtr f = open_or_throw(path, "wb");
  std::int32_t d = static_cast<std::int32_t>(ds.dim);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (std::fwrite(&d, sizeof(d), 1, f.get()) != 1 ||
        std::fwrite(ds.data.data() + i * ds.dim, sizeof(float), ds.dim,
                    f.get()) != ds.dim) {
      throw IoError("write failed on " + path.string());
    }
  }
  if (std::fflush(f.get()) != 0) {
    throw IoError("flush failed on " + path.string());
  }
}

void write_ivecs(const std::filesystem::path& path, const IdDataset& ds) {
  FilePtr f = open_or_throw(path, "wb");
  std::int32_t d = static_cast<std::int32_t>(ds.k);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (std::fwrite(&d, sizeof(d), 1, f.get()) != 1 ||
        std::fwrite(ds.data.data() + i * ds.k, sizeof(std::uint32_t), ds.k,
                    f.get()) != ds.k) {
      throw IoError("write failed on " + path.string());
    }
  }
  if (std::fflush(f.get()) != 0) {
    throw IoError("flush failed on " + path.string());
  }
}

VectorDataset gen_synthetic(const SyntheticSpec& spec) {
  if (spec.dim == 0) throw ConfigError("gen_synthetic: dim must be positive");
  if (spec.model == SyntheticModel::clustered && spec.clusters == 0) {
    throw ConfigError("gen_synthetic: clusters must be positive");
  }
  Rng rng(derive_seed(spec.seed, seed_tag::kSynthetic));
  VectorDataset ds;
  ds.dim = spec.dim;
  ds.data.resize(spec.n * static_cast<std::size_t>(spec.dim));

  if (spec.model == SyntheticModel::gaussian) {
    for (auto& x : ds.data) x = static_cast<float>(rng.normal());
    return ds;
  }

  std::vector<float> centers(static_cast<std::size_t>(spec.clusters) *
                             spec.dim);
  for (auto& x : centers) {
    x = spec.center_scale * static_cast<float>(rng.normal());
  }
  for (std::size_t i = 0; i < spec.n; ++i) {
    std::size_t c = rng.bounded(spec.clusters);
    const float* center = centers.data() + c * spec.dim;
    float* out = ds.data.data() + i * spec.dim;
    for (std::uint32_t j = 0; j < spec.dim; ++j) {
      out[j] = center[j] +
               spec.cluster_spread * static_cast<float>(rng.normal());
    }
  }
  return ds;
}

KnnResult brute_force_knn(const VectorDataset& base,
                          const VectorDataset& queries, std::uint32_t k) {
  if (base.dim != queries.dim) {
    throw DataError("brute_force_knn: dimension mismatch");
  }
  std::size_t n = base.size();
  if (k == 0 || k > n) {
    throw ConfigError("brute_force_knn: k out of range");
  }
  KnnResult out;
  out.k = k;
  out.ids.resize(queries.size() * k);
  out.dist_sq.resize(queries.size() * k);

  std::vector<std::pair<float, std::uint32_t>> heap;  // max-heap of best k
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const float* q = queries.vec(qi).data();
    heap.clear();
    for (std::size_t i = 0; i < n; ++i) {
      float d = l2_sq(q, base.vec(i).data(), base.dim);
      std::pair<float, std::uint32_t> cand{d, static_cast<std::uint32_t>(i)};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    std::sort_heap(heap.begin(), heap.end());
    for (std::uint32_t j = 0; j < k; ++j) {
      out.ids[qi * k + j] = heap[j].second;
      out.dist_sq[qi * k + j] = heap[j].first;
    }
  }
  return out;
}

double recall_at_k(std::span<const std::uint32_t> result,
                   std::span<const std::uint32_t> truth, std::uint32_t k) {
  if (k == 0) throw ConfigError("recall_at_k: k must be positive");
  if (result.size() < k || truth.size() < k) {
    throw DataError("recall_at_k: fewer than k entries");
  }
  std::vector<std::uint32_t> t(truth.begin(), truth.begin() + k);
  std::sort(t.begin(), t.end());
  std::size_t hit = 0;
  for (std::uint32_t i = 0; i < k; ++i) {
    if (std::binary_search(t.begin(), t.end(), result[i])) ++hit;
  }
  return static_cast<double>(hit) / k;
}

}  // namespace skipdisk
