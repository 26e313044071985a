#pragma once

// Page-aligned full-precision vector store.  One fixed-size record per
// point (vector bytes padded up to a 4096 multiple), no adjacency on
// disk.  File layout: a 4096-byte header (magic "SKDV", version, n, dim,
// record_size, zero padding), then records at offset 4096 + i*record_size.
// All integers little-endian.

#include <cstdint>
#include <filesystem>
#include <memory>

#include "skipdisk/dataset.hpp"

namespace skipdisk {

struct DiskLayout {
  static constexpr std::uint32_t kAlignment = 4096;
  static constexpr std::uint32_t kHeaderSize = 4096;
  static constexpr char kMagic[4] = {'S', 'K', 'D', 'V'};
  static constexpr std::uint32_t kVersion = 1;

  std::filesystem::path path;
  std::uint64_t n = 0;
  std::uint32_t dim = 0;
  std::uint32_t record_size = 0;  // bytes, multiple of kAlignment

  std::uint64_t offset(std::uint64_t i) const {
    return kHeaderSize + i * record_size;
  }
  static std::uint32_t record_size_for(std::uint32_t dim) {
    std::uint64_t raw = static_cast<std::uint64_t>(dim) * sizeof(float);
    return static_cast<std::uint32_t>((raw + kAlignment - 1) / kAlignment *
                                      kAlignment);
  }
};

DiskLayout write_store(const VectorDataset& data,
                       const std::filesystem::path& path);

// Read-only handle over a store file.  Prefers direct (cache-bypassing)
// reads and falls back to buffered I/O when the filesystem refuses
// O_DIRECT; the active mode is reported so benchmarks can label runs.
class DiskStore {
 public:
  enum class Mode { direct, buffered };

  explicit DiskStore(const std::filesystem::path& path, bool try_direct = true);
  ~DiskStore();
  DiskStore(const DiskStore&) = delete;
  DiskStore& operator=(const DiskStore&) = delete;

  const DiskLayout& layout() const { return layout_; }
  Mode mode() const { return mode_; }

  // Blocking bit-exact read of record id into out[0, dim).
  void read_record(PointId id, float* out) const;

  std::vector<float> read_sync(PointId id) const {
    std::vector<float> v(layout_.dim);
    read_record(id, v.data());
    return v;
  }

  // Raw whole-record read on the given descriptor; shared with the async
  // backends.  buf must satisfy direct-I/O alignment when fd is a direct
  // descriptor.  Returns false on a short or failed read.
  bool read_raw(int fd, std::uint64_t record, void* buf) const;

  int direct_fd() const { return direct_fd_; }
  int buffered_fd() const;  // always open; the fallback path for direct mode

 private:
  DiskLayout layout_;
  Mode mode_;
  int direct_fd_ = -1;  // valid only in direct mode
  int buffered_fd_ = -1;
};

}  // namespace skipdisk
