#include "skipdisk/disk_store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

namespace skipdisk {

namespace {

struct AlignedDeleter {
  void operator()(void* p) const { std::free(p); }
};
using AlignedBuf = std::unique_ptr<void, AlignedDeleter>;

AlignedBuf alloc_aligned(std::size_t size) {
  void* p = nullptr;
  if (posix_memalign(&p, DiskLayout::kAlignment, size) != 0) {
    throw IoError("posix_memalign failed");
  }
  return AlignedBuf(p);
}

void write_all(int fd, const void* buf, std::size_t size,
               const std::filesystem::path& path) {
  const char* p = static_cast<const char*>(buf);
  while (size > 0) {
    ssize_t w = ::write(fd, p, size);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw IoError("write failed on " + path.string() + ": " +
                    std::strerror(errno));
    }
    p += w;
    size -= static_cast<std::size_t>(w);
  }
}

void put_u32(char* dst, std::uint32_t v) { std::memcpy(dst, &v, 4); }
void put_u64(char* dst, std::uint64_t v) { std::memcpy(dst, &v, 8); }
std::uint32_t get_u32(const char* src) {
  std::uint32_t v;
  std::memcpy(&v, src, 4);
  return v;
}
std::uint64_t get_u64(const char* src) {
  std::uint64_t v;
  std::memcpy(&v, src, 8);
  return v;
}

DiskLayout read_header(int fd, const std::filesystem::path& path) {
  char header[DiskLayout::kHeaderSize];
  ssize_t r = ::pread(fd, header, sizeof(header), 0);
  if (r != static_cast<ssize_t>(sizeof(header))) {
    throw DataError(path.string() + ": store header truncated");
  }
  if (std::memcmp(header, DiskLayout::kMagic, 4) != 0) {
    throw DataError(path.string() + ": bad store magic");
  }
  std::uint32_t version = get_u32(header + 4);
  if (version != DiskLayout::kVersion) {
    throw DataError(path.string() + ": unsupported store version " +
                    std::to_string(version));
  }
  DiskLayout layout;
  layout.path = path;
  layout.n = get_u64(header + 8);
  layout.dim = get_u32(header + 16);
  layout.record_size = get_u32(header + 20);
  if (layout.dim == 0 ||
      layout.record_size != DiskLayout::record_size_for(layout.dim)) {
    throw DataError(path.string() + ": inconsistent store header");
  }
  struct stat st{};
  if (::fstat(fd, &st) == 0 &&
      static_cast<std::uint64_t>(st.st_size) <
          DiskLayout::kHeaderSize + layout.n * layout.record_size) {
    throw DataError(path.string() + ": truncated store payload");
  }
  return layout;
}

}  // namespace

DiskLayout write_store(const VectorDataset& data,
                       const std::filesystem::path& path) {
  if (data.dim == 0 || data.size() == 0) {
    throw DataError("write_store: empty dataset");
  }
  DiskLayout layout;
  layout.path = path;
  layout.n = data.size();
  layout.dim = data.dim;
  layout.record_size = DiskLayout::record_size_for(data.dim);

  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw IoError("cannot create " + path.string() + ": " +
                  std::strerror(errno));
  }
  try {
    char header[DiskLayout::kHeaderSize] = {};
    std::memcpy(header, DiskLayout::kMagic, 4);
    put_u32(header + 4, DiskLayout::kVersion);
    put_u64(header + 8, layout.n);
    put_u32(header + 16, layout.dim);
    put_u32(header + 20, layout.record_size);
    write_all(fd, header, sizeof(header), path);

    std::vector<char> record(layout.record_size, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::memcpy(record.data(), data.vec(i).data(),
                  static_cast<std::size_t>(data.dim) * sizeof(float));
      write_all(fd, record.data(), record.size(), path);
    }
    if (::fsync(fd) != 0) {
      throw IoError("fsync failed on " + path.string());
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  return layout;
}

DiskStore::DiskStore(const std::filesystem::path& path, bool try_direct) {
  buffered_fd_ = ::open(path.c_str(), O_RDONLY);
  if (buffered_fd_ < 0) {
    throw IoError("cannot open " + path.string() + ": " +
                  std::strerror(errno));
  }
  try {
    layout_ = read_header(buffered_fd_, path);
  } catch (...) {
    ::close(buffered_fd_);
    throw;
  }
  direct_fd_ = try_direct ? ::open(path.c_str(), O_RDONLY | O_DIRECT) : -1;
  mode_ = direct_fd_ >= 0 ? Mode::direct : Mode::buffered;
}

DiskStore::~DiskStore() {
  if (direct_fd_ >= 0) ::close(direct_fd_);
  if (buffered_fd_ >= 0) ::close(buffered_fd_);
}

int DiskStore::buffered_fd() const { return buffered_fd_; }

bool DiskStore::read_raw(int fd, std::uint64_t record, void* buf) const {
  std::uint64_t off = layout_.offset(record);
  std::size_t size = layout_.record_size;
  char* p = static_cast<char*>(buf);
  while (size > 0) {
    ssize_t r = ::pread(fd, p, size, static_cast<off_t>(off));
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (r == 0) return false;  // short file
    p += r;
    off += static_cast<std::uint64_t>(r);
    size -= static_cast<std::size_t>(r);
  }
  return true;
}

void DiskStore::read_record(PointId id, float* out) const {
  if (id >= layout_.n) throw DataError("read_record: id out of range");
  if (mode_ == Mode::direct) {
    AlignedBuf buf = alloc_aligned(layout_.record_size);
    if (read_raw(direct_fd_, id, buf.get())) {
      std::memcpy(out, buf.get(),
                  static_cast<std::size_t>(layout_.dim) * sizeof(float));
      return;
    }
    // fall through to the buffered path on a direct-read failure
  }
  std::vector<char> buf(layout_.record_size);
  if (!read_raw(buffered_fd(), id, buf.data())) {
    throw IoError("read failed on " + layout_.path.string());
  }
  std::memcpy(out, buf.data(),
              static_cast<std::size_t>(layout_.dim) * sizeof(float));
}

}  // namespace skipdisk
