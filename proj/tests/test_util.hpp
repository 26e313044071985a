#pragma once

// Shared helpers for the test suites: scratch directories that clean up
// after themselves and small deterministic datasets.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "skipdisk/dataset.hpp"

namespace test_util {

class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto p = base / ("skipdisk_" + label + "_" + std::to_string(rd()));
      std::error_code ec;
      if (std::filesystem::create_directory(p, ec)) {
        path_ = p;
        return;
      }
    }
    throw std::runtime_error("TempDir: cannot create scratch directory");
  }

  ~TempDir() {
    if (!path_.empty()) {
      std::error_code ec;
      std::filesystem::remove_all(path_, ec);
    }
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline skipdisk::VectorDataset make_gaussian(std::size_t n, std::uint32_t dim,
                                             std::uint64_t seed) {
  skipdisk::SyntheticSpec spec;
  spec.n = n;
  spec.dim = dim;
  spec.model = skipdisk::SyntheticModel::gaussian;
  spec.seed = seed;
  return skipdisk::gen_synthetic(spec);
}

inline std::vector<char> read_file_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("read_file_bytes: cannot open " + p.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& p,
                             const std::vector<char>& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace test_util
