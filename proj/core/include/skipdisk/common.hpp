#pragma once

// Shared basic types, error taxonomy and deterministic random generation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace skipdisk {

using PointId = std::uint32_t;
inline constexpr PointId kInvalidId = std::numeric_limits<PointId>::max();

// Raised for malformed or out-of-range configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Raised for malformed input data: bad vector files, inconsistent
// dimensions, non-finite values, corrupt index sections (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised for filesystem / device failures: open, read, write, sync
// (CLI exit code 4).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a read is issued against a full asynchronous queue.  This is
// a programming error in the caller, not an environmental failure.
class QueueFullError : public std::logic_error {
 public:
  explicit QueueFullError(const std::string& msg) : std::logic_error(msg) {}
};

// Deterministic random source.  All stochastic steps (synthetic data,
// k-means seeding, graph insertion order, calibration sampling, simulated
// latencies) draw from an Rng seeded via derive_seed so that a single
// top-level seed pins the whole pipeline, independent of machine and of
// which other stages ran before.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).  The modulo bias is negligible for the
  // ranges used here (n far below 2^64) and keeps the draw count fixed.
  std::uint64_t bounded(std::uint64_t n) { return engine_() % n; }

  // Standard normal via Box-Muller.  Two draws per pair; the spare is
  // cached so consecutive calls consume a predictable number of engine
  // outputs.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Exponential with the given mean (mean == 0 yields exactly 0).
  double exponential(double mean) {
    if (mean <= 0.0) return 0.0;
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -mean * std::log(u);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stable sub-seed derivation: SplitMix64 over (seed, tag).  Stage tags are
// small constants chosen once; reordering pipeline stages does not change
// any stage's stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace seed_tag {
inline constexpr std::uint64_t kSynthetic = 1;
inline constexpr std::uint64_t kPcaSample = 2;
inline constexpr std::uint64_t kKmeans = 3;
inline constexpr std::uint64_t kGraphOrder = 4;
inline constexpr std::uint64_t kGraphInit = 5;
inline constexpr std::uint64_t kCalibration = 6;
inline constexpr std::uint64_t kSimulatedIo = 7;
inline constexpr std::uint64_t kResidentPick = 8;
}  // namespace seed_tag

}  // namespace skipdisk
