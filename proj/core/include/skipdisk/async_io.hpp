#pragma once

// Bounded asynchronous read queue over a DiskStore.  A queue is owned by
// one query's control flow: issue_read() never blocks, poll_completions()
// returns whatever has finished, and the depth cap B is enforced on the
// caller side of the contract (issuing into a full queue throws).
//
// Two backends:
//  - real: worker threads doing pread (direct descriptor when available,
//    buffered fallback per read), overlapping disk waits with the
//    caller's compute.
//  - simulated: a virtual clock advanced by issue/poll costs; each read
//    completes after a seeded fixed+exponential delay.  Fully
//    deterministic, used for reproducible benchmarks and tests.

#include <cstdint>
#include <memory>
#include <vector>

#include "skipdisk/common.hpp"
#include "skipdisk/disk_store.hpp"

namespace skipdisk {

struct IoStats {
  std::uint64_t reads_issued = 0;
  std::uint64_t reads_completed = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t skip_count = 0;      // candidates filtered before issue
  std::uint64_t sync_fallbacks = 0;  // direct reads retried buffered
};

struct IoBackendConfig {
  enum class Kind { real, simulated };
  Kind kind = Kind::real;
  double sim_mean_us = 100.0;    // fixed delay component, in ticks
  double sim_jitter_us = 20.0;   // mean of the exponential component
  std::uint64_t seed = 0;        // simulated backend only
};

struct Completion {
  std::uint64_t ticket = 0;  // issue sequence number, starting at 0
  PointId id = kInvalidId;
  std::vector<float> payload;  // dim floats, bit-exact record content
};

class ReadBackend;

class AsyncReadQueue {
 public:
  AsyncReadQueue(const DiskStore& store, std::uint32_t depth,
                 const IoBackendConfig& config);
  ~AsyncReadQueue();
  AsyncReadQueue(const AsyncReadQueue&) = delete;
  AsyncReadQueue& operator=(const AsyncReadQueue&) = delete;

  // Returns the ticket number.  Throws QueueFullError at depth tickets
  // pending and DataError for an out-of-range id.
  std::uint64_t issue_read(PointId id);

  // Non-blocking; every issued ticket is returned exactly once across
  // all polls.  A failed read surfaces as IoError here.
  std::vector<Completion> poll_completions();

  std::uint32_t depth() const { return depth_; }
  std::uint32_t pending() const { return pending_; }
  std::uint32_t free_slots() const { return depth_ - pending_; }

  const IoStats& stats() const { return stats_; }
  bool simulated() const;
  // Virtual time in ticks (simulated backend); 0 for the real backend.
  std::uint64_t sim_clock() const;

 private:
  const DiskStore& store_;
  std::uint32_t depth_;
  std::uint32_t pending_ = 0;
  std::uint64_t next_ticket_ = 0;
  IoStats stats_;
  std::unique_ptr<ReadBackend> backend_;
};

}  // namespace skipdisk
