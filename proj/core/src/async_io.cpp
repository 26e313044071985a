#include "skipdisk/async_io.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

namespace skipdisk {

struct RawCompletion {
  std::uint64_t ticket;
  PointId id;
  std::vector<float> payload;
  bool failed;
  bool fell_back;
};

class ReadBackend {
 public:
  virtual ~ReadBackend() = default;
  virtual void issue(std::uint64_t ticket, PointId id) = 0;
  virtual std::vector<RawCompletion> poll() = 0;
  virtual bool simulated() const = 0;
  virtual std::uint64_t clock() const { return 0; }
};

namespace {

// Worker threads service a job deque with pread; completions accumulate
// until the owner polls.  Direct reads that fail are retried once on the
// buffered descriptor.
class ThreadedBackend final : public ReadBackend {
 public:
  ThreadedBackend(const DiskStore& store, std::uint32_t depth)
      : store_(store) {
    std::uint32_t workers = std::min<std::uint32_t>(depth, 4);
    for (std::uint32_t i = 0; i < workers; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadedBackend() override {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void issue(std::uint64_t ticket, PointId id) override {
    {
      std::lock_guard<std::mutex> lk(mu_);
      jobs_.push_back({ticket, id});
    }
    cv_.notify_one();
  }

  std::vector<RawCompletion> poll() override {
    std::vector<RawCompletion> out;
    {
      std::lock_guard<std::mutex> lk(mu_);
      out.swap(done_);
    }
    // Deliver in ticket order so schedules are as stable as the backend
    // allows; completion timing itself stays nondeterministic.
    std::sort(out.begin(), out.end(),
              [](const RawCompletion& a, const RawCompletion& b) {
                return a.ticket < b.ticket;
              });
    return out;
  }

  bool simulated() const override { return false; }

 private:
  struct Job {
    std::uint64_t ticket;
    PointId id;
  };

  void worker_loop() {
    const DiskLayout& layout = store_.layout();
    void* aligned = nullptr;
    if (posix_memalign(&aligned, DiskLayout::kAlignment, layout.record_size)) {
      aligned = nullptr;  // degrade to buffered-only below
    }
    std::vector<char> plain(layout.record_size);
    while (true) {
      Job job;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [this] { return stop_ || !jobs_.empty(); });
        if (jobs_.empty()) break;  // stop_ set and queue drained
        job = jobs_.front();
        jobs_.pop_front();
      }
      RawCompletion c{job.ticket, job.id, {}, false, false};
      const char* src = nullptr;
      if (store_.mode() == DiskStore::Mode::direct && aligned != nullptr &&
          store_.read_raw(store_.direct_fd(), job.id, aligned)) {
        src = static_cast<const char*>(aligned);
      } else {
        if (store_.mode() == DiskStore::Mode::direct) c.fell_back = true;
        if (store_.read_raw(store_.buffered_fd(), job.id, plain.data())) {
          src = plain.data();
        }
      }
      if (src != nullptr) {
        c.payload.resize(layout.dim);
        std::memcpy(c.payload.data(), src,
                    static_cast<std::size_t>(layout.dim) * sizeof(float));
      } else {
        c.failed = true;
      }
      {
        std::lock_guard<std::mutex> lk(mu_);
        done_.push_back(std::move(c));
      }
    }
    std::free(aligned);
  }

  const DiskStore& store_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Job> jobs_;
  std::vector<RawCompletion> done_;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

// Virtual-clock backend.  The clock advances by one tick per issue and
// per poll; a read issued at time t completes once the clock reaches
// t + delay, where delay = sim_mean_us + Exp(sim_jitter_us) drawn from a
// seeded stream.  Payloads are served synchronously from the buffered
// descriptor at delivery, so data is bit-exact while timing is modeled.
class SimulatedBackend final : public ReadBackend {
 public:
  SimulatedBackend(const DiskStore& store, const IoBackendConfig& cfg)
      : store_(store),
        rng_(derive_seed(cfg.seed, seed_tag::kSimulatedIo)),
        mean_(cfg.sim_mean_us),
        jitter_(cfg.sim_jitter_us) {}

  void issue(std::uint64_t ticket, PointId id) override {
    clock_ += 1;
    double delay = mean_ + rng_.exponential(jitter_);
    std::uint64_t ticks = static_cast<std::uint64_t>(delay);
    if (ticks == 0) ticks = 1;
    pending_.push_back({clock_ + ticks, ticket, id});
  }

  std::vector<RawCompletion> poll() override {
    if (!pending_.empty()) clock_ += 1;
    std::vector<RawCompletion> out;
    for (std::size_t i = 0; i < pending_.size();) {
      if (pending_[i].deadline <= clock_) {
        out.push_back(fetch(pending_[i]));
        pending_[i] = pending_.back();
        pending_.pop_back();
      } else {
        ++i;
      }
    }
    std::sort(out.begin(), out.end(),
              [](const RawCompletion& a, const RawCompletion& b) {
                return a.ticket < b.ticket;
              });
    return out;
  }

  bool simulated() const override { return true; }
  std::uint64_t clock() const override { return clock_; }

 private:
  struct Pending {
    std::uint64_t deadline;
    std::uint64_t ticket;
    PointId id;
  };

  RawCompletion fetch(const Pending& p) {
    RawCompletion c{p.ticket, p.id, {}, false, false};
    std::vector<char> buf(store_.layout().record_size);
    if (store_.read_raw(store_.buffered_fd(), p.id, buf.data())) {
      c.payload.resize(store_.layout().dim);
      std::memcpy(c.payload.data(), buf.data(),
                  static_cast<std::size_t>(store_.layout().dim) *
                      sizeof(float));
    } else {
      c.failed = true;
    }
    return c;
  }

  const DiskStore& store_;
  Rng rng_;
  double mean_;
  double jitter_;
  std::uint64_t clock_ = 0;
  std::vector<Pending> pending_;
};

}  // namespace

AsyncReadQueue::AsyncReadQueue(const DiskStore& store, std::uint32_t depth,
                               const IoBackendConfig& config)
    : store_(store), depth_(depth) {
  if (depth == 0) throw ConfigError("AsyncReadQueue: depth must be >= 1");
  if (config.kind == IoBackendConfig::Kind::simulated) {
    backend_ = std::make_unique<SimulatedBackend>(store, config);
  } else {
    backend_ = std::make_unique<ThreadedBackend>(store, depth);
  }
}

AsyncReadQueue::~AsyncReadQueue() = default;

std::uint64_t AsyncReadQueue::issue_read(PointId id) {
  if (id >= store_.layout().n) throw DataError("issue_read: id out of range");
  if (pending_ >= depth_) {
    throw QueueFullError("issue_read: queue at depth " +
                         std::to_string(depth_));
  }
  std::uint64_t ticket = next_ticket_++;
  backend_->issue(ticket, id);
  ++pending_;
  ++stats_.reads_issued;
  return ticket;
}

std::vector<Completion> AsyncReadQueue::poll_completions() {
  std::vector<RawCompletion> raw = backend_->poll();
  std::vector<Completion> out;
  out.reserve(raw.size());
  for (auto& r : raw) {
    --pending_;
    if (r.fell_back) ++stats_.sync_fallbacks;
    if (r.failed) {
      throw IoError("async read of record " + std::to_string(r.id) +
                    " failed");
    }
    ++stats_.reads_completed;
    stats_.bytes_read += store_.layout().record_size;
    out.push_back(Completion{r.ticket, r.id, std::move(r.payload)});
  }
  return out;
}

bool AsyncReadQueue::simulated() const { return backend_->simulated(); }

std::uint64_t AsyncReadQueue::sim_clock() const { return backend_->clock(); }

}  // namespace skipdisk
