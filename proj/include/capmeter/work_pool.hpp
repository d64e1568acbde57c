#pragma once

// Persistent fork-join pool for independent index tasks. Work items share
// only immutable inputs and write to disjoint slots, so results are
// identical at any thread count; callers aggregate with order-insensitive
// reductions (or replay outcomes in index order for sequential-equivalent
// early exits). One dispatch at a time: for_each blocks until the range is
// done, with the calling thread participating.

#include <cassert>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace capmeter {

class WorkPool {
 public:
  /// threads = 0 picks hardware_concurrency; 1 means run everything inline.
  explicit WorkPool(unsigned threads = 0)
      : threads_(threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads) {
    for (unsigned t = 1; t < threads_; ++t)
      workers_.emplace_back([this] { worker_loop(); });
  }

  WorkPool(const WorkPool&) = delete;
  WorkPool& operator=(const WorkPool&) = delete;

  ~WorkPool() {
    {
      std::lock_guard lock(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  unsigned thread_count() const noexcept { return threads_; }

  /// Calls f(i) for every i in [begin, end); returns when all calls have
  /// finished. Indices are handed out dynamically.
  template <class F>
  void for_each(std::uint64_t begin, std::uint64_t end, F&& f) const {
    if (begin >= end) return;
    if (workers_.empty()) {
      for (std::uint64_t i = begin; i < end; ++i) f(i);
      return;
    }
    std::function<void(std::uint64_t)> job = [&f](std::uint64_t i) { f(i); };
    std::unique_lock lock(m_);
    assert(job_ == nullptr && "WorkPool: nested or concurrent for_each");
    job_ = &job;
    next_ = begin;
    end_ = end;
    remaining_ = end - begin;
    cv_.notify_all();
    run_available(lock);
    done_cv_.wait(lock, [&] { return remaining_ == 0; });
    job_ = nullptr;
  }

 private:
  // Claims and runs indices until the range is exhausted; lock held on entry
  // and exit.
  void run_available(std::unique_lock<std::mutex>& lock) const {
    while (job_ != nullptr && next_ < end_) {
      const std::uint64_t i = next_++;
      const auto* job = job_;
      lock.unlock();
      (*job)(i);
      lock.lock();
      if (--remaining_ == 0) done_cv_.notify_all();
    }
  }

  void worker_loop() const {
    std::unique_lock lock(m_);
    while (true) {
      cv_.wait(lock, [&] { return stop_ || (job_ != nullptr && next_ < end_); });
      if (stop_) return;
      run_available(lock);
    }
  }

  unsigned threads_;
  std::vector<std::thread> workers_;
  mutable std::mutex m_;
  mutable std::condition_variable cv_, done_cv_;
  mutable const std::function<void(std::uint64_t)>* job_ = nullptr;
  mutable std::uint64_t next_ = 0, end_ = 0, remaining_ = 0;
  mutable bool stop_ = false;
};

}  // namespace capmeter
