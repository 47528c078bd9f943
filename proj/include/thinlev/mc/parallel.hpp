#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace thinlev::mc {

inline int default_threads() {
  if (const char* env = std::getenv("THINLEV_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

inline constexpr long long kChunk = 4096;

// Replica-parallel driver with deterministic merge: replicas are split into
// fixed chunks; workers claim chunks in any order but every chunk's partial
// result lands in its own slot and the caller reduces slot-by-slot. Results
// are therefore independent of the worker count and scheduling.
//
// Worker(chunk_index, replica_lo, replica_hi, worker_state&)
template <class State, class Worker>
std::vector<State> run_chunked(long long reps, Worker&& work, int threads = 0) {
  if (threads <= 0) threads = default_threads();
  const long long n_chunks = (reps + kChunk - 1) / kChunk;
  std::vector<State> partials(static_cast<size_t>(n_chunks));
  std::atomic<long long> next{0};
  auto body = [&]() {
    while (true) {
      long long c = next.fetch_add(1);
      if (c >= n_chunks) break;
      long long lo = c * kChunk;
      long long hi = std::min(reps, lo + kChunk);
      work(c, lo, hi, partials[static_cast<size_t>(c)]);
    }
  };
  if (threads == 1 || n_chunks == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  return partials;
}

// log-sum-exp accumulator that merges deterministically
struct LogSum {
  double max_log = -1e308;
  double sum = 0.0;  // sum of exp(lw - max_log)
  long long count = 0;

  void add(double lw) {
    if (lw > max_log) {
      sum = sum * std::exp(max_log - lw) + 1.0;
      max_log = lw;
    } else {
      sum += std::exp(lw - max_log);
    }
    ++count;
  }
  void merge(const LogSum& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    if (o.max_log > max_log) {
      sum = sum * std::exp(max_log - o.max_log) + o.sum;
      max_log = o.max_log;
    } else {
      sum += o.sum * std::exp(o.max_log - max_log);
    }
    count += o.count;
  }
  double log_total() const { return count == 0 || sum <= 0.0 ? -1e308 : max_log + std::log(sum); }
};

}  // namespace thinlev::mc
