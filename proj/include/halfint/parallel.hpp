#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace halfint {

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs body(lo, hi) over [begin, end) split into fixed-size chunks. Chunk
/// boundaries depend only on `chunk`, never on the thread count, so any
/// per-chunk result is identical however the work is scheduled.
template <class Body>
void parallel_chunks(std::size_t begin, std::size_t end, std::size_t chunk, unsigned threads,
                     Body&& body) {
  if (end <= begin) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t nchunks = (end - begin + chunk - 1) / chunk;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nchunks)));
  if (threads == 1) {
    for (std::size_t c = 0; c < nchunks; ++c) {
      const std::size_t lo = begin + c * chunk;
      body(c, lo, std::min(end, lo + chunk));
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      const std::size_t lo = begin + c * chunk;
      try {
        body(c, lo, std::min(end, lo + chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = nchunks;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(long double v) {
    const long double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

/// Deterministic reduction: fixed chunks, partial sums combined in chunk order.
template <class Term>
long double parallel_sum(std::size_t begin, std::size_t end, std::size_t chunk, unsigned threads,
                         Term&& term) {
  if (end <= begin) return 0.0L;
  const std::size_t nchunks = (end - begin + chunk - 1) / chunk;
  std::vector<long double> partial(nchunks, 0.0L);
  parallel_chunks(begin, end, chunk, threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    CompensatedSum s;
    for (std::size_t i = lo; i < hi; ++i) s.add(term(i));
    partial[c] = s.value();
  });
  CompensatedSum total;
  for (long double p : partial) total.add(p);
  return total.value();
}

}  // namespace halfint
