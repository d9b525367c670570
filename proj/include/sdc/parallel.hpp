#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace sdc {

/// Resolves a worker count: n > 0 is taken as-is, n <= 0 falls back to the
/// SDC_WORKERS environment variable and then to the hardware concurrency.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SDC_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, count). Work is split into contiguous index
/// ranges; every invocation writes only state derived from its own index, so
/// the result is identical for any worker count.
template <class Fn>
void parallel_for(long count, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  const long n_chunks = std::min<long>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_chunks));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n_chunks));
  const long chunk = (count + n_chunks - 1) / n_chunks;
  for (long c = 0; c < n_chunks; ++c) {
    const long begin = c * chunk;
    const long end = std::min(count, begin + chunk);
    pool.emplace_back([begin, end, c, &fn, &errors] {
      try {
        for (long i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[static_cast<size_t>(c)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Pairwise (tree) summation. The reduction tree depends only on the element
/// count, never on thread scheduling, so sums are reproducible.
inline double pairwise_sum(std::span<const double> values) {
  const size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace sdc
