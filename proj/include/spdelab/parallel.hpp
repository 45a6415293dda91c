#ifndef SPDELAB_PARALLEL_HPP
#define SPDELAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace spdelab {

/// Worker count: hardware concurrency, capped by SPDELAB_THREADS when set (>= 1).
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPDELAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

/// Evaluates fn(i) for i in [0, count) on up to `workers` threads and returns the results in
/// index order, so any reduction over them is independent of scheduling. The first exception
/// (lowest index) is rethrown after all workers finish.
template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn, unsigned workers = worker_count()) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
  if (n <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace spdelab

#endif  // SPDELAB_PARALLEL_HPP
