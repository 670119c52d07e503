#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace quadratura {

/// Worker threads to use. QUADRATURA_THREADS caps it; 0 or 1 means serial.
inline unsigned worker_count() {
  if (const char* env = std::getenv("QUADRATURA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 0) return v == 0 ? 1u : static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Calls task(i) for i in [0, count). Work is handed out dynamically; callers
/// store per-index results and reduce them in index order afterwards, so the
/// outcome does not depend on scheduling. The exception of the lowest failing
/// index is rethrown.
template <class Task>
void parallel_for(std::size_t count, Task&& task) {
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace quadratura
