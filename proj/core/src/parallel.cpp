#include "advjnd/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace advjnd {

int configured_workers() {
  int workers = 0;
  if (const char* env = std::getenv("ADVJND_THREADS")) {
    try {
      workers = std::stoi(env);
    } catch (const std::exception&) {
      workers = 0;
    }
  }
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    // An explicit "0" asks for serial execution; only an unset/garbage value
    // falls back to the machine width.
    const char* env = std::getenv("ADVJND_THREADS");
    if (env != nullptr && std::string(env) == "0") return 1;
    workers = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return workers < 1 ? 1 : workers;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers < 1) workers = 1;
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  const std::size_t chunk = (count + n_threads - 1) / n_threads;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace advjnd
