#include "rvm2d/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace rvm {

int thread_count() {
  if (const char* env = std::getenv("RVM2D_THREADS")) {
    int n = std::atoi(env);
    if (n < 1) throw std::runtime_error("RVM2D_THREADS must be a positive integer");
    return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(hw > 8 ? 8 : hw);
}

std::size_t chunk_count_for(std::size_t n) {
  const std::size_t min_per_chunk = 2048;
  std::size_t c = (n + min_per_chunk - 1) / min_per_chunk;
  if (c < 1) c = 1;
  if (c > 64) c = 64;
  return c;
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t chunks = chunk_count_for(n);
  const std::size_t per = (n + chunks - 1) / chunks;
  const int workers = thread_count();

  if (workers == 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t b = c * per;
      std::size_t e = b + per < n ? b + per : n;
      if (b < e) body(c, b, e);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      std::size_t b = c * per;
      std::size_t e = b + per < n ? b + per : n;
      if (b < e) body(c, b, e);
    }
  };
  std::vector<std::thread> pool;
  int spawn = workers < static_cast<int>(chunks) ? workers : static_cast<int>(chunks);
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int i = 1; i < spawn; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

double tree_sum(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::size_t n = v.size();
  while (n > 1) {
    std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) v[i] += v[i + half];
    n = half;
  }
  return v[0];
}

}  // namespace rvm
