#include "obstacle/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace obstacle {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
  if (int o = g_override.load(); o > 0) return o;
  if (const char* env = std::getenv("OBSTACLE_MFEM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_worker_count(int n) { g_override = std::max(0, n); }

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int w = std::min(worker_count(), std::max(1, n / 256));
  if (w <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int k = 0; k < w; ++k)
    pool.emplace_back([&, k] {
      const int b = static_cast<int>(static_cast<long long>(n) * k / w);
      const int e = static_cast<int>(static_cast<long long>(n) * (k + 1) / w);
      try {
        for (int i = b; i < e; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace obstacle
