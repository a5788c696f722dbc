#include "sgmfs/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace sgmfs {

namespace {

std::atomic<int> g_override{0};

int env_cap() {
  static const int cached = [] {
    const char* raw = std::getenv("SGMFS_THREADS");
    if (raw == nullptr) return 0;
    try {
      const int value = std::stoi(raw);
      return value > 0 ? value : 0;
    } catch (...) {
      return 0;
    }
  }();
  return cached;
}

}  // namespace

int max_threads() {
  const int forced = g_override.load(std::memory_order_relaxed);
  if (forced > 0) return forced;
  int threads = omp_get_max_threads();
  const int cap = env_cap();
  if (cap > 0 && cap < threads) threads = cap;
  return threads > 0 ? threads : 1;
}

void set_thread_override(int threads) {
  g_override.store(threads > 0 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace sgmfs
