#include "jjspd/parallel.hpp"

#include <atomic>

namespace jjspd {

namespace {
std::atomic<unsigned> g_thread_limit{0};
}

void set_thread_limit(unsigned threads) { g_thread_limit.store(threads); }

unsigned thread_limit() {
  const unsigned limit = g_thread_limit.load();
  if (limit != 0) {
    return limit;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace jjspd
