#include "pam2d/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace pam2d {
namespace {

unsigned initial_thread_count() {
  if (const char* env = std::getenv("PAM2D_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<unsigned>& workers() {
  static std::atomic<unsigned> n{initial_thread_count()};
  return n;
}

}  // namespace

void set_thread_count(unsigned n) { workers() = std::max(1u, n); }

unsigned thread_count() { return workers(); }

}  // namespace pam2d
