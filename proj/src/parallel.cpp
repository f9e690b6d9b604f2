#include "eisbfd/parallel.hpp"

#include <cstdlib>
#include <thread>

namespace eisbfd {

int worker_count() {
  static const int count = [] {
    if (const char* env = std::getenv("EISBFD_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return count;
}

}  // namespace eisbfd
