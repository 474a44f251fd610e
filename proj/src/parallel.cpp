#include "satspec/parallel.hpp"

#include <cstdlib>
#include <string>

namespace satspec {

unsigned worker_count() {
  if (const char* env = std::getenv("SATSPEC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace satspec
