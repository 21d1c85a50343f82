#include "esir/parallel.hpp"

#include <cstdlib>
#include <string>

namespace esir {

std::size_t worker_threads() {
    if (const char* env = std::getenv("ESIR_THREADS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) return static_cast<std::size_t>(value);
        } catch (...) {
            // unparsable values fall back to auto
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace esir
