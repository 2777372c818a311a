#include "ksgm/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace ksgm {

std::size_t default_jobs() {
    if (const char *env = std::getenv("KSGM_JOBS")) {
        std::size_t jobs = 0;
        const char *end = env + std::strlen(env);
        const auto [ptr, ec] = std::from_chars(env, end, jobs);
        if (ec == std::errc{} && ptr == end && jobs > 0) {
            return jobs;
        }
    }
    const unsigned hardware = std::thread::hardware_concurrency();
    return hardware == 0 ? 1 : hardware;
}

}  // namespace ksgm
