#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ksgm {

/// KSGM_JOBS if set to a positive integer, otherwise the hardware thread count.
[[nodiscard]] std::size_t default_jobs();

/**
 * Runs `body(i)` for i in [0, n) on at most `jobs` threads (0 = default_jobs()).
 * Work is claimed through a shared counter; callers store results by index so
 * the outcome does not depend on scheduling. The exception of the lowest
 * failing index is rethrown after all workers finish.
 */
template <class Body>
void parallel_for(const std::size_t n, std::size_t jobs, Body &&body) {
    if (jobs == 0) {
        jobs = default_jobs();
    }
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<std::exception_ptr> failures(n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{ 0 };
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(jobs);
        for (std::size_t k = 0; k < jobs; ++k) {
            threads.emplace_back(worker);
        }
        for (std::thread &t : threads) {
            t.join();
        }
    }
    for (const std::exception_ptr &failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
}

}  // namespace ksgm
