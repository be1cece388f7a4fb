#ifndef VL_PARALLEL_HPP
#define VL_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vl {

/// Worker cap: VL_IDENT_THREADS if set and positive, else the hardware count.
inline int worker_count() {
    if (const char* env = std::getenv("VL_IDENT_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(0..count-1) on up to worker_count() threads. Each index is handled
/// exactly once; callers write results into per-index slots so the outcome
/// does not depend on scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(worker_count()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace vl

#endif // VL_PARALLEL_HPP
