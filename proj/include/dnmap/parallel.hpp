#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dnmap {

/// Runs fn(chunk) for chunk = 0..chunks-1 on up to `jobs` threads. Chunk
/// boundaries are chosen by the caller, so results reduced in chunk order do
/// not depend on `jobs`.
template <class Fn>
void parallel_for_chunks(std::size_t chunks, int jobs, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(chunks, std::size_t(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= chunks) return;
                try {
                    fn(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    next = chunks;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

inline int hardware_jobs() { return int(std::max(1u, std::thread::hardware_concurrency())); }

} // namespace dnmap
