#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "fasthymix/hsi_cube.hpp"

namespace fasthymix {

/// Number of workers to use for a requested count; 0 means all cores.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, n) over contiguous chunks, one per worker.
///
/// Callers must only write to per-index outputs so that results do not
/// depend on the worker count. If any call throws, the exception from the
/// lowest failing chunk is rethrown after all workers finish.
template <typename Fn>
void parallel_for(Index n, int threads, Fn&& fn) {
    const Index workers = std::min<Index>(resolve_threads(threads), std::max<Index>(n, 1));
    if (workers <= 1) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w) {
        const Index begin = n * w / workers;
        const Index end = n * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (Index i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace fasthymix
