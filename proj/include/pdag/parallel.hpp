#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace pdag {

/// Number of workers to use when the caller asks for `requested` (0 = all cores).
inline int resolve_threads(int requested)
{
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is processed exactly once;
/// the exception from the lowest failing index is rethrown after all workers finish.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn)
{
    const int workers = std::min(resolve_threads(threads), count);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[static_cast<std::size_t>(i)] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace pdag
