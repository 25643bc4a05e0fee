#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace infoqm {

/// Runs fn(i) for i in [0, n) on up to `threads` workers with a static
/// round-robin split. The first exception (lowest index) is rethrown after
/// all workers join.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(n);
    auto run = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace infoqm
