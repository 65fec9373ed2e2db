// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace accrual {

/// Calls body(i) for every i in [0, count), spread over `workers` threads in
/// contiguous blocks. The first exception thrown by any call is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    const auto w = static_cast<std::size_t>(std::max(1, workers));
    if (w == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t threads = std::min(w, count);
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t k = 0; k < threads; ++k) {
            pool.emplace_back([&, k] {
                const std::size_t begin = k * count / threads;
                const std::size_t end = (k + 1) * count / threads;
                try {
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace accrual
