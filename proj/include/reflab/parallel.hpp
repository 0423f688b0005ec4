#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace reflab {

/// Worker count: explicit request, else REFLECT_LAB_THREADS, else hardware concurrency.
inline std::size_t resolve_threads(std::size_t requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("REFLECT_LAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Maps indices [0, count) in contiguous chunks and folds each chunk into its own
/// accumulator; chunk accumulators are merged in index order. `merge` must be
/// associative for the result to be independent of the thread count.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::size_t count, std::size_t threads, Acc init, Body body, Merge merge) {
    threads = std::max<std::size_t>(1, std::min(resolve_threads(threads), count));
    if (threads <= 1) {
        Acc acc = init;
        for (std::size_t i = 0; i < count; ++i) body(acc, i);
        return acc;
    }
    std::vector<Acc> partial(threads, init);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) body(partial[w], i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    Acc acc = init;
    for (auto& p : partial) acc = merge(std::move(acc), std::move(p));
    return acc;
}

/// Fills out[i] = make(i) for every index, in parallel.
template <class T, class Make>
std::vector<T> parallel_generate(std::size_t count, std::size_t threads, Make make) {
    std::vector<T> out(count);
    threads = std::max<std::size_t>(1, std::min(resolve_threads(threads), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = make(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) out[i] = make(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace reflab
