#ifndef IDENTMINER_PARALLEL_HPP
#define IDENTMINER_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

/**
 * @file parallel.hpp
 * @brief Ordered parallel map over contiguous chunks.
 */

namespace identminer {

/**
 * Split `[0, n)` into at most `workers` contiguous chunks and call `fun(start, end, chunk)` on each, possibly in parallel.
 * Chunk boundaries depend only on `n` and `workers`. If any call throws, the exception of the lowest-numbered
 * failing chunk is rethrown after all threads join.
 */
template<typename Function_>
void parallelize_chunks(std::size_t n, std::size_t workers, Function_ fun) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers <= 1) {
        if (n) {
            fun(std::size_t(0), n, std::size_t(0));
        }
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::size_t base = n / workers, extra = n % workers, start = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t len = base + (w < extra);
        threads.emplace_back([&fun, &errors, start, len, w]() {
            try {
                fun(start, start + len, w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        start += len;
    }
    for (auto& t : threads) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/** Apply `fun` to every element; the output order matches the input regardless of `workers`. */
template<typename Input_, typename Function_>
auto parallel_map(const std::vector<Input_>& input, std::size_t workers, Function_ fun) {
    using Output = std::decay_t<std::invoke_result_t<Function_&, const Input_&> >;
    std::vector<std::vector<Output> > parts(std::max<std::size_t>(1, std::min(workers, input.size())));
    parallelize_chunks(input.size(), workers, [&](std::size_t start, std::size_t end, std::size_t chunk) {
        auto& part = parts[chunk];
        part.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) {
            part.push_back(fun(input[i]));
        }
    });

    std::vector<Output> out;
    out.reserve(input.size());
    for (auto& part : parts) {
        for (auto& x : part) {
            out.push_back(std::move(x));
        }
    }
    return out;
}

}

#endif
