#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lqw {

/// Worker count from the LQW_WORKERS environment variable, or `fallback`.
int workers_from_env(int fallback = 1);

/// Splits [0, count) into at most `workers` contiguous chunks and calls
/// fn(begin, end) for each, on separate threads when workers > 1. The chunks
/// are disjoint, so any per-index computation gives the same result for every
/// worker count.
template <class Fn>
void parallel_for(std::int64_t count, int workers, Fn&& fn) {
    const std::int64_t chunks = std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(count, 1));
    if (chunks == 1) {
        fn(std::int64_t{0}, count);
        return;
    }
    std::vector<std::jthread> threads;
    threads.reserve(static_cast<std::size_t>(chunks - 1));
    const std::int64_t per = (count + chunks - 1) / chunks;
    for (std::int64_t c = 1; c < chunks; ++c) {
        const std::int64_t begin = std::min(count, c * per);
        const std::int64_t end = std::min(count, begin + per);
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    fn(std::int64_t{0}, std::min(count, per));
}

/// Runs job(i) for i in [0, jobs) on a bounded pool. Jobs are claimed in index
/// order; the first exception (lowest job index) is rethrown after all
/// workers finish.
template <class Job>
void run_jobs(std::size_t jobs, int workers, Job&& job) {
    std::vector<std::exception_ptr> errors(jobs);
    if (workers <= 1 || jobs <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::mutex mu;
        std::size_t next = 0;
        auto worker = [&] {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard lock(mu);
                    if (next >= jobs) return;
                    i = next++;
                }
                try {
                    job(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), jobs);
        for (std::size_t w = 0; w < count; ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace lqw
