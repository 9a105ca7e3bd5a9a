#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace phiconvex {

namespace detail {
inline std::atomic<unsigned>& thread_setting()
{
    static std::atomic<unsigned> threads{1};
    return threads;
}
} // namespace detail

/// Worker threads used by the exhaustive scans (default 1).
inline unsigned thread_count() { return detail::thread_setting().load(); }
inline void set_thread_count(unsigned n) { detail::thread_setting().store(std::max(1u, n)); }

/// Cubic triple scans refuse grids above this many nodes unless large scans
/// have been enabled explicitly.
inline constexpr Eigen::Index default_max_cubic_nodes = 256;

namespace detail {
inline std::atomic<bool>& large_scan_setting()
{
    static std::atomic<bool> allowed{false};
    return allowed;
}
} // namespace detail

inline bool large_scans_allowed() { return detail::large_scan_setting().load(); }
inline void allow_large_scans(bool allowed) { detail::large_scan_setting().store(allowed); }

/// Runs body(k) for k in [0, n), in contiguous blocks across threads.
///
/// Each k must only write to its own output slot; callers reduce the slots
/// afterwards in index order, so results never depend on the schedule.
template <typename Body>
void parallel_for(Eigen::Index n, Body&& body)
{
    const auto workers = static_cast<Eigen::Index>(std::min<unsigned>(thread_count(), 64));
    if (workers <= 1 || n < 2 * workers) {
        for (Eigen::Index k = 0; k < n; ++k)
            body(k);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const Eigen::Index block = (n + workers - 1) / workers;
    for (Eigen::Index w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const Eigen::Index end = std::min(n, (w + 1) * block);
                for (Eigen::Index k = w * block; k < end; ++k)
                    body(k);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace phiconvex
