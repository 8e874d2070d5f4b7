#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>

namespace vigil::ingest {

/// Sliding-log limiter: at most ceil(rate) acquisitions in any window of
/// ceil(rate)/rate seconds, which bounds every 1-second window by ceil(rate).
/// A non-positive rate disables limiting.
class RateLimiter {
public:
    using Duration = std::chrono::nanoseconds;
    using NowFn = std::function<Duration()>;
    using SleepFn = std::function<void(Duration)>;

    explicit RateLimiter(double rate);
    RateLimiter(double rate, NowFn now, SleepFn sleep);

    /// Blocks until a request may be sent; returns the time it was granted.
    Duration acquire();

    std::size_t capacity() const { return capacity_; }
    Duration window() const { return window_; }

private:
    std::size_t capacity_ = 0;
    Duration window_{0};
    NowFn now_;
    SleepFn sleep_;
    std::mutex mu_;
    std::deque<Duration> granted_;
};

}  // namespace vigil::ingest
