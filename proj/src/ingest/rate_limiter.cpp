#include "vigil/ingest/rate_limiter.hpp"

#include <cmath>
#include <thread>

namespace vigil::ingest {

namespace {

RateLimiter::Duration steady_now() { return std::chrono::steady_clock::now().time_since_epoch(); }

}  // namespace

RateLimiter::RateLimiter(double rate)
    : RateLimiter(rate, steady_now, [](Duration d) { std::this_thread::sleep_for(d); }) {}

RateLimiter::RateLimiter(double rate, NowFn now, SleepFn sleep) : now_(std::move(now)), sleep_(std::move(sleep)) {
    if (rate > 0 && std::isfinite(rate)) {
        capacity_ = static_cast<std::size_t>(std::ceil(rate));
        window_ = std::chrono::duration_cast<Duration>(std::chrono::duration<double>(capacity_ / rate));
    }
}

RateLimiter::Duration RateLimiter::acquire() {
    std::lock_guard lock(mu_);
    if (capacity_ == 0) return now_();
    while (true) {
        const auto t = now_();
        while (!granted_.empty() && granted_.front() + window_ <= t) granted_.pop_front();
        if (granted_.size() < capacity_) {
            granted_.push_back(t);
            return t;
        }
        // Waiters queue on the mutex, which keeps grants in arrival order.
        sleep_(granted_.front() + window_ - t);
    }
}

}  // namespace vigil::ingest
