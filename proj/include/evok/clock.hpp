#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

namespace evok {

/// Millisecond time source. Daemons take one by reference so tests can run
/// without wall time.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;
    virtual void sleep_until_ms(std::int64_t t_ms) = 0;
};

/// Monotonic clock; zero is the moment of construction.
class SteadyClock final : public Clock {
public:
    SteadyClock() : origin_(std::chrono::steady_clock::now()) {}

    std::int64_t now_ms() const override {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - origin_)
            .count();
    }

    void sleep_until_ms(std::int64_t t_ms) override {
        std::this_thread::sleep_until(origin_ + std::chrono::milliseconds(t_ms));
    }

private:
    std::chrono::steady_clock::time_point origin_;
};

/// Sleeping jumps straight to the requested time.
class FakeClock final : public Clock {
public:
    explicit FakeClock(std::int64_t start_ms = 0) : now_(start_ms) {}

    std::int64_t now_ms() const override { return now_; }
    void sleep_until_ms(std::int64_t t_ms) override {
        if (t_ms > now_) now_ = t_ms;
    }
    void advance(std::int64_t delta_ms) { now_ += delta_ms; }

private:
    std::int64_t now_;
};

}  // namespace evok
