#pragma once

#include <atomic>
#include <chrono>

#include "sonartalk/time.hpp"

namespace sonartalk {

// Source of pipeline wall-time. Components take a Clock (or an explicit
// TimeStamp) and never read the system clock themselves.
class Clock {
public:
    virtual ~Clock() = default;
    virtual TimeStamp now() const = 0;
};

// Manually advanced, monotone. The default for every test and for `simulate`.
class SimulatedClock final : public Clock {
public:
    TimeStamp now() const override { return TimeStamp::from_micros(us_.load()); }

    // Throws StreamError when t is earlier than now().
    void advance_to(TimeStamp t);
    void advance(Duration d);

private:
    std::atomic<std::int64_t> us_{0};
};

// Elapsed steady-clock time since construction.
class SteadyClock final : public Clock {
public:
    SteadyClock() : origin_(std::chrono::steady_clock::now()) {}

    TimeStamp now() const override {
        const auto elapsed = std::chrono::steady_clock::now() - origin_;
        return TimeStamp::from_micros(std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count());
    }

    std::chrono::steady_clock::time_point to_time_point(TimeStamp t) const {
        return origin_ + std::chrono::microseconds(t.micros());
    }

private:
    std::chrono::steady_clock::time_point origin_;
};

}  // namespace sonartalk
