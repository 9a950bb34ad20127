#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sonartalk {

// Signed span of time at microsecond resolution.
class Duration {
public:
    constexpr Duration() = default;

    static constexpr Duration from_micros(std::int64_t us) { return Duration(us); }
    // Rounds to the nearest microsecond. Throws InputError on NaN/inf.
    static Duration from_seconds(double seconds);
    static Duration parse(std::string_view text);

    constexpr std::int64_t micros() const { return us_; }
    double seconds() const { return static_cast<double>(us_) / 1e6; }
    std::string str() const;

    constexpr auto operator<=>(const Duration&) const = default;
    constexpr Duration operator+(Duration o) const { return Duration(us_ + o.us_); }
    constexpr Duration operator-(Duration o) const { return Duration(us_ - o.us_); }
    constexpr Duration operator-() const { return Duration(-us_); }
    constexpr Duration operator*(std::int64_t k) const { return Duration(us_ * k); }
    Duration& operator+=(Duration o) {
        us_ += o.us_;
        return *this;
    }

private:
    constexpr explicit Duration(std::int64_t us) : us_(us) {}
    std::int64_t us_ = 0;
};

// Non-negative point on a clock (media-time or wall-time; the owner names which).
// Stored as integer microseconds, rendered as decimal seconds with 6 digits.
class TimeStamp {
public:
    constexpr TimeStamp() = default;

    // Throws InputError when us < 0.
    static TimeStamp from_micros(std::int64_t us);
    static TimeStamp from_seconds(double seconds);
    // Exact decimal parse: "12", "12.5", "0.000001". More than 6 fraction digits is an error.
    static TimeStamp parse(std::string_view text);

    constexpr std::int64_t micros() const { return us_; }
    double seconds() const { return static_cast<double>(us_) / 1e6; }
    std::string str() const;

    constexpr auto operator<=>(const TimeStamp&) const = default;

    TimeStamp operator+(Duration d) const { return from_micros(us_ + d.micros()); }
    TimeStamp operator-(Duration d) const { return from_micros(us_ - d.micros()); }
    Duration operator-(TimeStamp o) const { return Duration::from_micros(us_ - o.us_); }

private:
    std::int64_t us_ = 0;
};

// Microseconds per second, for readers of the raw representation.
inline constexpr std::int64_t micros_per_second = 1'000'000;

}  // namespace sonartalk
