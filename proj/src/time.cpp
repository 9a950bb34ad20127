#include "sonartalk/time.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "sonartalk/errors.hpp"

namespace sonartalk {

namespace {

std::int64_t round_seconds_to_micros(double seconds) {
    if (!std::isfinite(seconds)) {
        throw InputError("time value is not finite");
    }
    const double us = seconds * 1e6;
    if (std::fabs(us) > 9.0e15) {
        throw InputError("time value out of range");
    }
    return std::llround(us);
}

// Parses [-]digits[.digits] exactly into microseconds.
std::int64_t parse_decimal_micros(std::string_view text, bool allow_negative) {
    if (text.empty()) {
        throw InputError("empty time value");
    }
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        ++i;
    }
    if (negative && !allow_negative) {
        throw InputError("negative time stamp: " + std::string(text));
    }
    std::int64_t whole = 0;
    std::size_t whole_digits = 0;
    for (; i < text.size() && text[i] != '.'; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') {
            throw InputError("malformed time value: " + std::string(text));
        }
        if (whole > 9'000'000'000LL) {
            throw InputError("time value out of range: " + std::string(text));
        }
        whole = whole * 10 + (c - '0');
        ++whole_digits;
    }
    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (i < text.size()) {
        ++i;  // '.'
        for (; i < text.size(); ++i) {
            const char c = text[i];
            if (c < '0' || c > '9') {
                throw InputError("malformed time value: " + std::string(text));
            }
            if (++frac_digits > 6) {
                throw InputError("more than 6 fractional digits: " + std::string(text));
            }
            frac = frac * 10 + (c - '0');
        }
    }
    if (whole_digits == 0 && frac_digits == 0) {
        throw InputError("malformed time value: " + std::string(text));
    }
    for (std::size_t k = frac_digits; k < 6; ++k) {
        frac *= 10;
    }
    const std::int64_t us = whole * micros_per_second + frac;
    return negative ? -us : us;
}

std::string format_micros(std::int64_t us) {
    const bool negative = us < 0;
    const std::uint64_t mag = negative ? 0ULL - static_cast<std::uint64_t>(us) : static_cast<std::uint64_t>(us);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%06llu", negative ? "-" : "",
                  static_cast<unsigned long long>(mag / micros_per_second),
                  static_cast<unsigned long long>(mag % micros_per_second));
    return buf;
}

}  // namespace

Duration Duration::from_seconds(double seconds) { return Duration(round_seconds_to_micros(seconds)); }

Duration Duration::parse(std::string_view text) { return Duration(parse_decimal_micros(text, true)); }

std::string Duration::str() const { return format_micros(us_); }

TimeStamp TimeStamp::from_micros(std::int64_t us) {
    if (us < 0) {
        throw InputError("time stamp must be non-negative, got " + format_micros(us) + " s");
    }
    TimeStamp t;
    t.us_ = us;
    return t;
}

TimeStamp TimeStamp::from_seconds(double seconds) { return from_micros(round_seconds_to_micros(seconds)); }

TimeStamp TimeStamp::parse(std::string_view text) { return from_micros(parse_decimal_micros(text, false)); }

std::string TimeStamp::str() const { return format_micros(us_); }

}  // namespace sonartalk
