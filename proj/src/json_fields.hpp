#pragma once

// Field accessors shared by the JSON readers. Internal to the library.

#include <nlohmann/json.hpp>
#include <string>

#include "sonartalk/errors.hpp"
#include "sonartalk/time.hpp"

namespace sonartalk::detail {

inline const nlohmann::json& req(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw InputError(std::string("missing field '") + key + "'");
    }
    return *it;
}

inline std::string req_string(const nlohmann::json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

inline double req_number(const nlohmann::json& j, const char* key) {
    const auto& v = req(j, key);
    if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

inline TimeStamp as_time(const nlohmann::json& v, const char* key) {
    if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number of seconds");
    return TimeStamp::from_seconds(v.get<double>());
}

inline Duration as_duration(const nlohmann::json& v, const char* key) {
    if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number of seconds");
    return Duration::from_seconds(v.get<double>());
}

inline TimeStamp req_time(const nlohmann::json& j, const char* key) { return as_time(req(j, key), key); }

}  // namespace sonartalk::detail
