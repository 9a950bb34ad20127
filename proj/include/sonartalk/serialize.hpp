#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sonartalk/time.hpp"
#include "sonartalk/types.hpp"

namespace sonartalk {

// Builds a JSON object with sorted keys and no whitespace. Time stamps are
// written as bare decimal numbers with exactly 6 fractional digits, which a
// generic JSON library would not preserve.
class CanonicalObject {
public:
    CanonicalObject& raw(std::string key, std::string json_token);
    CanonicalObject& string(std::string key, std::string_view value);
    CanonicalObject& time(std::string key, TimeStamp value);
    CanonicalObject& duration(std::string key, Duration value);
    CanonicalObject& integer(std::string key, std::int64_t value);
    CanonicalObject& null(std::string key);
    CanonicalObject& strings(std::string key, const std::vector<std::string>& values);

    std::string str() const;

private:
    std::map<std::string, std::string> fields_;
};

// Quoted, escaped JSON string. Throws InputError on invalid UTF-8.
std::string json_quote(std::string_view s);

std::string to_json_line(const SpeechSegment& s);
std::string to_json_line(const Utterance& u);
std::string to_json_line(const ConversationMessage& m);
std::string to_json_line(const TimelineEvent& e);

// Parse a single JSON object line. Throw InputError on schema violations.
SpeechSegment parse_speech_segment(std::string_view line);
Utterance parse_utterance(std::string_view line);
ConversationMessage parse_message(std::string_view line);
TimelineEvent parse_timeline_event(std::string_view line);

}  // namespace sonartalk
