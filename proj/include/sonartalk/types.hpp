#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sonartalk/time.hpp"

namespace sonartalk {

// Speaker label such as "speaker_1". Never empty.
class SpeakerId {
public:
    explicit SpeakerId(std::string id);

    const std::string& str() const { return id_; }
    auto operator<=>(const SpeakerId&) const = default;

private:
    std::string id_;
};

// Per-speaker interval on media-time.
struct SpeechSegment {
    SpeakerId speaker;
    TimeStamp start;
    TimeStamp end;

    bool operator==(const SpeechSegment&) const = default;
};

enum class EmitReason { terminal, soft_split, hard_flush, speaker_change, stream_end };

// Finalized text unit handed to synthesis. start/end are media-time;
// input_wall is the wall-time at which the last contributing piece arrived.
struct Utterance {
    SpeakerId speaker;
    std::string text;
    TimeStamp start;
    TimeStamp end;
    EmitReason emit_reason = EmitReason::terminal;
    TimeStamp input_wall;
    std::vector<std::string> source_units;

    bool operator==(const Utterance&) const = default;
};

inline constexpr int protocol_version = 1;

// Wire-level unit. start/end are media-time.
struct ConversationMessage {
    int protocol_version = sonartalk::protocol_version;
    std::uint64_t msg_id = 0;
    SpeakerId speaker;
    TimeStamp start;
    TimeStamp end;
    std::string text;
    std::optional<std::string> category;

    bool operator==(const ConversationMessage&) const = default;
};

enum class Component { asr, text_segmentation, tts, video_generated, video_started, video_played, channel, queue };

enum class EventKind { input, output, chunk_generated, chunk_started, chunk_ended };

struct TimelineEvent {
    Component component = Component::asr;
    EventKind kind = EventKind::input;
    std::string unit_id;
    TimeStamp media_end;  // media-time
    TimeStamp wall;       // pipeline wall-time

    bool operator==(const TimelineEvent&) const = default;
};

std::string_view to_string(EmitReason r);
std::string_view to_string(Component c);
std::string_view to_string(EventKind k);

EmitReason parse_emit_reason(std::string_view s);
Component parse_component(std::string_view s);
EventKind parse_event_kind(std::string_view s);

// Throws InputError when the value breaks its type invariants.
void validate(const SpeechSegment& s);
void validate(const Utterance& u);
void validate(const ConversationMessage& m);

}  // namespace sonartalk
