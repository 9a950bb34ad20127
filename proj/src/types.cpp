#include "sonartalk/types.hpp"

#include <array>
#include <utility>

#include "sonartalk/errors.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

namespace {

constexpr std::array<std::pair<EmitReason, std::string_view>, 5> emit_reason_names{{
    {EmitReason::terminal, "terminal"},
    {EmitReason::soft_split, "soft_split"},
    {EmitReason::hard_flush, "hard_flush"},
    {EmitReason::speaker_change, "speaker_change"},
    {EmitReason::stream_end, "stream_end"},
}};

constexpr std::array<std::pair<Component, std::string_view>, 8> component_names{{
    {Component::asr, "asr"},
    {Component::text_segmentation, "text_segmentation"},
    {Component::tts, "tts"},
    {Component::video_generated, "video_generated"},
    {Component::video_started, "video_started"},
    {Component::video_played, "video_played"},
    {Component::channel, "channel"},
    {Component::queue, "queue"},
}};

constexpr std::array<std::pair<EventKind, std::string_view>, 5> event_kind_names{{
    {EventKind::input, "input"},
    {EventKind::output, "output"},
    {EventKind::chunk_generated, "chunk_generated"},
    {EventKind::chunk_started, "chunk_started"},
    {EventKind::chunk_ended, "chunk_ended"},
}};

template <class E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

template <class E, std::size_t N>
E value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view name, const char* what) {
    for (const auto& [v, n] : table) {
        if (n == name) return v;
    }
    throw InputError(std::string("unknown ") + what + ": " + std::string(name));
}

bool blank(std::string_view s) { return text::split_ws(s).empty(); }

}  // namespace

SpeakerId::SpeakerId(std::string id) : id_(std::move(id)) {
    if (blank(id_)) {
        throw InputError("speaker id must be non-empty");
    }
}

std::string_view to_string(EmitReason r) { return name_of(emit_reason_names, r); }
std::string_view to_string(Component c) { return name_of(component_names, c); }
std::string_view to_string(EventKind k) { return name_of(event_kind_names, k); }

EmitReason parse_emit_reason(std::string_view s) { return value_of(emit_reason_names, s, "emit reason"); }
Component parse_component(std::string_view s) { return value_of(component_names, s, "component"); }
EventKind parse_event_kind(std::string_view s) { return value_of(event_kind_names, s, "event kind"); }

void validate(const SpeechSegment& s) {
    if (!(s.start < s.end)) {
        throw InputError("speech segment needs start < end");
    }
}

void validate(const Utterance& u) {
    if (blank(u.text)) {
        throw InputError("utterance text is empty");
    }
    if (u.end < u.start) {
        throw InputError("utterance needs start <= end");
    }
}

void validate(const ConversationMessage& m) {
    if (m.protocol_version != protocol_version) {
        throw InputError("unsupported protocol version " + std::to_string(m.protocol_version));
    }
    if (blank(m.text)) {
        throw InputError("message text is empty");
    }
    if (m.end < m.start) {
        throw InputError("message needs start <= end");
    }
    if (m.category && m.category->empty()) {
        throw InputError("message category must be absent or non-empty");
    }
}

}  // namespace sonartalk
