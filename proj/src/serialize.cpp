#include "sonartalk/serialize.hpp"

#include <nlohmann/json.hpp>

#include "json_fields.hpp"
#include "sonartalk/errors.hpp"

namespace sonartalk {

using nlohmann::json;

CanonicalObject& CanonicalObject::raw(std::string key, std::string json_token) {
    fields_[std::move(key)] = std::move(json_token);
    return *this;
}

CanonicalObject& CanonicalObject::string(std::string key, std::string_view value) {
    return raw(std::move(key), json_quote(value));
}

CanonicalObject& CanonicalObject::time(std::string key, TimeStamp value) { return raw(std::move(key), value.str()); }

CanonicalObject& CanonicalObject::duration(std::string key, Duration value) {
    return raw(std::move(key), value.str());
}

CanonicalObject& CanonicalObject::integer(std::string key, std::int64_t value) {
    return raw(std::move(key), std::to_string(value));
}

CanonicalObject& CanonicalObject::null(std::string key) { return raw(std::move(key), "null"); }

CanonicalObject& CanonicalObject::strings(std::string key, const std::vector<std::string>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += json_quote(values[i]);
    }
    out += ']';
    return raw(std::move(key), std::move(out));
}

std::string CanonicalObject::str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : fields_) {
        if (!first) out += ',';
        first = false;
        out += json_quote(k);
        out += ':';
        out += v;
    }
    out += '}';
    return out;
}

std::string json_quote(std::string_view s) {
    try {
        return json(std::string(s)).dump();
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid UTF-8 in string field: ") + e.what());
    }
}

std::string to_json_line(const SpeechSegment& s) {
    return CanonicalObject{}.string("speaker", s.speaker.str()).time("start", s.start).time("end", s.end).str();
}

std::string to_json_line(const Utterance& u) {
    return CanonicalObject{}
        .string("speaker", u.speaker.str())
        .string("text", u.text)
        .time("start", u.start)
        .time("end", u.end)
        .string("emit_reason", to_string(u.emit_reason))
        .time("input_wall", u.input_wall)
        .strings("source_units", u.source_units)
        .str();
}

std::string to_json_line(const ConversationMessage& m) {
    CanonicalObject o;
    o.integer("protocol_version", m.protocol_version)
        .integer("msg_id", static_cast<std::int64_t>(m.msg_id))
        .string("speaker", m.speaker.str())
        .time("start", m.start)
        .time("end", m.end)
        .string("text", m.text);
    if (m.category) {
        o.string("category", *m.category);
    } else {
        o.null("category");
    }
    return o.str();
}

std::string to_json_line(const TimelineEvent& e) {
    return CanonicalObject{}
        .string("component", to_string(e.component))
        .string("kind", to_string(e.kind))
        .string("unit_id", e.unit_id)
        .time("media_end", e.media_end)
        .time("wall", e.wall)
        .str();
}

namespace {

template <class F>
auto parse_guarded(std::string_view line, const char* what, F&& body) {
    try {
        const json j = json::parse(line);
        if (!j.is_object()) {
            throw InputError(std::string(what) + ": expected a JSON object");
        }
        return body(j);
    } catch (const json::exception& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

SpeechSegment parse_speech_segment(std::string_view line) {
    return parse_guarded(line, "speech segment", [](const json& j) {
        SpeechSegment s{SpeakerId(detail::req_string(j, "speaker")), detail::req_time(j, "start"),
                        detail::req_time(j, "end")};
        validate(s);
        return s;
    });
}

Utterance parse_utterance(std::string_view line) {
    return parse_guarded(line, "utterance", [](const json& j) {
        Utterance u{SpeakerId(detail::req_string(j, "speaker")),
                    detail::req_string(j, "text"),
                    detail::req_time(j, "start"),
                    detail::req_time(j, "end"),
                    parse_emit_reason(detail::req_string(j, "emit_reason")),
                    detail::req_time(j, "input_wall"),
                    {}};
        for (const auto& s : detail::req(j, "source_units")) {
            if (!s.is_string()) throw InputError("source_units must hold strings");
            u.source_units.push_back(s.get<std::string>());
        }
        validate(u);
        return u;
    });
}

ConversationMessage parse_message(std::string_view line) {
    return parse_guarded(line, "message", [](const json& j) {
        const json& id = detail::req(j, "msg_id");
        if (!id.is_number_unsigned()) throw InputError("msg_id must be a non-negative integer");
        const json& ver = detail::req(j, "protocol_version");
        if (!ver.is_number_integer()) throw InputError("protocol_version must be an integer");
        ConversationMessage m{ver.get<int>(),
                              id.get<std::uint64_t>(),
                              SpeakerId(detail::req_string(j, "speaker")),
                              detail::req_time(j, "start"),
                              detail::req_time(j, "end"),
                              detail::req_string(j, "text"),
                              std::nullopt};
        if (auto it = j.find("category"); it != j.end() && !it->is_null()) {
            if (!it->is_string()) throw InputError("category must be a string or null");
            m.category = it->get<std::string>();
        }
        validate(m);
        return m;
    });
}

TimelineEvent parse_timeline_event(std::string_view line) {
    return parse_guarded(line, "timeline event", [](const json& j) {
        return TimelineEvent{parse_component(detail::req_string(j, "component")),
                             parse_event_kind(detail::req_string(j, "kind")), detail::req_string(j, "unit_id"),
                             detail::req_time(j, "media_end"), detail::req_time(j, "wall")};
    });
}

}  // namespace sonartalk
