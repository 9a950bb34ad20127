#include "sonartalk/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "sonartalk/errors.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

using nlohmann::json;

std::string_view to_string(StreamKind k) {
    switch (k) {
        case StreamKind::segments: return "segments";
        case StreamKind::frames: return "frames";
        case StreamKind::messages: return "messages";
    }
    return "?";
}

std::vector<Hypothesis> DecoderScript::for_chunks(int chunks) const {
    if (chunks < 1) throw ScenarioError("a segment needs at least one chunk");
    std::vector<Hypothesis> out;
    if (!hypotheses.empty()) {
        const int n = static_cast<int>(hypotheses.size());
        for (int i = 1; i <= chunks; ++i) {
            const int idx = (i == chunks) ? n - 1 : std::min(i, n) - 1;
            out.push_back(Hypothesis{i, hypotheses[static_cast<std::size_t>(idx)]});
        }
        return out;
    }
    const auto tokens = text::split_ws(transcript);
    const auto m = static_cast<long long>(tokens.size());
    for (int i = 1; i <= chunks; ++i) {
        const long long take = (i * m + chunks - 1) / chunks;
        out.push_back(Hypothesis{i, {tokens.begin(), tokens.begin() + take}});
    }
    return out;
}

Config Scenario::apply(Config base) const {
    if (!roster.empty()) {
        base.roster.clear();
        for (const auto& s : roster) base.roster.push_back(s.str());
    }
    try {
        for (const auto& [k, v] : overrides) base.set(k, v);
    } catch (const ConfigError& e) {
        throw ScenarioError(std::string("scenario config: ") + e.what());
    }
    return base;
}

namespace {

struct Path {
    std::string where;
    Path operator/(std::string_view k) const { return Path{where + "." + std::string(k)}; }
    Path operator[](std::size_t i) const { return Path{where + "[" + std::to_string(i) + "]"}; }
};

[[noreturn]] void fail(const Path& p, const std::string& msg) { throw ScenarioError(p.where + ": " + msg); }

const json& field(const json& obj, std::string_view key, const Path& p) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(p, "missing field '" + std::string(key) + "'");
    return *it;
}

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const Path& p) {
    if (!obj.is_object()) fail(p, "expected an object");
    for (const auto& [k, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fail(p, "unknown field '" + k + "'");
    }
}

std::string as_string(const json& j, const Path& p) {
    if (!j.is_string()) fail(p, "expected a string");
    return j.get<std::string>();
}

SpeakerId as_speaker(const json& j, const Path& p) {
    try {
        return SpeakerId(as_string(j, p));
    } catch (const InputError& e) {
        fail(p, e.what());
    }
}

// Seconds as a JSON number or decimal string; numbers keep their shortest
// decimal form so 2.65 means exactly 2650000 us.
std::string seconds_text(const json& j, const Path& p) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return j.dump();
    fail(p, "expected seconds");
}

TimeStamp as_time(const json& j, const Path& p) {
    try {
        return TimeStamp::parse(seconds_text(j, p));
    } catch (const InputError& e) {
        fail(p, e.what());
    }
}

std::string config_value(const json& j, const Path& p) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number()) return j.dump();
    fail(p, "expected a string, number or boolean");
}

std::vector<std::string> as_tokens(const json& j, const Path& p) {
    if (!j.is_array()) fail(p, "expected a token list");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        auto t = as_string(j[i], p[i]);
        if (t.empty() || text::split_ws(t).size() != 1) fail(p[i], "tokens must be single words");
        out.push_back(std::move(t));
    }
    return out;
}

DecoderScript as_script(const json& j, const Path& p) {
    DecoderScript s;
    if (j.is_string()) {
        s.transcript = j.get<std::string>();
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) s.hypotheses.push_back(as_tokens(j[i], p[i]));
        if (s.hypotheses.empty()) fail(p, "empty hypothesis list");
    } else {
        fail(p, "expected a transcript string or a list of hypotheses");
    }
    return s;
}

ScriptedSegment as_segment(const json& j, const SpeakerId& speaker, const Path& p) {
    only_keys(j, {"start", "end", "transcript", "hypotheses"}, p);
    ScriptedSegment s{SpeechSegment{speaker, as_time(field(j, "start", p), p / "start"),
                                    as_time(field(j, "end", p), p / "end")},
                      {}};
    if (!(s.segment.start < s.segment.end)) fail(p, "start must be before end");
    const bool has_t = j.contains("transcript");
    const bool has_h = j.contains("hypotheses");
    if (has_t == has_h) fail(p, "give exactly one of 'transcript' and 'hypotheses'");
    s.decoder = has_t ? as_script(j["transcript"], p / "transcript") : as_script(j["hypotheses"], p / "hypotheses");
    return s;
}

void parse_frames(const json& j, ScenarioStream& st, const Path& p) {
    // "frames": either "runs" of {label, count} or an explicit label list.
    if (j.contains("runs") == j.contains("labels")) fail(p, "give exactly one of 'runs' and 'labels'");
    std::int64_t index = 0;
    const auto push = [&](const json& label, const Path& lp) {
        FrameLabel f{index++, std::nullopt};
        if (!label.is_null()) f.label = as_speaker(label, lp);
        st.frames.push_back(std::move(f));
    };
    if (j.contains("runs")) {
        const auto& runs = j["runs"];
        if (!runs.is_array()) fail(p / "runs", "expected a list");
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto rp = (p / "runs")[i];
            only_keys(runs[i], {"label", "count"}, rp);
            const auto& count = field(runs[i], "count", rp);
            if (!count.is_number_unsigned()) fail(rp / "count", "expected a non-negative integer");
            for (std::uint64_t k = 0; k < count.get<std::uint64_t>(); ++k) push(field(runs[i], "label", rp), rp);
        }
    } else {
        const auto& labels = j["labels"];
        if (!labels.is_array()) fail(p / "labels", "expected a list");
        for (std::size_t i = 0; i < labels.size(); ++i) push(labels[i], (p / "labels")[i]);
    }
}

ScenarioStream as_stream(const json& j, const Path& p) {
    if (!j.is_object()) fail(p, "expected an object");
    ScenarioStream st;
    const auto kind = as_string(field(j, "kind", p), p / "kind");
    if (kind == "segments") {
        only_keys(j, {"kind", "speaker", "segments"}, p);
        st.kind = StreamKind::segments;
        st.speaker = as_speaker(field(j, "speaker", p), p / "speaker");
        const auto& segs = field(j, "segments", p);
        if (!segs.is_array()) fail(p / "segments", "expected a list");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            st.segments.push_back(as_segment(segs[i], *st.speaker, (p / "segments")[i]));
            if (i > 0 && st.segments[i].segment.start < st.segments[i - 1].segment.end) {
                fail((p / "segments")[i], "segments of one speaker must be ordered and not overlap");
            }
        }
    } else if (kind == "frames") {
        only_keys(j, {"kind", "runs", "labels", "decoder"}, p);
        st.kind = StreamKind::frames;
        parse_frames(j, st, p);
        const auto& dec = field(j, "decoder", p);
        if (!dec.is_object()) fail(p / "decoder", "expected an object keyed by speaker");
        for (const auto& [spk, scripts] : dec.items()) {
            const auto sp = p / "decoder" / spk;
            if (!scripts.is_array()) fail(sp, "expected a list with one script per segment");
            auto& out = st.frame_scripts[as_speaker(json(spk), sp)];
            for (std::size_t i = 0; i < scripts.size(); ++i) out.push_back(as_script(scripts[i], sp[i]));
        }
    } else if (kind == "messages") {
        only_keys(j, {"kind", "speaker", "messages"}, p);
        st.kind = StreamKind::messages;
        st.speaker = as_speaker(field(j, "speaker", p), p / "speaker");
        const auto& msgs = field(j, "messages", p);
        if (!msgs.is_array()) fail(p / "messages", "expected a list");
        for (std::size_t i = 0; i < msgs.size(); ++i) {
            const auto mp = (p / "messages")[i];
            only_keys(msgs[i], {"at", "text"}, mp);
            DirectMessage m{as_time(field(msgs[i], "at", mp), mp / "at"), as_string(field(msgs[i], "text", mp), mp)};
            if (text::trim(m.text).empty()) fail(mp / "text", "text must not be blank");
            if (i > 0 && m.at < st.messages.back().at) fail(mp / "at", "messages must be in time order");
            st.messages.push_back(std::move(m));
        }
    } else {
        fail(p / "kind", "expected segments, frames or messages, got '" + kind + "'");
    }
    return st;
}

// Speakers a stream produces.
std::set<SpeakerId> stream_speakers(const ScenarioStream& st) {
    std::set<SpeakerId> out;
    if (st.speaker) out.insert(*st.speaker);
    for (const auto& f : st.frames) {
        if (f.label) out.insert(*f.label);
    }
    return out;
}

void copy_section(const json& j, std::string_view section, std::string_view prefix, Scenario& sc) {
    if (!j.contains(section)) return;
    const Path p{"scenario." + std::string(section)};
    const auto& obj = j[std::string(section)];
    if (!obj.is_object()) fail(p, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        sc.overrides.emplace_back(std::string(prefix) + k, config_value(v, p / k));
    }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
    }
    const Path root{"scenario"};
    only_keys(j, {"version", "name", "roster", "clock", "seed", "config", "channel", "synth", "noise", "streams"},
              root);

    Scenario sc;
    const auto& ver = field(j, "version", root);
    if (!ver.is_number_integer() || ver.get<int>() != scenario_version) {
        fail(root / "version", "unsupported version " + ver.dump() + " (expected " +
                                   std::to_string(scenario_version) + ")");
    }
    if (j.contains("name")) sc.name = as_string(j["name"], root / "name");
    if (j.contains("clock")) {
        const auto c = as_string(j["clock"], root / "clock");
        if (c == "simulated") {
            sc.clock = ClockMode::simulated;
        } else if (c == "real") {
            sc.clock = ClockMode::real;
        } else {
            fail(root / "clock", "expected simulated or real");
        }
    }

    copy_section(j, "channel", "chan.", sc);
    copy_section(j, "synth", "synth.", sc);
    copy_section(j, "config", "", sc);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail(root / "seed", "expected a non-negative integer");
        sc.overrides.emplace_back("chan.seed", j["seed"].dump());
    }

    if (j.contains("noise")) {
        const auto np = root / "noise";
        only_keys(j["noise"], {"bytes_per_frame", "seed"}, np);
        const auto& n = j["noise"];
        if (n.contains("bytes_per_frame")) {
            if (!n["bytes_per_frame"].is_number_unsigned()) fail(np / "bytes_per_frame", "expected an integer");
            sc.noise.bytes_per_frame = n["bytes_per_frame"].get<std::size_t>();
        }
        if (n.contains("seed")) {
            if (!n["seed"].is_number_unsigned()) fail(np / "seed", "expected an integer");
            sc.noise.seed = n["seed"].get<std::uint64_t>();
        }
    }

    const auto& streams = field(j, "streams", root);
    if (!streams.is_array()) fail(root / "streams", "expected a list");
    std::set<SpeakerId> claimed;
    int frame_streams = 0;
    for (std::size_t i = 0; i < streams.size(); ++i) {
        auto st = as_stream(streams[i], (root / "streams")[i]);
        if (st.kind == StreamKind::frames && ++frame_streams > 1) {
            fail((root / "streams")[i], "only one frames stream (one audio feed) is supported");
        }
        for (const auto& s : stream_speakers(st)) {
            if (!claimed.insert(s).second) {
                fail((root / "streams")[i], "speaker '" + s.str() + "' already has an input stream");
            }
        }
        sc.streams.push_back(std::move(st));
    }

    if (j.contains("roster")) {
        const auto& r = j["roster"];
        if (!r.is_array()) fail(root / "roster", "expected a list");
        for (std::size_t i = 0; i < r.size(); ++i) sc.roster.push_back(as_speaker(r[i], (root / "roster")[i]));
        for (const auto& s : claimed) {
            if (std::find(sc.roster.begin(), sc.roster.end(), s) == sc.roster.end()) {
                fail(root / "roster", "speaker '" + s.str() + "' has a stream but is not in the roster");
            }
        }
    } else {
        sc.roster.assign(claimed.begin(), claimed.end());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read scenario: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
}

}  // namespace sonartalk
