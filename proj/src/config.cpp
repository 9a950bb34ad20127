#include "sonartalk/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sonartalk/errors.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

namespace {

std::string trimmed(std::string_view v) { return std::string(text::trim(v)); }

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
    const std::string v = trimmed(value);
    T out{};
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size() || v.empty()) {
        throw ConfigError(std::string(key) + ": expected an integer, got '" + v + "'");
    }
    return out;
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string v = trimmed(value);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(std::string(key) + ": expected a number, got '" + v + "'");
    }
}

Duration parse_seconds(std::string_view key, std::string_view value) {
    try {
        return Duration::parse(trimmed(value));
    } catch (const Error&) {
        throw ConfigError(std::string(key) + ": expected seconds, got '" + trimmed(value) + "'");
    }
}

bool parse_bool(std::string_view key, std::string_view value) {
    const std::string v = trimmed(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> parse_list(std::string_view value) {
    std::vector<std::string> out;
    std::string item;
    for (char c : value) {
        if (c == ',') {
            if (auto t = trimmed(item); !t.empty()) out.push_back(t);
            item.clear();
        } else {
            item += c;
        }
    }
    if (auto t = trimmed(item); !t.empty()) out.push_back(t);
    return out;
}

std::u32string parse_marks(std::string_view key, std::string_view value) {
    try {
        return text::decode_utf8(trimmed(value));
    } catch (const Error&) {
        throw ConfigError(std::string(key) + ": invalid UTF-8");
    }
}

std::string format_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

struct Entry {
    std::string help;
    std::function<void(Config&, std::string_view)> set;
    std::function<std::string(const Config&)> get;
};

using Registry = std::map<std::string, Entry, std::less<>>;

#define ST_DURATION(KEY, FIELD, HELP)                                                       \
    r[KEY] = {HELP, [](Config& c, std::string_view v) { c.FIELD = parse_seconds(KEY, v); }, \
              [](const Config& c) { return c.FIELD.str(); }}
#define ST_DOUBLE(KEY, FIELD, HELP)                                                        \
    r[KEY] = {HELP, [](Config& c, std::string_view v) { c.FIELD = parse_double(KEY, v); }, \
              [](const Config& c) { return format_double(c.FIELD); }}
#define ST_INT(KEY, FIELD, HELP)                                                                              \
    r[KEY] = {HELP, [](Config& c, std::string_view v) { c.FIELD = parse_integer<decltype(c.FIELD)>(KEY, v); }, \
              [](const Config& c) { return std::to_string(c.FIELD); }}

const Registry& registry() {
    static const Registry reg = [] {
        Registry r;
        ST_DOUBLE("segmenter.frame-rate", segmenter.frame_rate_hz, "classifier frames per second");
        ST_INT("segmenter.window", segmenter.window_frames, "window length in frames");
        ST_INT("segmenter.step", segmenter.step_frames, "window hop in frames");
        ST_INT("segmenter.start-thr", segmenter.start_threshold, "frames of a speaker that open a segment");
        ST_INT("segmenter.end-thr", segmenter.end_threshold, "segment closes below this many frames");
        ST_DURATION("segmenter.min-segment", segmenter.min_segment, "shortest kept segment, seconds");
        ST_DURATION("segmenter.merge-gap", segmenter.merge_gap, "gaps shorter than this are merged, seconds");

        ST_DURATION("stability.chunk-size", stability.chunk_size, "ASR chunk length, seconds");
        r["stability.on-violation"] = {
            "decoder prefix violation policy: error or truncate_recover",
            [](Config& c, std::string_view v) {
                const auto s = trimmed(v);
                if (s == "error") {
                    c.stability.on_prefix_violation = PrefixViolationPolicy::error;
                } else if (s == "truncate_recover") {
                    c.stability.on_prefix_violation = PrefixViolationPolicy::truncate_recover;
                } else {
                    throw ConfigError("stability.on-violation: expected error or truncate_recover, got '" + s + "'");
                }
            },
            [](const Config& c) {
                return std::string(c.stability.on_prefix_violation == PrefixViolationPolicy::error ? "error"
                                                                                                   : "truncate_recover");
            }};
        ST_DURATION("asr.decode-delay", asr_decode_delay, "decoder wall time per chunk, seconds");

        r["textseg.terminal-marks"] = {"characters that end a sentence",
                                       [](Config& c, std::string_view v) {
                                           c.textseg.terminal_marks = parse_marks("textseg.terminal-marks", v);
                                       },
                                       [](const Config& c) { return text::encode_utf8(c.textseg.terminal_marks); }};
        r["textseg.nonterminal-marks"] = {
            "characters where an over-long buffer may be split",
            [](Config& c, std::string_view v) {
                c.textseg.nonterminal_marks = parse_marks("textseg.nonterminal-marks", v);
            },
            [](const Config& c) { return text::encode_utf8(c.textseg.nonterminal_marks); }};
        ST_INT("textseg.soft-len", textseg.soft_len_chars, "soft length limit, characters");
        ST_INT("textseg.hard-len", textseg.hard_len_chars, "hard length limit, characters");
        ST_DURATION("textseg.hard-latency", textseg.hard_latency, "longest wait before a forced flush, seconds");
        ST_DURATION("textseg.tick", textseg_tick, "tick period, seconds");
        r["textseg.flush-on-speaker-change"] = {
            "flush other speakers' buffers when a new speaker starts",
            [](Config& c, std::string_view v) {
                c.textseg.flush_on_speaker_change = parse_bool("textseg.flush-on-speaker-change", v);
            },
            [](const Config& c) { return std::string(c.textseg.flush_on_speaker_change ? "true" : "false"); }};

        ST_INT("classifier.dim", classifier_dim, "hashed embedding dimension");
        r["classifier.prototypes"] = {
            "JSONL file of {label, sentence}; empty for the built-in set",
            [](Config& c, std::string_view v) { c.classifier_prototypes = trimmed(v); },
            [](const Config& c) { return c.classifier_prototypes.string(); }};

        ST_DOUBLE("chan.bandwidth", channel.bandwidth_Bps, "link bandwidth, bytes per second");
        ST_DURATION("chan.prop-delay", channel.propagation, "one-way propagation delay, seconds");
        ST_DOUBLE("chan.drop", channel.drop_prob, "per-frame loss probability");
        ST_INT("chan.seed", channel.rng_seed, "loss RNG seed");

        ST_DOUBLE("synth.speaking-rate", synth.speaking_rate_wps, "words per second of synthesized audio");
        ST_DURATION("synth.tts-proc", synth.tts_proc, "TTS processing time per message, seconds");
        ST_DOUBLE("synth.video-alpha", synth.video_gen_alpha, "video generation time per audio second");
        ST_DURATION("synth.video-beta", synth.video_gen_beta, "fixed video generation time, seconds");

        ST_DURATION("playback.filler", playback.filler_length, "idle filler clip length, seconds");
        ST_DURATION("playback.startup", playback.startup, "player start-up delay, seconds");

        r["queue.journal"] = {"append-only queue journal; empty keeps the queue in memory",
                              [](Config& c, std::string_view v) { c.queue_journal = trimmed(v); },
                              [](const Config& c) { return c.queue_journal.string(); }};

        r["net.modem-host"] = {"modem endpoint host",
                               [](Config& c, std::string_view v) { c.net.modem_host = trimmed(v); },
                               [](const Config& c) { return c.net.modem_host; }};
        ST_INT("net.modem-port", net.modem_port, "modem endpoint port");
        ST_INT("net.console-port", net.console_port, "console HTTP/WebSocket port (0 picks a free port)");
        ST_INT("net.retries", net.connect_retries, "connection attempts after the first");
        ST_DURATION("net.backoff", net.connect_backoff, "first retry delay, doubled per attempt, seconds");

        r["session.roster"] = {"comma-separated speaker ids",
                               [](Config& c, std::string_view v) { c.roster = parse_list(v); },
                               [](const Config& c) { return text::join(c.roster, ","); }};
        r["session.muted"] = {"comma-separated speaker ids that are not transmitted",
                              [](Config& c, std::string_view v) { c.muted = parse_list(v); },
                              [](const Config& c) { return text::join(c.muted, ","); }};
        return r;
    }();
    return reg;
}

#undef ST_DURATION
#undef ST_DOUBLE
#undef ST_INT

}  // namespace

void Config::set(std::string_view key, std::string_view value) {
    const auto& reg = registry();
    const auto it = reg.find(key);
    if (it == reg.end()) throw ConfigError("unknown config key: " + std::string(key));
    it->second.set(*this, value);
}

std::string Config::get(std::string_view key) const {
    const auto& reg = registry();
    const auto it = reg.find(key);
    if (it == reg.end()) throw ConfigError("unknown config key: " + std::string(key));
    return it->second.get(*this);
}

void Config::validate() const {
    segmenter.validate();
    stability.validate();
    if (asr_decode_delay.micros() < 0) throw ConfigError("asr.decode-delay must be >= 0");
    textseg.validate();
    if (textseg_tick.micros() <= 0) throw ConfigError("textseg.tick must be > 0");
    if (classifier_dim == 0) throw ConfigError("classifier.dim must be > 0");
    channel.validate();
    synth.validate();
    playback.validate();
    if (net.connect_retries < 0) throw ConfigError("net.retries must be >= 0");
    if (net.connect_backoff.micros() < 0) throw ConfigError("net.backoff must be >= 0");
    for (const auto& m : muted) {
        if (std::find(roster.begin(), roster.end(), m) == roster.end()) {
            throw ConfigError("session.muted: '" + m + "' is not in the roster");
        }
    }
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const auto& [k, e] : registry()) out.push_back({k, e.help});
        return out;
    }();
    return keys;
}

void load_config_file(Config& config, const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    // read_ini only knows ';' comments.
    std::stringstream filtered;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        filtered << (first != std::string::npos && line[first] == '#' ? "" : line) << '\n';
    }
    pt::ptree tree;
    try {
        pt::read_ini(filtered, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(path.string() + ": key '" + section + "' is outside a section");
        for (const auto& [name, value] : body) {
            config.set(section + "." + name, value.get_value<std::string>());
        }
    }
}

}  // namespace sonartalk
