#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "sonartalk/config.hpp"
#include "sonartalk/errors.hpp"
#include "sonartalk/scenario.hpp"
#include "sonartalk/session.hpp"

using namespace sonartalk;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& body) {
    const auto p = fs::temp_directory_path() / (std::to_string(std::random_device{}()) + "-" + name);
    std::ofstream(p) << body;
    return p;
}

bool throws_with(const std::string& json, const std::string& fragment) {
    try {
        parse_scenario(json);
    } catch (const ScenarioError& e) {
        if (std::string(e.what()).find(fragment) != std::string::npos) return true;
        MESSAGE("unexpected message: " << e.what());
    }
    return false;
}

}  // namespace

TEST_CASE("every key round-trips through set and get") {
    Config c;
    for (const auto& k : config_keys()) {
        const auto v = c.get(k.key);
        CHECK_NOTHROW(c.set(k.key, v));
        CHECK(c.get(k.key) == v);
        CHECK_FALSE(k.help.empty());
    }
    CHECK(config_keys().size() >= 35);
}

TEST_CASE("typed values") {
    Config c;
    c.set("textseg.hard-latency", "2.65");
    CHECK(c.textseg.hard_latency.micros() == 2'650'000);
    c.set("chan.bandwidth", " 1e12 ");
    CHECK(c.channel.bandwidth_Bps == 1e12);
    c.set("textseg.terminal-marks", ".!?…");
    CHECK(c.textseg.terminal_marks.size() == 4);
    c.set("textseg.flush-on-speaker-change", "yes");
    CHECK(c.textseg.flush_on_speaker_change);
    c.set("session.roster", "pilot, observer ,scientist");
    CHECK(c.roster == std::vector<std::string>{"pilot", "observer", "scientist"});
    c.set("stability.on-violation", "truncate_recover");
    CHECK(c.stability.on_prefix_violation == PrefixViolationPolicy::truncate_recover);
}

TEST_CASE("bad keys and values are config errors") {
    Config c;
    CHECK_THROWS_AS(c.set("chan.nope", "1"), ConfigError);
    CHECK_THROWS_AS(c.get("chan.nope"), ConfigError);
    CHECK_THROWS_AS(c.set("segmenter.window", "2.5"), ConfigError);
    CHECK_THROWS_AS(c.set("chan.bandwidth", "fast"), ConfigError);
    CHECK_THROWS_AS(c.set("textseg.tick", "0.0000001"), ConfigError);
    CHECK_THROWS_AS(c.set("stability.on-violation", "ignore"), ConfigError);
    c.set("chan.drop", "2");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.set("session.muted", "ghost");
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("INI file with both comment styles") {
    const auto p = write_temp("sonartalk.ini", R"(# submersible defaults
[chan]
bandwidth = 250
; faster link
prop-delay = 1.2

[textseg]
hard-latency = 3
)");
    Config c;
    load_config_file(c, p);
    CHECK(c.channel.bandwidth_Bps == 250);
    CHECK(c.channel.propagation.micros() == 1'200'000);
    CHECK(c.textseg.hard_latency.micros() == 3'000'000);
    fs::remove(p);

    const auto bad = write_temp("bad.ini", "[chan]\nwidth = 3\n");
    CHECK_THROWS_AS(load_config_file(c, bad), ConfigError);
    fs::remove(bad);
    CHECK_THROWS_AS(load_config_file(c, "/nonexistent/sonartalk.ini"), ConfigError);
}

TEST_CASE("sessions") {
    Config c;
    c.muted = {"speaker_2"};
    const auto s = new_session(c);
    REQUIRE(s.roster.size() == 2);
    CHECK(s.enabled(SpeakerId("speaker_1")));
    CHECK_FALSE(s.enabled(SpeakerId("speaker_2")));
    CHECK(s.in_roster(SpeakerId("speaker_2")));
    CHECK_FALSE(s.in_roster(SpeakerId("diver")));
    CHECK(s.clock->now() == TimeStamp{});
    CHECK(s.log->size() == 0);

    CHECK_THROWS_AS(new_session({}, Config{}), ConfigError);
    CHECK_THROWS_AS(new_session({SpeakerId("a"), SpeakerId("a")}, Config{}), ConfigError);
}

TEST_CASE("scenario parsing") {
    const auto sc = parse_scenario(R"({
      "version": 1, "name": "t", "roster": ["speaker_1", "speaker_2", "speaker_3"], "seed": 7,
      "channel": {"bandwidth": 50}, "config": {"textseg.tick": 0.05},
      "noise": {"bytes_per_frame": 3, "seed": 1},
      "streams": [
        {"kind": "segments", "speaker": "speaker_1",
         "segments": [{"start": 0, "end": 2.5, "transcript": "Hatch sealed."},
                      {"start": 3, "end": 4, "hypotheses": [["a"], ["a", "b"]]}]},
        {"kind": "frames", "runs": [{"label": "speaker_2", "count": 40}, {"label": null, "count": 10}],
         "decoder": {"speaker_2": ["Copy that."]}},
        {"kind": "messages", "speaker": "speaker_3", "messages": [{"at": 1, "text": "typed"}]}
      ]})");
    CHECK(sc.name == "t");
    REQUIRE(sc.streams.size() == 3);
    CHECK(sc.streams[0].segments[0].segment.end.str() == "2.500000");
    CHECK(sc.streams[1].frames.size() == 50);
    CHECK(sc.streams[1].frame_scripts.at(SpeakerId("speaker_2")).size() == 1);
    CHECK(sc.streams[2].messages[0].text == "typed");
    CHECK(sc.noise.bytes_per_frame == 3);
    const auto cfg = sc.apply();
    CHECK(cfg.channel.bandwidth_Bps == 50);
    CHECK(cfg.channel.rng_seed == 7);
    CHECK(cfg.textseg_tick.micros() == 50'000);
}

TEST_CASE("decoder scripts") {
    DecoderScript t;
    t.transcript = "a b c";
    const auto h = t.for_chunks(2);
    REQUIRE(h.size() == 2);
    CHECK(h[0].tokens == std::vector<std::string>{"a", "b"});
    CHECK(h[1].tokens == std::vector<std::string>{"a", "b", "c"});
    CHECK(h[1].chunk_count == 2);

    DecoderScript x;
    x.hypotheses = {{"a"}, {"a", "b"}, {"a", "b", "c"}};
    CHECK(x.for_chunks(2).back().tokens.size() == 3);
    CHECK(x.for_chunks(5)[3].tokens.size() == 3);
}

TEST_CASE("scenario errors point at the offending field") {
    CHECK(throws_with("{", "not valid JSON"));
    CHECK(throws_with(R"({"version": 2, "streams": []})", "scenario.version"));
    CHECK(throws_with(R"({"version": 1, "streams": [], "extra": 1})", "extra"));
    CHECK(throws_with(R"({"version": 1, "streams": [{"kind": "audio"}]})", "scenario.streams[0].kind"));
    CHECK(throws_with(R"({"version": 1, "streams": [{"kind": "segments", "speaker": "a",
        "segments": [{"start": 2, "end": 1, "transcript": "x"}]}]})", "scenario.streams[0].segments[0]"));
    CHECK(throws_with(R"({"version": 1, "streams": [
        {"kind": "messages", "speaker": "a", "messages": []},
        {"kind": "messages", "speaker": "a", "messages": []}]})", "speaker"));
    CHECK(throws_with(R"({"version": 1, "roster": ["b"], "streams": [
        {"kind": "messages", "speaker": "a", "messages": []}]})", "roster"));
    CHECK(throws_with(R"({"version": 1, "streams": [
        {"kind": "messages", "speaker": "a", "messages": [{"at": 2, "text": "x"}, {"at": 1, "text": "y"}]}]})",
                      "time order"));
    const auto sc = parse_scenario(R"({"version": 1, "config": {"chan.nope": 1}, "streams": []})");
    CHECK_THROWS_AS(sc.apply(), ScenarioError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}
