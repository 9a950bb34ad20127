#include "doctest.h"
#include "sonartalk/errors.hpp"
#include "sonartalk/text_segmenter.hpp"

using namespace sonartalk;

namespace {

const SpeakerId s1("speaker_1");
const SpeakerId s2("speaker_2");

TimeStamp at(const char* s) { return TimeStamp::parse(s); }

}  // namespace

TEST_CASE("terminal mark emits through the last sentence") {
    TextSegmenter seg;
    const auto out = seg.push("Dive complete. All systems", s1, at("0"), at("2"), at("2.5"), "u1");
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "Dive complete.");
    CHECK(out[0].emit_reason == EmitReason::terminal);
    CHECK(out[0].source_units == std::vector<std::string>{"u1"});
    CHECK(seg.buffered(s1) == "All systems");
}

TEST_CASE("several sentences become several utterances") {
    TextSegmenter seg;
    const auto out = seg.push("Hatch sealed. Ballast ok?! Descending", s1, at("0"), at("3"), at("3"));
    REQUIRE(out.size() == 2);
    CHECK(out[0].text == "Hatch sealed.");
    CHECK(out[1].text == "Ballast ok?!");
    CHECK(seg.buffered(s1) == "Descending");
}

TEST_CASE("soft split at the last non-terminal mark") {
    TextSegmenter seg;
    std::string text(89, 'x');
    text += ',';
    text += std::string(40, 'y');
    REQUIRE(text.size() == 130);
    const auto out = seg.push(text, s1, at("0"), at("1"), at("1"));
    REQUIRE(out.size() == 1);
    CHECK(out[0].text.size() == 90);
    CHECK(out[0].emit_reason == EmitReason::soft_split);
    CHECK(seg.buffered(s1).size() == 40);
}

TEST_CASE("hard length flushes the whole buffer") {
    TextSegmenter seg;
    const auto out = seg.push(std::string(201, 'z'), s1, at("0"), at("1"), at("1"));
    REQUIRE(out.size() == 1);
    CHECK(out[0].emit_reason == EmitReason::hard_flush);
    CHECK(seg.empty());
}

TEST_CASE("short text waits") {
    TextSegmenter seg;
    CHECK(seg.push("ok", s1, at("0"), at("1"), at("1")).empty());
    CHECK(seg.next_deadline() == at("5"));
}

TEST_CASE("tick releases only buffers older than the hard latency") {
    TextSegmenter seg;
    seg.push("so we", s1, at("0"), at("1"), at("10"));
    CHECK(seg.tick(at("13.9")).empty());
    CHECK(seg.tick(at("14")).empty());
    const auto out = seg.tick(at("14.1"));
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "so we");
    CHECK(out[0].emit_reason == EmitReason::hard_flush);
    CHECK(seg.tick(at("20")).empty());
}

TEST_CASE("flush_all releases oldest content first") {
    TextSegmenter seg;
    CHECK(seg.flush_all().empty());
    seg.push("standing by", s2, at("1"), at("2"), at("2"));
    seg.push("copy", s1, at("0"), at("1"), at("3"));
    const auto out = seg.flush_all();
    REQUIRE(out.size() == 2);
    CHECK(out[0].speaker == s2);
    CHECK(out[1].speaker == s1);
    CHECK(out[0].emit_reason == EmitReason::stream_end);
}

TEST_CASE("buffers are per speaker and spans follow the pieces") {
    TextSegmenter seg;
    seg.push("we see", s1, at("1"), at("2"), at("2"), "a");
    seg.push("copy", s2, at("1.5"), at("2.5"), at("2.5"), "b");
    const auto out = seg.push("worms.", s1, at("2"), at("3"), at("3.5"), "c");
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "we see worms.");
    CHECK(out[0].start == at("1"));
    CHECK(out[0].end == at("3"));
    CHECK(out[0].input_wall == at("3.5"));
    CHECK(out[0].source_units == std::vector<std::string>{"a", "c"});
    CHECK(seg.buffered(s2) == "copy");
}

TEST_CASE("speaker change flush when enabled") {
    TextSegConfig cfg;
    cfg.flush_on_speaker_change = true;
    TextSegmenter seg(cfg);
    seg.push("we see", s1, at("0"), at("1"), at("1"));
    const auto out = seg.push("copy", s2, at("1"), at("2"), at("2"));
    REQUIRE(out.size() == 1);
    CHECK(out[0].emit_reason == EmitReason::speaker_change);
    CHECK(out[0].speaker == s1);
}

TEST_CASE("rejects empty pieces and bad spans") {
    TextSegmenter seg;
    CHECK_THROWS_AS(seg.push("   ", s1, at("0"), at("1"), at("1")), InputError);
    CHECK_THROWS_AS(seg.push("x", s1, at("2"), at("1"), at("1")), InputError);
    TextSegConfig bad;
    bad.soft_len_chars = 300;
    CHECK_THROWS_AS(TextSegmenter{bad}, ConfigError);
}

TEST_CASE("lengths count code points") {
    TextSegConfig cfg;
    cfg.soft_len_chars = 5;
    cfg.hard_len_chars = 5;
    TextSegmenter seg(cfg);
    CHECK(seg.push("ääääa", s1, at("0"), at("1"), at("1")).empty());
    CHECK(seg.push("b", s1, at("1"), at("2"), at("2")).size() == 1);
}
