#include <random>
#include <sstream>

#include "../oracles/oracles.hpp"
#include "doctest.h"
#include "sonartalk/errors.hpp"
#include "sonartalk/speaker_segmenter.hpp"

using namespace sonartalk;

namespace {

std::vector<FrameLabel> frames(const std::vector<std::string>& labels) {
    std::vector<FrameLabel> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        FrameLabel f{static_cast<std::int64_t>(i), std::nullopt};
        if (!labels[i].empty()) f.label = SpeakerId(labels[i]);
        out.push_back(f);
    }
    return out;
}

std::vector<SegmentEvent> run(const std::vector<std::string>& labels, SegmenterConfig cfg = {}) {
    SpeakerSegmenter seg(cfg);
    const auto f = frames(labels);
    auto ev = seg.push_frames(f);
    auto tail = seg.flush();
    ev.insert(ev.end(), tail.begin(), tail.end());
    return ev;
}

std::vector<std::string> repeat(const std::string& l, int n) { return std::vector<std::string>(n, l); }

std::vector<std::string> cat(std::initializer_list<std::vector<std::string>> parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace

TEST_CASE("one speaker for two seconds gives one segment") {
    const auto segs = closed_segments(run(repeat("speaker_1", 100)));
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].start.str() == "0.000000");
    CHECK(segs[0].end.str() == "2.000000");
}

TEST_CASE("background and alternating labels give nothing") {
    CHECK(run(repeat("", 100)).empty());
    std::vector<std::string> alt;
    for (int i = 0; i < 100; ++i) alt.push_back(i % 2 ? "" : "speaker_1");
    CHECK(run(alt).empty());
}

TEST_CASE("segment closes at the end of the first window below the end threshold") {
    // speaker_1 for frames [0, 50), silence afterwards. Window 8 ([40,65)) holds
    // 10 frames, window 9 ([45,70)) holds 5, window 10 ([50,75)) holds 0 < 5.
    const auto segs = closed_segments(run(cat({repeat("speaker_1", 50), repeat("", 50)})));
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].start.str() == "0.000000");
    CHECK(segs[0].end.str() == "1.500000");
}

TEST_CASE("open is announced before close and only for segments that survive") {
    const auto ev = run(cat({repeat("speaker_2", 60), repeat("", 60)}));
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].kind == SegmentEventKind::open);
    CHECK_FALSE(ev[0].end.has_value());
    CHECK(ev[1].kind == SegmentEventKind::close);
    CHECK(ev[1].start == ev[0].start);
}

TEST_CASE("flush closes an open segment at the last frame") {
    SpeakerSegmenter seg({});
    auto ev = seg.push_frames(frames(repeat("speaker_2", 40)));
    const auto tail = seg.flush();
    ev.insert(ev.end(), tail.begin(), tail.end());
    const auto segs = closed_segments(ev);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].end == seg.config().frame_time(40));
    CHECK(seg.flush().empty());
    CHECK_THROWS_AS(seg.push_frames(frames({"speaker_2"})), StreamError);
}

TEST_CASE("short gaps merge and short segments are dropped") {
    SegmenterConfig cfg;
    cfg.window_frames = 5;
    cfg.step_frames = 1;
    cfg.start_threshold = 3;
    cfg.end_threshold = 1;
    // Raw segments [0, 0.62) and [0.66, 1.32): the 0.04 s gap merges them.
    const auto merged = closed_segments(
        run(cat({repeat("a", 26), repeat("", 9), repeat("a", 26), repeat("", 30)}), cfg));
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].start.str() == "0.000000");

    // Raw segment [0, 0.22): below 0.3 s.
    CHECK(run(cat({repeat("a", 6), repeat("", 30)}), cfg).empty());
}

TEST_CASE("missing frame indices count as background") {
    SpeakerSegmenter seg({});
    std::vector<FrameLabel> sparse;
    for (int i = 0; i < 60; ++i) sparse.push_back({i, SpeakerId("a")});
    sparse.push_back({200, std::nullopt});
    auto ev = seg.push_frames(sparse);
    const auto segs = closed_segments(ev);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].end.str() == "1.700000");
}

TEST_CASE("non-monotone frame index is a stream error") {
    SpeakerSegmenter seg({});
    seg.push_frames(frames({"a", "a"}));
    std::vector<FrameLabel> back{{1, std::nullopt}};
    CHECK_THROWS_AS(seg.push_frames(back), StreamError);
}

TEST_CASE("config validation") {
    SegmenterConfig c;
    c.end_threshold = 15;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.start_threshold = 26;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.step_frames = 30;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("scripted classifier file") {
    std::istringstream in(R"({"frame_index": 0, "label": "speaker_1"}
{"frame_index": 2, "label": null}
)");
    const auto c = ScriptedClassifier::load_jsonl(in);
    CHECK(c.frame_count() == 3);
    CHECK(c.classify(0) == SpeakerId("speaker_1"));
    CHECK_FALSE(c.classify(1).has_value());
    std::istringstream dup(R"({"frame_index": 0, "label": null}
{"frame_index": 0, "label": null})");
    CHECK_THROWS_AS(ScriptedClassifier::load_jsonl(dup), InputError);
}

TEST_CASE("random streams match the brute-force reference") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> labels;
        std::uniform_int_distribution<int> who(0, 3), run_len(1, 40);
        while (labels.size() < 300) {
            const int s = who(rng);
            const auto l = s == 0 ? std::string{} : "s" + std::to_string(s);
            for (int k = run_len(rng); k > 0; --k) labels.push_back(l);
        }
        std::vector<oracle::Seg> got;
        for (const auto& s : closed_segments(run(labels))) {
            got.push_back({s.speaker.str(), s.start.micros(), s.end.micros()});
        }
        std::sort(got.begin(), got.end());
        CHECK(got == oracle::segment(labels, {}));
    }
}
