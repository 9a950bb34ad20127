#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "doctest.h"
#include "sonartalk/errors.hpp"
#include "sonartalk/topside.hpp"

using namespace sonartalk;
namespace fs = std::filesystem;

namespace {

TimeStamp at(const char* s) { return TimeStamp::parse(s); }

ConversationMessage msg(std::uint64_t id, std::string text, const char* speaker = "speaker_1") {
    return {protocol_version, id, SpeakerId(speaker), at("0"), at("1"), std::move(text), std::nullopt};
}

PlaybackChunk generated(const char* lane, const char* gen, const char* dur, const char* id) {
    PlaybackChunk c{id, SpeakerId(lane), Duration::parse(dur), at("0"), at("0"), at(gen), at(gen), at(gen),
                    ChunkState::generated, "x"};
    c.t_ended = c.t_started + c.duration;
    return c;
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("sonartalk-test-" + std::to_string(std::random_device{}()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("queue is FIFO and ignores duplicates per sender") {
    MessageQueue q;
    CHECK(q.enqueue(msg(1, "a")).position == 0);
    CHECK(q.enqueue(msg(2, "b")).position == 1);
    CHECK_FALSE(q.enqueue(msg(1, "a again")).accepted);
    CHECK(q.enqueue(msg(1, "other sender"), {}, "relay").accepted);
    CHECK(q.size() == 3);
    CHECK(q.duplicates() == 1);
    CHECK(q.try_dequeue()->message.text == "a");
    CHECK(q.try_dequeue()->message.text == "b");
    CHECK(q.try_dequeue()->sender == "relay");
    CHECK_FALSE(q.try_dequeue().has_value());
    CHECK(q.max_depth() == 3);
}

TEST_CASE("journal replay restores the queue") {
    TempDir dir;
    const auto journal = dir.path / "queue.jsonl";
    {
        MessageQueue q(journal);
        q.enqueue(msg(1, "one"));
        q.enqueue(msg(2, "two"));
        q.enqueue(msg(3, "three"), {}, "relay");
    }
    MessageQueue restored(journal);
    CHECK(restored.size() == 3);
    CHECK_FALSE(restored.enqueue(msg(2, "two")).accepted);
    const auto pending = restored.pending();
    CHECK(pending[2].sender == "relay");
    CHECK(pending[0].message == msg(1, "one"));

    std::ofstream(dir.path / "bad.jsonl") << "{not json\n";
    CHECK_THROWS_AS(MessageQueue(dir.path / "bad.jsonl"), JournalError);
}

TEST_CASE("journal lines carry the sender in key order") {
    CHECK(journal_line(msg(4, "hi"), "sub") ==
          R"({"category":null,"end":1.000000,"msg_id":4,"protocol_version":1,"sender":"sub",)"
          R"("speaker":"speaker_1","start":0.000000,"text":"hi"})");
}

TEST_CASE("blocking dequeue wakes on enqueue and on close") {
    MessageQueue q;
    std::thread producer([&] { q.enqueue(msg(1, "late")); });
    const auto got = q.wait_dequeue();
    producer.join();
    REQUIRE(got.has_value());
    CHECK(got->message.text == "late");
    std::thread closer([&] { q.close(); });
    CHECK_FALSE(q.wait_dequeue().has_value());
    closer.join();
}

TEST_CASE("synthesis stub timing") {
    const auto c = synthesize(msg(1, "one two three four five"), at("10"), {});
    CHECK(c.duration.str() == "2.000000");
    CHECK(c.t_audio_ready.str() == "10.060000");
    CHECK(c.t_generated.str() == "10.760000");
    CHECK(c.unit_id == "msg-1");
    CHECK(synthesize(msg(2, "word"), at("0"), {}).duration.str() == "0.400000");
    CHECK(word_count("  a  b ") == 2);
}

TEST_CASE("one lane plays chunks back to back") {
    PlaybackScheduler s;
    const auto a = s.schedule(generated("s1", "1", "3", "a"));
    const auto b = s.schedule(generated("s1", "2", "2", "b"));
    CHECK(a.t_started == at("1"));
    CHECK(a.t_ended == at("4"));
    CHECK(b.t_started == at("4"));
    CHECK(b.t_ended == at("6"));
    CHECK(s.lane_end(SpeakerId("s1")) == at("6"));
    const auto lone = s.schedule(generated("s2", "5", "1", "c"));
    CHECK(lone.t_started == at("5"));
    auto pending = generated("s1", "1", "1", "p");
    pending.state = ChunkState::pending;
    CHECK_THROWS_AS(s.schedule(pending), InputError);
}

TEST_CASE("start-up delay") {
    PlaybackConfig cfg;
    cfg.startup = Duration::parse("0.5");
    PlaybackScheduler s(cfg);
    CHECK(s.schedule(generated("s1", "1", "3", "a")).t_started == at("1.5"));
    CHECK(s.schedule(generated("s1", "2", "1", "b")).t_started == at("4.5"));
}

TEST_CASE("fillers tile gaps") {
    const auto f = idle_filler(SpeakerId("s1"), at("0"), at("5"), Duration::parse("2"));
    REQUIRE(f.size() == 3);
    CHECK(f[2].t_started == at("4"));
    CHECK(f[2].duration.str() == "1.000000");
    CHECK(idle_filler(SpeakerId("s1"), at("3"), at("3"), Duration::parse("2")).empty());
    CHECK(idle_filler(SpeakerId("s1"), at("0"), at("1"), Duration::parse("2")).size() == 1);
}

TEST_CASE("timeline covers the window without gaps") {
    PlaybackScheduler s;
    s.schedule(generated("s1", "1", "3", "a"));
    s.schedule(generated("s1", "9", "2", "b"));
    const auto tl = s.timeline(SpeakerId("s1"), at("0"), at("12"));
    TimeStamp cursor = at("0");
    for (const auto& c : tl) {
        CHECK(c.t_started == cursor);
        cursor = c.t_ended;
    }
    CHECK(cursor == at("12"));
    CHECK(std::count_if(tl.begin(), tl.end(), [](auto& c) { return c.state != ChunkState::idle_filler; }) == 2);
}

TEST_CASE("chunk state over time") {
    const auto c = generated("s1", "1", "2", "a");
    CHECK(state_at(c, at("0.5")) == ChunkState::generated);
    CHECK(state_at(c, at("1")) == ChunkState::playing);
    CHECK(state_at(c, at("3")) == ChunkState::played);
}

TEST_CASE("playback chunk JSON round-trip") {
    const auto c = synthesize(msg(9, "hello there"), at("3"), {});
    CHECK(parse_playback_chunk(to_json_line(c)) == c);
}
