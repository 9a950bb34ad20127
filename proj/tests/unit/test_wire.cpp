#include <random>

#include "../oracles/golden_frames.hpp"
#include "doctest.h"
#include "sonartalk/errors.hpp"
#include "sonartalk/wire.hpp"

using namespace sonartalk;
using wire::Bytes;

namespace {

Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

ConversationMessage msg(std::uint64_t id, std::string text) {
    return {protocol_version, id, SpeakerId("speaker_1"), TimeStamp::parse("1"), TimeStamp::parse("2"),
            std::move(text), std::nullopt};
}

Bytes join(std::initializer_list<Bytes> parts) {
    Bytes out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace

TEST_CASE("golden frames are byte exact") {
    for (const auto& g : golden::frames()) {
        CHECK(wire::encode_frame(g.message) == bytes_of(g.header + g.payload));
        const auto r = wire::decode_stream(bytes_of(g.header + g.payload));
        REQUIRE(r.messages.size() == 1);
        CHECK(r.messages[0] == g.message);
        CHECK(r.carry.empty());
    }
}

TEST_CASE("encoding is deterministic and validates the message") {
    const auto m = msg(1, "depth check");
    CHECK(wire::encode_frame(m) == wire::encode_frame(m));
    CHECK_THROWS_AS(wire::encode_frame(msg(2, "")), InputError);
    CHECK_THROWS_AS(wire::encode_frame(msg(3, std::string(70000, 'x'))), FrameTooLargeError);
}

TEST_CASE("garbage around frames is skipped") {
    const auto a = wire::encode_frame(msg(1, "one"));
    const auto b = wire::encode_frame(msg(2, "two"));
    const Bytes junk{'x', 'S', 'N', 0, 0xff};
    const auto r = wire::decode_stream(join({junk, a, junk, b, junk}));
    REQUIRE(r.messages.size() == 2);
    CHECK(r.messages[0].msg_id == 1);
    CHECK(r.messages[1].msg_id == 2);
    CHECK(r.stats.skipped_bytes == 15);
    CHECK(r.carry.empty());
}

TEST_CASE("empty input") {
    const auto r = wire::decode_stream({});
    CHECK(r.messages.empty());
    CHECK(r.carry.empty());
}

TEST_CASE("a split magic is carried") {
    const auto a = wire::encode_frame(msg(1, "one"));
    wire::FrameDecoder d;
    CHECK(d.feed(Bytes(a.begin(), a.begin() + 3)).empty());
    CHECK(d.pending_bytes() == 3);
    CHECK(d.feed(Bytes(a.begin() + 3, a.end())).size() == 1);
    CHECK(d.pending_bytes() == 0);
}

TEST_CASE("every split point of a two-frame stream yields both messages once") {
    const auto stream = join({wire::encode_frame(msg(1, "one")), wire::encode_frame(msg(2, "two"))});
    for (std::size_t k = 0; k <= stream.size(); ++k) {
        wire::FrameDecoder d;
        auto got = d.feed(std::span(stream).first(k));
        const auto rest = d.feed(std::span(stream).subspan(k));
        got.insert(got.end(), rest.begin(), rest.end());
        REQUIRE(got.size() == 2);
        CHECK(got[0].msg_id == 1);
        CHECK(got[1].msg_id == 2);
        CHECK(d.pending_bytes() == 0);
    }
}

TEST_CASE("corrupt and oversize frames resynchronize") {
    auto bad = wire::encode_frame(msg(1, "one"));
    bad[20] = '#';
    const auto good = wire::encode_frame(msg(2, "two"));
    const Bytes oversize{'S', 'N', 'R', '1', 0x00, 0x01, 0x00, 0x00};
    wire::FrameDecoder d;
    const auto got = d.feed(join({bad, oversize, good}));
    REQUIRE(got.size() == 1);
    CHECK(got[0].msg_id == 2);
    CHECK(d.stats().corrupt_frames == 1);
    CHECK(d.stats().oversize_frames == 1);
}

TEST_CASE("non-canonical payloads are rejected") {
    const std::string payload =
        R"({"msg_id":1,"category":null,"end":2.000000,"protocol_version":1,"speaker":"s","start":1.000000,"text":"x"})";
    Bytes frame{'S', 'N', 'R', '1', 0, 0, 0, static_cast<std::uint8_t>(payload.size())};
    frame.insert(frame.end(), payload.begin(), payload.end());
    const auto r = wire::decode_stream(frame);
    CHECK(r.messages.empty());
    CHECK(r.stats.corrupt_frames == 1);
}

TEST_CASE("random byte streams never produce phantom messages") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> byte(0, 255), len(0, 300);
    for (int i = 0; i < 2000; ++i) {
        Bytes junk(static_cast<std::size_t>(len(rng)));
        for (auto& b : junk) b = static_cast<std::uint8_t>(byte(rng));
        if (i % 3 == 0 && junk.size() > 12) std::copy(wire::magic.begin(), wire::magic.end(), junk.begin() + 5);
        CHECK(wire::decode_stream(junk).messages.empty());
    }
}
