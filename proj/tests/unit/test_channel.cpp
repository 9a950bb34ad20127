#include "doctest.h"
#include "sonartalk/channel.hpp"
#include "sonartalk/errors.hpp"

using namespace sonartalk;

namespace {

wire::Bytes frame_of(std::size_t n) { return wire::Bytes(n, 0x41); }

TimeStamp at(const char* s) { return TimeStamp::parse(s); }

}  // namespace

TEST_CASE("idle link: serialization plus propagation") {
    AcousticChannel ch({});
    const auto out = ch.send(frame_of(100), at("0"));
    CHECK(out.seq == 0);
    CHECK(out.serialization_start == at("0"));
    REQUIRE(out.delivered_at.has_value());
    CHECK(out.delivered_at->str() == "3.533000");
}

TEST_CASE("header-only frame") {
    AcousticChannel ch({});
    CHECK(ch.send(frame_of(8), at("0")).delivered_at->str() == "2.613000");
}

TEST_CASE("back-to-back frames queue on the transmitter") {
    AcousticChannel ch({});
    ch.send(frame_of(100), at("0"));
    const auto second = ch.send(frame_of(100), at("0.1"));
    CHECK(second.serialization_start == at("1"));
    CHECK(second.delivered_at->str() == "4.533000");
    CHECK(ch.busy_until() == at("2"));

    CHECK(ch.next_delivery() == at("3.533"));
    CHECK(ch.deliver_until(at("3.5")).empty());
    const auto first = ch.deliver_until(at("4"));
    REQUIRE(first.size() == 1);
    CHECK(first[0].seq == 0);
    CHECK(ch.deliver_all().size() == 1);
}

TEST_CASE("serialization time rounds to the microsecond") {
    CHECK(serialization_time(1, 3.0).micros() == 333'333);
    CHECK(serialization_time(2, 3.0).micros() == 666'667);
    CHECK(serialization_time(0, 100.0).micros() == 0);
}

TEST_CASE("sends must not go back in time") {
    AcousticChannel ch({});
    ch.send(frame_of(10), at("5"));
    CHECK_THROWS_AS(ch.send(frame_of(10), at("4")), StreamError);
}

TEST_CASE("dropped frames still occupy the link") {
    ChannelParams p;
    p.drop_prob = 1.0;
    AcousticChannel ch(p);
    CHECK_FALSE(ch.send(frame_of(100), at("0")).delivered_at.has_value());
    CHECK(ch.busy_until() == at("1"));
    CHECK(ch.dropped() == 1);
    CHECK(ch.deliver_all().empty());
}

TEST_CASE("seeded loss is reproducible") {
    ChannelParams p;
    p.drop_prob = 0.5;
    p.rng_seed = 7;
    const auto pattern = [&] {
        AcousticChannel ch(p);
        std::vector<bool> lost;
        for (int i = 0; i < 64; ++i) lost.push_back(!ch.send(frame_of(10), at("0")).delivered_at);
        return lost;
    };
    const auto a = pattern();
    CHECK(a == pattern());
    CHECK(std::count(a.begin(), a.end(), true) > 10);
    CHECK(std::count(a.begin(), a.end(), false) > 10);
}

TEST_CASE("parameter validation") {
    ChannelParams p;
    p.bandwidth_Bps = 0;
    CHECK_THROWS_AS(AcousticChannel{p}, ConfigError);
    p = {};
    p.drop_prob = 1.5;
    CHECK_THROWS_AS(AcousticChannel{p}, ConfigError);
    p = {};
    p.propagation = Duration::from_micros(-1);
    CHECK_THROWS_AS(AcousticChannel{p}, ConfigError);
}
