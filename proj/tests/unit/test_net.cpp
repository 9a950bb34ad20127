#include <thread>

#include "doctest.h"
#include "sonartalk/errors.hpp"
#include "sonartalk/net.hpp"
#include "sonartalk/wire.hpp"

using namespace sonartalk;

TEST_CASE("bytes cross the link unchanged") {
    LinkListener listener("127.0.0.1", 0);
    const auto port = listener.port();
    const ConversationMessage m{protocol_version, 1, SpeakerId("speaker_1"), TimeStamp{}, TimeStamp::parse("1"),
                                "Ballast tanks venting.", "operational"};
    const auto frame = wire::encode_frame(m);

    std::thread sender([&] {
        auto c = LinkConnection::connect("127.0.0.1", port, 3, Duration::parse("0.01"));
        c.write(frame);
        c.close();
    });
    auto conn = listener.accept();
    wire::Bytes got;
    std::uint8_t buf[7];
    for (std::size_t n; (n = conn.read_some(buf)) > 0;) got.insert(got.end(), buf, buf + n);
    sender.join();
    CHECK(got == frame);

    wire::FrameDecoder d;
    const auto msgs = d.feed(got);
    REQUIRE(msgs.size() == 1);
    CHECK(msgs[0] == m);
}

TEST_CASE("connecting to a closed port fails after retries") {
    std::uint16_t port = 0;
    {
        LinkListener l("127.0.0.1", 0);
        port = l.port();
    }
    CHECK_THROWS_AS(LinkConnection::connect("127.0.0.1", port, 2, Duration::parse("0.001")), ConnectionError);
}

TEST_CASE("close unblocks accept") {
    LinkListener listener("127.0.0.1", 0);
    std::thread closer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        listener.close();
    });
    CHECK_THROWS_AS(listener.accept(), ConnectionError);
    closer.join();
}
