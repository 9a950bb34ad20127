#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sonartalk/pipeline.hpp"
#include "sonartalk/session.hpp"

namespace sonartalk {

// What a node exposes to the operator console.
class ConsoleBackend {
public:
    virtual ~ConsoleBackend() = default;

    virtual std::vector<RosterEntry> roster() const = 0;
    // Entries with seq greater than `seq`.
    virtual std::vector<ReceivedMessage> messages_since(std::uint64_t seq) const = 0;
    virtual std::vector<LaneEvent> lane_events_since(std::uint64_t seq) const = 0;
    // Direct text entry. Throws InputError to reject the request; returns
    // false when this node does not accept composed text.
    virtual bool compose(const SpeakerId& speaker, std::string_view text) = 0;
};

struct ConsoleReply {
    int status = 200;
    std::string body;  // JSON
};

// Plain HTTP routes:
//   GET  /roster               {"roster":[{"enabled":true,"id":"speaker_1"},...]}
//   GET  /messages?since=N     {"messages":[...],"next":M}
//   POST /compose              {"speaker":"...","text":"..."} -> 202
// WebSocket /timeline?since=N streams LaneEvent objects, one per text frame.
ConsoleReply handle_console_request(ConsoleBackend& backend, std::string_view method, std::string_view target,
                                    std::string_view body);

// Cursor from a "since" query parameter; 0 when absent. Throws InputError.
std::uint64_t since_parameter(std::string_view target);

// HTTP + WebSocket server on one background I/O thread.
class ConsoleServer {
public:
    // port 0 picks a free port.
    ConsoleServer(std::shared_ptr<ConsoleBackend> backend, std::string address, std::uint16_t port);
    ~ConsoleServer();

    ConsoleServer(const ConsoleServer&) = delete;
    ConsoleServer& operator=(const ConsoleServer&) = delete;

    std::uint16_t port() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sonartalk
