#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "sonartalk/time.hpp"

namespace sonartalk {

// Blocking TCP byte stream to or from the modem port.
class LinkConnection {
public:
    LinkConnection(LinkConnection&&) noexcept;
    LinkConnection& operator=(LinkConnection&&) noexcept;
    ~LinkConnection();

    // Connects, retrying `retries` times with a backoff that doubles after each
    // failure. Throws ConnectionError when every attempt fails.
    static LinkConnection connect(const std::string& host, std::uint16_t port, int retries, Duration backoff);

    void write(std::span<const std::uint8_t> bytes);
    // Returns 0 at end of stream. Throws ConnectionError on failure.
    std::size_t read_some(std::span<std::uint8_t> buffer);
    void close();

private:
    struct Impl;
    explicit LinkConnection(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
    friend class LinkListener;
};

class LinkListener {
public:
    // port 0 picks a free port. Throws ConnectionError.
    LinkListener(const std::string& address, std::uint16_t port);
    ~LinkListener();

    std::uint16_t port() const;
    LinkConnection accept();
    // Unblocks a pending accept(), which then throws ConnectionError.
    void close();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sonartalk
