#include "sonartalk/net.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/write.hpp>
#include <chrono>
#include <sys/socket.h>
#include <thread>

#include "sonartalk/errors.hpp"

namespace sonartalk {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct LinkConnection::Impl {
    asio::io_context io;
    tcp::socket socket{io};
};

LinkConnection::LinkConnection(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
LinkConnection::LinkConnection(LinkConnection&&) noexcept = default;
LinkConnection& LinkConnection::operator=(LinkConnection&&) noexcept = default;
LinkConnection::~LinkConnection() = default;

LinkConnection LinkConnection::connect(const std::string& host, std::uint16_t port, int retries, Duration backoff) {
    auto impl = std::make_unique<Impl>();
    std::string last_error;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::microseconds(backoff.micros()));
            backoff = backoff + backoff;
        }
        boost::system::error_code ec;
        tcp::resolver resolver(impl->io);
        const auto endpoints = resolver.resolve(host, std::to_string(port), ec);
        if (!ec) asio::connect(impl->socket, endpoints, ec);
        if (!ec) return LinkConnection(std::move(impl));
        last_error = ec.message();
        impl->socket.close(ec);
    }
    throw ConnectionError("cannot connect to " + host + ":" + std::to_string(port) + " after " +
                          std::to_string(retries + 1) + " attempts: " + last_error);
}

void LinkConnection::write(std::span<const std::uint8_t> bytes) {
    boost::system::error_code ec;
    asio::write(impl_->socket, asio::buffer(bytes.data(), bytes.size()), ec);
    if (ec) throw ConnectionError("link write failed: " + ec.message());
}

std::size_t LinkConnection::read_some(std::span<std::uint8_t> buffer) {
    boost::system::error_code ec;
    const std::size_t n = impl_->socket.read_some(asio::buffer(buffer.data(), buffer.size()), ec);
    if (ec == asio::error::eof) return 0;
    if (ec) throw ConnectionError("link read failed: " + ec.message());
    return n;
}

void LinkConnection::close() {
    boost::system::error_code ec;
    impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
    impl_->socket.close(ec);
}

struct LinkListener::Impl {
    asio::io_context io;
    tcp::acceptor acceptor{io};
};

LinkListener::LinkListener(const std::string& address, std::uint16_t port) : impl_(std::make_unique<Impl>()) {
    try {
        const tcp::endpoint ep(asio::ip::make_address(address), port);
        impl_->acceptor.open(ep.protocol());
        impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
        impl_->acceptor.bind(ep);
        impl_->acceptor.listen();
    } catch (const boost::system::system_error& e) {
        throw ConnectionError("cannot listen on " + address + ":" + std::to_string(port) + ": " + e.what());
    }
}

LinkListener::~LinkListener() = default;

std::uint16_t LinkListener::port() const { return impl_->acceptor.local_endpoint().port(); }

LinkConnection LinkListener::accept() {
    auto conn = std::make_unique<LinkConnection::Impl>();
    boost::system::error_code ec;
    impl_->acceptor.accept(conn->socket, ec);
    if (ec) throw ConnectionError("accept failed: " + ec.message());
    return LinkConnection(std::move(conn));
}

void LinkListener::close() {
    // shutdown(2) wakes a thread blocked in accept(); closing the descriptor would not.
    ::shutdown(impl_->acceptor.native_handle(), SHUT_RDWR);
}

}  // namespace sonartalk
