#include "sonartalk/console_server.hpp"

#include <boost/asio/co_spawn.hpp>
#include <boost/asio/detached.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/redirect_error.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/use_awaitable.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <nlohmann/json.hpp>

#include "sonartalk/errors.hpp"
#include "sonartalk/serialize.hpp"

namespace sonartalk {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string error_body(std::string_view msg) { return CanonicalObject{}.string("error", msg).str(); }

std::string_view path_of(std::string_view target) { return target.substr(0, target.find('?')); }

}  // namespace

std::uint64_t since_parameter(std::string_view target) {
    const auto q = target.find('?');
    if (q == std::string_view::npos) return 0;
    std::string_view query = target.substr(q + 1);
    while (!query.empty()) {
        const auto amp = query.find('&');
        const auto pair = query.substr(0, amp);
        if (pair.substr(0, 6) == "since=") {
            const auto v = pair.substr(6);
            std::uint64_t out = 0;
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (ec != std::errc{} || end != v.data() + v.size()) {
                throw InputError("since must be a non-negative integer");
            }
            return out;
        }
        if (amp == std::string_view::npos) break;
        query.remove_prefix(amp + 1);
    }
    return 0;
}

ConsoleReply handle_console_request(ConsoleBackend& backend, std::string_view method, std::string_view target,
                                    std::string_view body) {
    const auto path = path_of(target);
    try {
        if (path == "/roster") {
            if (method != "GET") return {405, error_body("use GET")};
            std::string list = "[";
            for (const auto& r : backend.roster()) {
                if (list.size() > 1) list += ',';
                list += CanonicalObject{}.string("id", r.id.str()).raw("enabled", r.enabled ? "true" : "false").str();
            }
            return {200, CanonicalObject{}.raw("roster", list + "]").str()};
        }
        if (path == "/messages") {
            if (method != "GET") return {405, error_body("use GET")};
            const auto since = since_parameter(target);
            std::string list = "[";
            std::uint64_t next = since;
            for (const auto& m : backend.messages_since(since)) {
                if (list.size() > 1) list += ',';
                list += to_json(m);
                next = m.seq;
            }
            return {200, CanonicalObject{}.raw("messages", list + "]").integer("next", static_cast<std::int64_t>(next)).str()};
        }
        if (path == "/compose") {
            if (method != "POST") return {405, error_body("use POST")};
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(body);
            } catch (const nlohmann::json::parse_error&) {
                return {400, error_body("body is not JSON")};
            }
            if (!j.is_object() || !j.contains("speaker") || !j["speaker"].is_string() || !j.contains("text") ||
                !j["text"].is_string()) {
                return {400, error_body("expected {\"speaker\": string, \"text\": string}")};
            }
            const auto speaker = j["speaker"].get<std::string>();
            const auto text = j["text"].get<std::string>();
            const auto roster = backend.roster();
            if (std::none_of(roster.begin(), roster.end(), [&](const RosterEntry& r) { return r.id.str() == speaker; })) {
                return {422, error_body("unknown speaker: " + speaker)};
            }
            if (!backend.compose(SpeakerId(speaker), text)) {
                return {404, error_body("this node does not accept composed text")};
            }
            return {202, CanonicalObject{}.raw("accepted", "true").str()};
        }
        if (path == "/timeline") return {426, error_body("/timeline is a WebSocket endpoint")};
        return {404, error_body("no route for " + std::string(path))};
    } catch (const InputError& e) {
        return {400, error_body(e.what())};
    }
}

struct ConsoleServer::Impl {
    std::shared_ptr<ConsoleBackend> backend;
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::thread thread;
    std::uint16_t port = 0;

    asio::awaitable<void> listen() {
        for (;;) {
            beast::error_code ec;
            tcp::socket socket = co_await acceptor.async_accept(asio::redirect_error(asio::use_awaitable, ec));
            if (ec) co_return;
            asio::co_spawn(io, serve(std::move(socket)), asio::detached);
        }
    }

    asio::awaitable<void> serve(tcp::socket socket) {
        beast::tcp_stream stream(std::move(socket));
        beast::flat_buffer buffer;
        try {
            for (;;) {
                http::request<http::string_body> req;
                co_await http::async_read(stream, buffer, req, asio::use_awaitable);
                const std::string target(req.target());
                if (websocket::is_upgrade(req)) {
                    if (path_of(target) != "/timeline") {
                        co_await send(stream, req, {404, error_body("WebSocket is only served on /timeline")});
                        co_return;
                    }
                    std::uint64_t since = 0;
                    try {
                        since = since_parameter(target);
                    } catch (const InputError& e) {
                        co_await send(stream, req, {400, error_body(e.what())});
                        co_return;
                    }
                    co_await timeline(websocket::stream<beast::tcp_stream>(std::move(stream)), std::move(req), since);
                    co_return;
                }
                const auto reply = handle_console_request(*backend, std::string(req.method_string()), target,
                                                          req.body());
                const bool keep = req.keep_alive();
                co_await send(stream, req, reply);
                if (!keep) break;
            }
        } catch (const std::exception&) {
            // Client went away or sent garbage; drop the connection.
        }
        beast::error_code ignored;
        stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
    }

    static asio::awaitable<void> send(beast::tcp_stream& stream, const http::request<http::string_body>& req,
                                      const ConsoleReply& reply) {
        http::response<http::string_body> res{static_cast<http::status>(reply.status), req.version()};
        res.set(http::field::content_type, "application/json");
        res.set(http::field::access_control_allow_origin, "*");
        res.keep_alive(req.keep_alive());
        res.body() = reply.body;
        res.prepare_payload();
        co_await http::async_write(stream, res, asio::use_awaitable);
    }

    asio::awaitable<void> timeline(websocket::stream<beast::tcp_stream> ws, http::request<http::string_body> req,
                                   std::uint64_t since) {
        auto open = std::make_shared<bool>(true);
        try {
            beast::get_lowest_layer(ws).expires_never();
            ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            co_await ws.async_accept(req, asio::use_awaitable);
            ws.text(true);
            // Reader: notices when the client closes.
            asio::co_spawn(
                io,
                [&ws, open]() -> asio::awaitable<void> {
                    beast::flat_buffer b;
                    try {
                        for (;;) {
                            co_await ws.async_read(b, asio::use_awaitable);
                            b.clear();
                        }
                    } catch (const std::exception&) {
                    }
                    *open = false;
                },
                asio::detached);
            asio::steady_timer timer(io);
            while (*open) {
                for (const auto& e : backend->lane_events_since(since)) {
                    co_await ws.async_write(asio::buffer(to_json(e)), asio::use_awaitable);
                    since = e.seq;
                }
                timer.expires_after(std::chrono::milliseconds(50));
                co_await timer.async_wait(asio::use_awaitable);
            }
        } catch (const std::exception&) {
        }
        // Let the reader coroutine, which refers to `ws`, finish first.
        beast::error_code ignored;
        beast::get_lowest_layer(ws).socket().close(ignored);
        asio::steady_timer settle(io);
        while (*open) {
            settle.expires_after(std::chrono::milliseconds(5));
            co_await settle.async_wait(asio::redirect_error(asio::use_awaitable, ignored));
        }
    }
};

ConsoleServer::ConsoleServer(std::shared_ptr<ConsoleBackend> backend, std::string address, std::uint16_t port)
    : impl_(std::make_unique<Impl>()) {
    impl_->backend = std::move(backend);
    try {
        const tcp::endpoint ep(asio::ip::make_address(address), port);
        impl_->acceptor.open(ep.protocol());
        impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
        impl_->acceptor.bind(ep);
        impl_->acceptor.listen();
        impl_->port = impl_->acceptor.local_endpoint().port();
    } catch (const boost::system::system_error& e) {
        throw ConnectionError("console server cannot listen on " + address + ":" + std::to_string(port) + ": " +
                              e.what());
    }
    asio::co_spawn(impl_->io, impl_->listen(), asio::detached);
    impl_->thread = std::thread([this] { impl_->io.run(); });
}

ConsoleServer::~ConsoleServer() { stop(); }

std::uint16_t ConsoleServer::port() const { return impl_->port; }

void ConsoleServer::stop() {
    if (!impl_->thread.joinable()) return;
    impl_->io.stop();
    impl_->thread.join();
}

}  // namespace sonartalk
