// sonartalk: submersible and topside nodes, the simulated end-to-end run, and
// the latency report.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "sonartalk/config.hpp"
#include "sonartalk/console_server.hpp"
#include "sonartalk/errors.hpp"
#include "sonartalk/event_log.hpp"
#include "sonartalk/latency.hpp"
#include "sonartalk/net.hpp"
#include "sonartalk/pipeline.hpp"
#include "sonartalk/scenario.hpp"
#include "sonartalk/serialize.hpp"
#include "sonartalk/session.hpp"
#include "sonartalk/wire.hpp"

namespace st = sonartalk;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, connection_failure = 3, scenario_error = 4 };

std::atomic<bool> g_stop{false};
std::atomic<st::LinkListener*> g_listener{nullptr};

extern "C" void on_signal(int) {
    g_stop = true;
    if (auto* l = g_listener.load()) l->close();
}

struct ConfigOptions {
    std::string file;
    std::vector<std::string> sets;

    void add_to(CLI::App& app) {
        app.add_option("--config", file, "INI config file")->check(CLI::ExistingFile);
        app.add_option("--set", sets, "override one key, e.g. --set chan.drop=0.1")->take_all();
    }

    // Precedence: defaults, config file, scenario, --set flags. The scenario's
    // overrides are consumed here.
    st::Config build(st::Scenario* scenario = nullptr) const {
        st::Config base;
        if (!file.empty()) st::load_config_file(base, file);
        if (scenario) {
            base = scenario->apply(base);
            scenario->overrides.clear();
        }
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw st::ConfigError("--set expects key=value, got '" + kv + "'");
            base.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        base.validate();
        return base;
    }
};

void write_playback(const std::filesystem::path& path, const std::map<st::SpeakerId, std::vector<st::PlaybackChunk>>& lanes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw st::Error("cannot write " + path.string());
    for (const auto& [lane, chunks] : lanes) {
        for (const auto& c : chunks) out << st::to_json_line(c) << '\n';
    }
}

// ---- simulate --------------------------------------------------------------

struct SimulateCmd {
    std::string scenario;
    ConfigOptions cfg;
    std::string log_path;
    std::string playback_path;
    std::string transcript_path;
    bool json = false;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("simulate", "run both nodes over the channel emulator on a simulated clock");
        c->add_option("--scenario", scenario, "scenario JSON")->required();
        cfg.add_to(*c);
        c->add_option("--log", log_path, "write the event log (JSONL)");
        c->add_option("--playback", playback_path, "write playback lanes, fillers included (JSONL)");
        c->add_option("--transcript", transcript_path, "write received messages (JSONL)");
        c->add_flag("--json", json, "print the report as JSON");
        c->callback([this] { run(); });
    }

    void run() {
        auto sc = st::load_scenario(scenario);
        const auto config = cfg.build(&sc);
        const auto res = st::run_simulate(sc, config);
        if (!log_path.empty()) {
            st::EventLog log;
            for (const auto& e : res.events) log.append(e);
            log.write_jsonl(log_path);
        }
        if (!playback_path.empty()) write_playback(playback_path, res.playback);
        if (!transcript_path.empty()) {
            std::ofstream out(transcript_path, std::ios::binary);
            for (const auto& m : res.received) out << st::to_json(m) << '\n';
        }
        if (json) {
            std::cout << res.report.to_json() << '\n';
            return;
        }
        std::cout << res.report.to_table();
        std::cout << "messages: sent " << res.sent.size() << ", received " << res.received.size() << ", lost "
                  << res.lost_msg_ids.size() << "; decoder resyncs " << res.decode_stats.resyncs()
                  << ", skipped bytes " << res.decode_stats.skipped_bytes << "; max queue depth "
                  << res.max_queue_depth << '\n';
        for (const auto& d : res.report.diagnostics) std::cerr << "note: " << d << '\n';
    }
};

// ---- report ----------------------------------------------------------------

struct ReportCmd {
    std::vector<std::string> logs;
    std::string media_offset = "0";
    bool json = false;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("report", "latency report from event logs");
        c->add_option("--log", logs, "event log (JSONL); repeat to merge logs")->required()->check(CLI::ExistingFile);
        c->add_option("--media-offset", media_offset, "wall time at which media time 0 was available, seconds");
        c->add_flag("--json", json, "print JSON instead of a table");
        c->callback([this] { run(); });
    }

    void run() {
        std::vector<st::TimelineEvent> events;
        for (const auto& p : logs) {
            auto part = st::read_event_log(std::filesystem::path(p));
            events.insert(events.end(), part.begin(), part.end());
        }
        st::LatencyOptions opt;
        try {
            opt.media_offset = st::Duration::parse(media_offset);
        } catch (const st::Error&) {
            throw st::ConfigError("--media-offset: expected seconds, got '" + media_offset + "'");
        }
        const auto rep = st::report(events, opt);
        if (json) {
            std::cout << rep.to_json() << '\n';
        } else {
            std::cout << rep.to_table();
            for (const auto& d : rep.diagnostics) std::cerr << "note: " << d << '\n';
        }
    }
};

// ---- sub -------------------------------------------------------------------

// Ordered handoff from the pipeline thread to the network thread.
class FrameQueue {
public:
    void push(st::wire::Bytes b) {
        {
            std::lock_guard l(mu_);
            q_.push_back(std::move(b));
        }
        cv_.notify_one();
    }
    void close() {
        {
            std::lock_guard l(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }
    std::optional<st::wire::Bytes> pop() {
        std::unique_lock l(mu_);
        cv_.wait(l, [&] { return closed_ || !q_.empty(); });
        if (q_.empty()) return std::nullopt;
        auto b = std::move(q_.front());
        q_.pop_front();
        return b;
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<st::wire::Bytes> q_;
    bool closed_ = false;
};

class SubBackend final : public st::ConsoleBackend {
public:
    SubBackend(st::SubmersibleNode& node, std::mutex& mu, const st::Clock& clock,
               std::function<void(std::vector<st::OutgoingMessage>)> send)
        : node_(node), mu_(mu), clock_(clock), send_(std::move(send)) {}

    std::vector<st::RosterEntry> roster() const override {
        std::lock_guard l(mu_);
        return node_.roster();
    }
    std::vector<st::ReceivedMessage> messages_since(std::uint64_t seq) const override {
        std::lock_guard l(mu_);
        if (seq >= sent_.size()) return {};
        return {sent_.begin() + static_cast<std::ptrdiff_t>(seq), sent_.end()};
    }
    std::vector<st::LaneEvent> lane_events_since(std::uint64_t) const override { return {}; }
    bool compose(const st::SpeakerId& speaker, std::string_view text) override {
        std::vector<st::OutgoingMessage> out;
        {
            std::lock_guard l(mu_);
            out = node_.compose(speaker, text, std::max(clock_.now(), node_.now()));
        }
        send_(std::move(out));
        return true;
    }
    void record(const st::OutgoingMessage& m) {
        std::lock_guard l(mu_);
        sent_.push_back(st::ReceivedMessage{sent_.size() + 1, m.wall, std::string(st::default_sender), m.message});
    }

private:
    st::SubmersibleNode& node_;
    std::mutex& mu_;
    const st::Clock& clock_;
    std::function<void(std::vector<st::OutgoingMessage>)> send_;
    std::vector<st::ReceivedMessage> sent_;
};

struct SubCmd {
    std::string scenario;
    ConfigOptions cfg;
    std::string log_path;
    bool realtime = false;
    bool console = false;
    bool stay = false;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("sub", "submersible node: scripted pipeline, frames to the modem port");
        c->add_option("--scenario", scenario, "scenario JSON with the input streams");
        cfg.add_to(*c);
        c->add_option("--log", log_path, "write the event log (JSONL)");
        c->add_flag("--realtime", realtime, "pace inputs by their wall times instead of running flat out");
        c->add_flag("--console", console, "serve the console API (compose) on net.console-port");
        c->add_flag("--stay", stay, "keep running after the scenario until interrupted");
        c->callback([this] { run(); });
    }

    void run() {
        std::optional<st::Scenario> sc;
        if (!scenario.empty()) sc = st::load_scenario(scenario);
        const auto config = cfg.build(sc ? &*sc : nullptr);
        auto session = st::new_session(config, std::make_shared<st::SteadyClock>());
        const auto inputs = sc ? st::scenario_inputs(*sc, session.config) : std::vector<st::SubInput>{};

        auto link = st::LinkConnection::connect(session.config.net.modem_host, session.config.net.modem_port,
                                                session.config.net.connect_retries,
                                                session.config.net.connect_backoff);
        FrameQueue frames;
        std::exception_ptr net_error;
        std::thread net([&] {
            try {
                while (auto f = frames.pop()) link.write(*f);
            } catch (...) {
                net_error = std::current_exception();
                g_stop = true;
            }
            link.close();
        });

        st::SubmersibleNode node(session.config, session.roster, session.log);
        std::mutex mu;
        const st::Clock& clock = *session.clock;
        std::shared_ptr<SubBackend> backend;
        const auto wait_until = [&](st::TimeStamp t) {
            if (!realtime) return;
            while (!g_stop && clock.now() < t) {
                std::this_thread::sleep_for(std::min(std::chrono::microseconds((t - clock.now()).micros()),
                                                     std::chrono::microseconds(50'000)));
            }
        };
        // Scenario inputs and console compose requests both send.
        std::mutex send_mu;
        std::size_t sent = 0;
        const auto send = [&](std::vector<st::OutgoingMessage> out) {
            std::lock_guard l(send_mu);
            for (auto& m : out) {
                wait_until(m.wall);
                session.log->append({st::Component::channel, st::EventKind::input,
                                     st::message_unit_id(st::default_sender, m.message.msg_id), m.message.end,
                                     m.wall});
                if (backend) backend->record(m);
                frames.push(st::wire::encode_frame(m.message));
                std::cout << m.message.speaker.str() << ": " << m.message.text << '\n';
                ++sent;
            }
        };
        std::unique_ptr<st::ConsoleServer> server;
        if (console) {
            backend = std::make_shared<SubBackend>(node, mu, clock, send);
            server = std::make_unique<st::ConsoleServer>(backend, "127.0.0.1", session.config.net.console_port);
            std::cerr << "console on port " << server->port() << '\n';
        }

        for (const auto& in : inputs) {
            if (g_stop) break;
            wait_until(in.wall);
            std::vector<st::OutgoingMessage> out;
            {
                std::lock_guard l(mu);
                if (const auto* p = std::get_if<st::AsrPiece>(&in.what)) {
                    session.log->append({st::Component::asr, st::EventKind::output, p->unit_id, p->media_end, p->wall});
                    out = node.push(*p);
                } else {
                    const auto& c = std::get<st::ComposedText>(in.what);
                    out = node.compose(c.speaker, c.text, in.wall);
                }
            }
            send(std::move(out));
        }
        {
            std::vector<st::OutgoingMessage> out;
            {
                std::lock_guard l(mu);
                out = node.drain();
            }
            send(std::move(out));
        }
        while (stay && !g_stop) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            std::vector<st::OutgoingMessage> out;
            {
                std::lock_guard l(mu);
                out = node.advance(std::max(clock.now(), node.now()));
            }
            send(std::move(out));
        }
        if (server) server->stop();
        frames.close();
        net.join();
        if (!log_path.empty()) session.log->write_jsonl(log_path);
        if (net_error) std::rethrow_exception(net_error);
        std::cerr << "sent " << sent << " messages\n";
    }
};

// ---- top -------------------------------------------------------------------

class TopBackend final : public st::ConsoleBackend {
public:
    TopBackend(std::shared_ptr<st::TopsideNode> node, std::vector<st::RosterEntry> roster)
        : node_(std::move(node)), roster_(std::move(roster)) {}

    std::vector<st::RosterEntry> roster() const override { return roster_; }
    std::vector<st::ReceivedMessage> messages_since(std::uint64_t seq) const override {
        return node_->messages_since(seq);
    }
    std::vector<st::LaneEvent> lane_events_since(std::uint64_t seq) const override {
        return node_->lane_events_since(seq);
    }
    bool compose(const st::SpeakerId&, std::string_view) override { return false; }

private:
    std::shared_ptr<st::TopsideNode> node_;
    std::vector<st::RosterEntry> roster_;
};

struct TopCmd {
    ConfigOptions cfg;
    std::string log_path;
    std::string playback_path;
    bool until_eof = false;
    bool console = false;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("top", "topside node: read the modem port, queue, synthesize, play");
        cfg.add_to(*c);
        c->add_option("--log", log_path, "write the event log (JSONL)");
        c->add_option("--playback", playback_path, "write playback lanes, fillers included (JSONL)");
        c->add_flag("--until-eof", until_eof, "exit after the first link connection closes");
        c->add_flag("--console", console, "serve the console API on net.console-port");
        c->callback([this] { run(); });
    }

    void run() {
        auto session = st::new_session(cfg.build(), std::make_shared<st::SteadyClock>());
        const st::Clock& clock = *session.clock;
        auto node = std::make_shared<st::TopsideNode>(session.config, session.log);
        st::LinkListener listener(session.config.net.modem_host, session.config.net.modem_port);
        g_listener = &listener;
        std::cerr << "listening on port " << listener.port() << '\n';

        std::unique_ptr<st::ConsoleServer> server;
        if (console) {
            server = std::make_unique<st::ConsoleServer>(std::make_shared<TopBackend>(node, session.roster),
                                                         "127.0.0.1", session.config.net.console_port);
            std::cerr << "console on port " << server->port() << '\n';
        }

        std::thread pipeline([&] {
            while (auto chunk = node->process_next(clock)) {
                std::cout << chunk->speaker.str() << ": " << chunk->text << '\n' << std::flush;
            }
        });

        std::vector<std::uint8_t> buf(4096);
        while (!g_stop) {
            std::optional<st::LinkConnection> conn;
            try {
                conn.emplace(listener.accept());
            } catch (const st::ConnectionError&) {
                if (g_stop) break;
                throw;
            }
            for (;;) {
                const std::size_t n = conn->read_some(buf);
                if (n == 0) break;
                node->on_bytes(std::span(buf.data(), n), clock.now());
            }
            if (until_eof) break;
        }
        g_listener = nullptr;
        node->close();
        pipeline.join();
        if (server) server->stop();

        const auto end = clock.now();
        if (!log_path.empty()) {
            session.log->sort_by_wall();
            session.log->write_jsonl(log_path);
        }
        if (!playback_path.empty()) {
            std::map<st::SpeakerId, std::vector<st::PlaybackChunk>> lanes;
            for (const auto& r : session.roster) lanes[r.id] = node->timeline(r.id, st::TimeStamp{}, end);
            write_playback(playback_path, lanes);
        }
        const auto stats = node->decode_stats();
        std::cerr << "received " << node->messages_since(0).size() << " messages; duplicates " << node->duplicates()
                  << ", decoder resyncs " << stats.resyncs() << ", skipped bytes " << stats.skipped_bytes
                  << ", max queue depth " << node->max_queue_depth() << '\n';
    }
};

// ---- config ----------------------------------------------------------------

struct ConfigCmd {
    ConfigOptions cfg;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("config", "print every config key with its effective value");
        cfg.add_to(*c);
        c->callback([this] { run(); });
    }

    void run() {
        const auto config = cfg.build();
        std::string section;
        for (const auto& k : st::config_keys()) {
            const auto dot = k.key.find('.');
            const auto sec = k.key.substr(0, dot);
            if (sec != section) {
                std::cout << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
                section = sec;
            }
            std::cout << "# " << k.help << '\n' << k.key.substr(dot + 1) << " = " << config.get(k.key) << '\n';
        }
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sonartalk: text pipeline between a submersible and its support ship"};
    app.require_subcommand(1);
    SimulateCmd simulate;
    ReportCmd report;
    SubCmd sub;
    TopCmd top;
    ConfigCmd config;
    simulate.add(app);
    report.add(app);
    sub.add(app);
    top.add(app);
    config.add(app);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    } catch (const st::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const st::ConnectionError& e) {
        std::cerr << "connection failure: " << e.what() << '\n';
        return connection_failure;
    } catch (const st::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return scenario_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return ok;
}
