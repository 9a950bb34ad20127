#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sonartalk/channel.hpp"
#include "sonartalk/errors.hpp"
#include "sonartalk/latency.hpp"
#include "sonartalk/pipeline.hpp"
#include "sonartalk/scenario.hpp"
#include "sonartalk/serialize.hpp"
#include "sonartalk/speaker_segmenter.hpp"
#include "sonartalk/stability_filter.hpp"
#include "sonartalk/text_segmenter.hpp"
#include "sonartalk/topic_classifier.hpp"
#include "sonartalk/wire.hpp"

namespace py = pybind11;
namespace st = sonartalk;

namespace {

py::dict message_dict(const st::ConversationMessage& m) {
    py::dict d;
    d["protocol_version"] = m.protocol_version;
    d["msg_id"] = m.msg_id;
    d["speaker"] = m.speaker.str();
    d["start"] = m.start.seconds();
    d["end"] = m.end.seconds();
    d["text"] = m.text;
    d["category"] = m.category ? py::object(py::str(*m.category)) : py::object(py::none());
    return d;
}

st::ConversationMessage message_from(std::uint64_t msg_id, const std::string& speaker, double start, double end,
                                     const std::string& text, std::optional<std::string> category) {
    return {st::protocol_version, msg_id, st::SpeakerId(speaker), st::TimeStamp::from_seconds(start),
            st::TimeStamp::from_seconds(end), text, std::move(category)};
}

py::bytes as_bytes(const st::wire::Bytes& b) { return {reinterpret_cast<const char*>(b.data()), b.size()}; }

std::span<const std::uint8_t> view(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

py::dict text_map(const std::map<st::SpeakerId, std::vector<std::string>>& m) {
    py::dict d;
    for (const auto& [speaker, texts] : m) d[py::str(speaker.str())] = texts;
    return d;
}

py::dict simulation_dict(const st::SimulationResult& r) {
    std::string log;
    for (const auto& e : r.events) log += st::to_json_line(e) + "\n";
    py::list received;
    for (const auto& m : r.received) received.append(message_dict(m.message));
    py::dict d;
    d["sent_text"] = text_map(r.sent_text());
    d["played_text"] = text_map(r.played_text());
    d["received"] = received;
    d["lost_msg_ids"] = r.lost_msg_ids;
    d["report_table"] = r.report.to_table();
    d["report_json"] = r.report.to_json();
    d["event_log"] = log;
    d["end_wall"] = r.end_wall.seconds();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Text pipeline between a submersible and its support ship";

    auto base = py::register_exception<st::Error>(m, "Error");
    py::register_exception<st::ConfigError>(m, "ConfigError", base);
    py::register_exception<st::InputError>(m, "InputError", base);
    py::register_exception<st::StreamError>(m, "StreamError", base);
    py::register_exception<st::DecoderContractError>(m, "DecoderContractError", base);
    py::register_exception<st::FrameTooLargeError>(m, "FrameTooLargeError", base);
    py::register_exception<st::ScenarioError>(m, "ScenarioError", base);

    m.def(
        "encode_frame",
        [](std::uint64_t msg_id, const std::string& speaker, double start, double end, const std::string& text,
           std::optional<std::string> category) {
            return as_bytes(st::wire::encode_frame(message_from(msg_id, speaker, start, end, text, category)));
        },
        py::arg("msg_id"), py::arg("speaker"), py::arg("start"), py::arg("end"), py::arg("text"),
        py::arg("category") = py::none(), "Wire frame of one message.");

    py::class_<st::wire::FrameDecoder>(m, "FrameDecoder")
        .def(py::init<>())
        .def(
            "feed",
            [](st::wire::FrameDecoder& d, py::bytes data) {
                const std::string_view s = data;
                py::list out;
                for (const auto& msg : d.feed(view(s))) out.append(message_dict(msg));
                return out;
            },
            "Messages completed by these bytes.")
        .def_property_readonly("pending_bytes", &st::wire::FrameDecoder::pending_bytes)
        .def_property_readonly("stats", [](const st::wire::FrameDecoder& d) {
            py::dict s;
            s["skipped_bytes"] = d.stats().skipped_bytes;
            s["corrupt_frames"] = d.stats().corrupt_frames;
            s["oversize_frames"] = d.stats().oversize_frames;
            return s;
        });

    py::class_<st::StabilityFilter>(m, "StabilityFilter")
        .def(py::init<>())
        .def(
            "new_hypothesis",
            [](st::StabilityFilter& f, int chunk_count, std::vector<std::string> tokens) {
                return f.new_hypothesis({chunk_count, std::move(tokens)}).newly_stable;
            },
            py::arg("chunk_count"), py::arg("tokens"), "Newly stable tokens.")
        .def("finalize", [](st::StabilityFilter& f) { return f.finalize().newly_stable; })
        .def_property_readonly("stable", &st::StabilityFilter::stable);

    m.def(
        "segment_speakers",
        [](const std::vector<std::optional<std::string>>& labels, double frame_rate) {
            st::SegmenterConfig cfg;
            cfg.frame_rate_hz = frame_rate;
            std::vector<st::FrameLabel> frames;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                frames.push_back({static_cast<std::int64_t>(i),
                                  labels[i] ? std::optional(st::SpeakerId(*labels[i])) : std::nullopt});
            }
            st::SpeakerSegmenter seg(cfg);
            auto events = seg.push_frames(frames);
            const auto tail = seg.flush();
            events.insert(events.end(), tail.begin(), tail.end());
            std::vector<std::tuple<std::string, double, double>> out;
            for (const auto& s : st::closed_segments(events)) out.emplace_back(s.speaker.str(), s.start.seconds(), s.end.seconds());
            return out;
        },
        py::arg("labels"), py::arg("frame_rate") = 50.0,
        "Speech segments (speaker, start, end) of per-frame labels; None is background.");

    m.def(
        "segment_text",
        [](const std::vector<std::tuple<std::string, std::string, double>>& pieces) {
            st::TextSegmenter seg;
            std::vector<std::tuple<std::string, std::string, std::string>> out;
            auto take = [&](const std::vector<st::Utterance>& us) {
                for (const auto& u : us) out.emplace_back(u.speaker.str(), u.text, std::string(st::to_string(u.emit_reason)));
            };
            for (const auto& [speaker, text, at] : pieces) {
                const auto t = st::TimeStamp::from_seconds(at);
                take(seg.tick(t));
                take(seg.push(text, st::SpeakerId(speaker), t, t, t));
            }
            take(seg.flush_all());
            return out;
        },
        py::arg("pieces"), "Utterances (speaker, text, reason) of (speaker, text, arrival) pieces.");

    m.def(
        "classify",
        [](const std::string& sentence) {
            static const auto clf = st::make_classifier(st::Config{});
            const auto c = clf->classify(sentence);
            return std::make_pair(c.label, c.similarity);
        },
        py::arg("sentence"), "Nearest built-in category and its cosine similarity.");

    m.def(
        "deliveries",
        [](const std::vector<std::pair<std::size_t, double>>& sends, double bandwidth, double propagation) {
            st::ChannelParams p;
            p.bandwidth_Bps = bandwidth;
            p.propagation = st::Duration::from_seconds(propagation);
            st::AcousticChannel ch(p);
            std::vector<double> out;
            for (const auto& [bytes, t] : sends) {
                out.push_back(ch.send(st::wire::Bytes(bytes, 0), st::TimeStamp::from_seconds(t)).delivered_at->seconds());
            }
            return out;
        },
        py::arg("sends"), py::arg("bandwidth") = 100.0, py::arg("propagation") = 2.533,
        "Delivery time of each (bytes, send_time) frame on a lossless link.");

    m.def(
        "latency_report",
        [](const std::string& jsonl) {
            std::vector<st::TimelineEvent> events;
            std::size_t pos = 0;
            while (pos < jsonl.size()) {
                auto nl = jsonl.find('\n', pos);
                if (nl == std::string::npos) nl = jsonl.size();
                if (nl > pos) events.push_back(st::parse_timeline_event(std::string_view(jsonl).substr(pos, nl - pos)));
                pos = nl + 1;
            }
            return st::report(events).to_json();
        },
        py::arg("event_log"), "Latency report (JSON) of a JSONL event log.");

    m.def(
        "simulate",
        [](const std::string& scenario_json) {
            const auto sc = st::parse_scenario(scenario_json);
            st::SimulationResult r;
            {
                py::gil_scoped_release release;
                r = st::run_simulate(sc);
            }
            return simulation_dict(r);
        },
        py::arg("scenario_json"), "Runs a scenario end to end on a simulated clock.");

    m.attr("protocol_version") = st::protocol_version;
}
