#include "sonartalk/latency.hpp"

#include <cstdio>
#include <map>

#include "sonartalk/serialize.hpp"

namespace sonartalk {

EventKind output_kind(Component c) {
    switch (c) {
        case Component::video_generated: return EventKind::chunk_generated;
        case Component::video_started: return EventKind::chunk_started;
        case Component::video_played: return EventKind::chunk_ended;
        default: return EventKind::output;
    }
}

std::string_view display_name(Component c) {
    switch (c) {
        case Component::asr: return "ASR";
        case Component::text_segmentation: return "Text segmentation";
        case Component::tts: return "TTS generated";
        case Component::video_generated: return "Vid. generated";
        case Component::video_started: return "Vid. started playing";
        case Component::video_played: return "Vid. played";
        case Component::channel: return "Channel";
        case Component::queue: return "Queue";
    }
    return "?";
}

namespace {

struct UnitEvents {
    std::vector<const TimelineEvent*> inputs;
    std::vector<const TimelineEvent*> outputs;
};

// Units of one component, in order of first appearance.
std::vector<std::pair<std::string, UnitEvents>> collect(const std::vector<TimelineEvent>& events, Component c) {
    std::vector<std::pair<std::string, UnitEvents>> units;
    std::map<std::string, std::size_t> index;
    const EventKind out_kind = output_kind(c);
    for (const auto& e : events) {
        if (e.component != c) continue;
        if (e.kind != EventKind::input && e.kind != out_kind) continue;
        auto [it, inserted] = index.try_emplace(e.unit_id, units.size());
        if (inserted) units.emplace_back(e.unit_id, UnitEvents{});
        auto& u = units[it->second].second;
        (e.kind == EventKind::input ? u.inputs : u.outputs).push_back(&e);
    }
    return units;
}

std::optional<double> mean_seconds(std::int64_t sum_us, std::size_t n) {
    if (n == 0) return std::nullopt;
    return static_cast<double>(sum_us) / static_cast<double>(n) / 1e6;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string cell(const std::optional<double>& v) { return v ? fixed2(*v) : "-"; }

std::string json_number(const std::optional<double>& v) { return v ? fixed2(*v) : "null"; }

}  // namespace

std::optional<double> component_latency(const std::vector<TimelineEvent>& events, Component component,
                                        std::vector<std::string>* diagnostics, const LatencyOptions& options) {
    const auto diag = [&](const std::string& msg) {
        if (diagnostics) diagnostics->push_back(std::string(to_string(component)) + ": " + msg);
    };
    std::int64_t sum = 0;
    std::size_t n = 0;
    for (const auto& [unit, ev] : collect(events, component)) {
        if (ev.outputs.empty()) {
            diag("unit '" + unit + "' has no output event");
            continue;
        }
        const TimelineEvent& out = *ev.outputs.front();
        TimeStamp in_wall;
        if (component == Component::asr) {
            in_wall = out.media_end + options.media_offset;
        } else if (ev.inputs.empty()) {
            diag("unit '" + unit + "' has no input event");
            continue;
        } else {
            in_wall = ev.inputs.front()->wall;
        }
        if (ev.outputs.size() > 1 || ev.inputs.size() > 1) {
            diag("unit '" + unit + "' has repeated events; using the first of each");
        }
        const Duration d = out.wall - in_wall;
        if (d.micros() < 0) {
            diag("unit '" + unit + "' has output before input");
            continue;
        }
        sum += d.micros();
        ++n;
    }
    return mean_seconds(sum, n);
}

std::optional<double> accumulated_latency(const std::vector<TimelineEvent>& events, Component component,
                                          const LatencyOptions& options) {
    std::int64_t sum = 0;
    std::size_t n = 0;
    for (const auto& [unit, ev] : collect(events, component)) {
        if (ev.outputs.empty()) continue;
        const TimelineEvent& out = *ev.outputs.front();
        sum += (out.wall - (out.media_end + options.media_offset)).micros();
        ++n;
    }
    return mean_seconds(sum, n);
}

LatencyReport report(const std::vector<TimelineEvent>& events, const LatencyOptions& options) {
    LatencyReport r;
    const auto make_row = [&](Component c, bool with_accumulated) {
        LatencyRow row;
        row.component = c;
        row.mean_latency_s = component_latency(events, c, &r.diagnostics, options);
        if (with_accumulated) row.accumulated_latency_s = accumulated_latency(events, c, options);
        for (const auto& [unit, ev] : collect(events, c)) {
            if (!ev.outputs.empty()) ++row.unit_count;
        }
        if (row.unit_count == 0) {
            r.diagnostics.push_back(std::string(to_string(c)) + ": no output events");
        }
        return row;
    };
    for (Component c : report_components) r.rows.push_back(make_row(c, true));
    for (Component c : {Component::channel, Component::queue}) {
        auto row = make_row(c, false);
        if (row.unit_count == 0) r.diagnostics.pop_back();  // transport rows are optional
        r.transport.push_back(row);
    }
    return r;
}

const LatencyRow* LatencyReport::row(Component c) const {
    for (const auto& r : rows) {
        if (r.component == c) return &r;
    }
    for (const auto& r : transport) {
        if (r.component == c) return &r;
    }
    return nullptr;
}

std::string LatencyReport::to_table() const {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-22s %9s %14s %7s\n", "Component", "Latency", "Acc. Latency", "Units");
    out += line;
    out += std::string(55, '-') + "\n";
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-22s %9s %14s %7zu\n", std::string(display_name(r.component)).c_str(),
                      cell(r.mean_latency_s).c_str(), cell(r.accumulated_latency_s).c_str(), r.unit_count);
        out += line;
    }
    bool any_transport = false;
    for (const auto& r : transport) any_transport |= r.unit_count > 0;
    if (any_transport) {
        out += std::string(55, '-') + "\n";
        for (const auto& r : transport) {
            std::snprintf(line, sizeof line, "%-22s %9s %14s %7zu\n", std::string(display_name(r.component)).c_str(),
                          cell(r.mean_latency_s).c_str(), "", r.unit_count);
            out += line;
        }
    }
    return out;
}

std::string LatencyReport::to_json() const {
    const auto row_json = [](const LatencyRow& r) {
        return CanonicalObject{}
            .string("component", to_string(r.component))
            .string("name", display_name(r.component))
            .raw("latency_s", json_number(r.mean_latency_s))
            .raw("accumulated_s", json_number(r.accumulated_latency_s))
            .integer("units", static_cast<std::int64_t>(r.unit_count))
            .str();
    };
    const auto list = [&](const std::vector<LatencyRow>& rs) {
        std::string s = "[";
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (i) s += ',';
            s += row_json(rs[i]);
        }
        return s + "]";
    };
    return CanonicalObject{}
        .raw("rows", list(rows))
        .raw("transport", list(transport))
        .strings("diagnostics", diagnostics)
        .str();
}

}  // namespace sonartalk
