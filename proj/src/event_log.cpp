#include "sonartalk/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "sonartalk/clock.hpp"
#include "sonartalk/errors.hpp"
#include "sonartalk/serialize.hpp"

namespace sonartalk {

void SimulatedClock::advance_to(TimeStamp t) {
    std::int64_t cur = us_.load();
    if (t.micros() < cur) {
        throw StreamError("simulated clock cannot move backwards (" + t.str() + " < " +
                          TimeStamp::from_micros(cur).str() + ")");
    }
    us_.store(t.micros());
}

void SimulatedClock::advance(Duration d) {
    if (d.micros() < 0) {
        throw StreamError("simulated clock cannot move backwards");
    }
    us_.fetch_add(d.micros());
}

void EventLog::append(TimelineEvent e) {
    std::lock_guard lock(mu_);
    events_.push_back(std::move(e));
    if (listener_) listener_(events_.back());
}

std::vector<TimelineEvent> EventLog::snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
}

std::size_t EventLog::size() const {
    std::lock_guard lock(mu_);
    return events_.size();
}

void EventLog::set_listener(Listener listener) {
    std::lock_guard lock(mu_);
    listener_ = std::move(listener);
}

void EventLog::sort_by_wall() {
    std::lock_guard lock(mu_);
    std::stable_sort(events_.begin(), events_.end(),
                     [](const TimelineEvent& a, const TimelineEvent& b) { return a.wall < b.wall; });
}

void EventLog::write_jsonl(std::ostream& out) const {
    std::lock_guard lock(mu_);
    for (const auto& e : events_) {
        out << to_json_line(e) << '\n';
    }
}

void EventLog::write_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot open event log for writing: " + path.string());
    }
    write_jsonl(out);
    if (!out) {
        throw InputError("failed writing event log: " + path.string());
    }
}

std::vector<TimelineEvent> read_event_log(std::istream& in) {
    std::vector<TimelineEvent> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_timeline_event(line));
        } catch (const InputError& e) {
            throw InputError("event log line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<TimelineEvent> read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open event log: " + path.string());
    }
    return read_event_log(in);
}

}  // namespace sonartalk
