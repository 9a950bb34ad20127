#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <vector>

#include "sonartalk/types.hpp"

namespace sonartalk {

// Append-only TimelineEvent store. Appends from several stages are
// serialized through one mutex, so the stored order is the append order.
class EventLog {
public:
    using Listener = std::function<void(const TimelineEvent&)>;

    void append(TimelineEvent e);
    std::vector<TimelineEvent> snapshot() const;
    std::size_t size() const;

    // Called under the log lock for every later append.
    void set_listener(Listener listener);

    // Stable sort by wall time; used once a simulated run is complete.
    void sort_by_wall();

    void write_jsonl(std::ostream& out) const;
    void write_jsonl(const std::filesystem::path& path) const;

private:
    mutable std::mutex mu_;
    std::vector<TimelineEvent> events_;
    Listener listener_;
};

std::vector<TimelineEvent> read_event_log(std::istream& in);
std::vector<TimelineEvent> read_event_log(const std::filesystem::path& path);

}  // namespace sonartalk
