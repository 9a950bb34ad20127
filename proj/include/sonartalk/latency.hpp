#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sonartalk/time.hpp"
#include "sonartalk/types.hpp"

namespace sonartalk {

// Report rows, in pipeline order.
inline constexpr std::array<Component, 6> report_components{
    Component::asr,           Component::text_segmentation, Component::tts,
    Component::video_generated, Component::video_started,   Component::video_played};

// Event kind that marks a component's output.
EventKind output_kind(Component c);

// Human-readable row name ("ASR", "Text segmentation", ...).
std::string_view display_name(Component c);

struct LatencyOptions {
    // Wall-time at which media-time 0 of the source audio was available.
    Duration media_offset{};
};

struct LatencyRow {
    Component component = Component::asr;
    std::optional<double> mean_latency_s;
    std::optional<double> accumulated_latency_s;
    std::size_t unit_count = 0;
};

struct LatencyReport {
    std::vector<LatencyRow> rows;
    // channel and queue delays, outside the six report rows.
    std::vector<LatencyRow> transport;
    std::vector<std::string> diagnostics;

    const LatencyRow* row(Component c) const;
    std::string to_table() const;
    std::string to_json() const;
};

// Mean over units of (output wall - input wall) for one component. For asr
// the input is the unit's source availability (media_end + media_offset).
// Units without a matching input/output pair are reported in `diagnostics`
// and left out. Empty when no unit matched.
std::optional<double> component_latency(const std::vector<TimelineEvent>& events, Component component,
                                        std::vector<std::string>* diagnostics = nullptr,
                                        const LatencyOptions& options = {});

// Mean over the component's output units of (output wall - source availability).
std::optional<double> accumulated_latency(const std::vector<TimelineEvent>& events, Component component,
                                          const LatencyOptions& options = {});

LatencyReport report(const std::vector<TimelineEvent>& events, const LatencyOptions& options = {});

}  // namespace sonartalk
