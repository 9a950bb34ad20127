#pragma once

#include <array>
#include <string>
#include <vector>

#include "sonartalk/types.hpp"

namespace table1 {

inline constexpr std::array<double, 6> components{2.99, 2.66, 0.06, 1.49, 3.21, 3.41};
inline constexpr std::array<double, 6> accumulated{2.99, 5.65, 5.71, 7.20, 10.41, 13.82};

// Event log of `units` content units that each spend exactly `delays[k]`
// seconds in stage k. Unit i's source media ends at 7.3*i + 1 seconds.
inline std::vector<sonartalk::TimelineEvent> constant_delay_events(int units,
                                                                   const std::array<double, 6>& delays = components) {
    using namespace sonartalk;
    constexpr std::array<Component, 6> stage{Component::asr,           Component::text_segmentation,
                                             Component::tts,           Component::video_generated,
                                             Component::video_started, Component::video_played};
    constexpr std::array<EventKind, 6> out_kind{EventKind::output,          EventKind::output,
                                                EventKind::output,          EventKind::chunk_generated,
                                                EventKind::chunk_started,   EventKind::chunk_ended};
    std::vector<TimelineEvent> events;
    for (int i = 0; i < units; ++i) {
        const auto media_end = TimeStamp::from_micros(7'300'000LL * i + 1'000'000);
        TimeStamp wall = media_end;
        for (std::size_t k = 0; k < stage.size(); ++k) {
            const std::string id = (k == 0 ? "asr:" : k == 1 ? "utt:" : "msg-") + std::to_string(i + 1);
            if (k > 0) events.push_back({stage[k], EventKind::input, id, media_end, wall});
            wall = wall + Duration::from_seconds(delays[k]);
            events.push_back({stage[k], out_kind[k], id, media_end, wall});
        }
    }
    return events;
}

}  // namespace table1
