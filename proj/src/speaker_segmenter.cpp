#include "sonartalk/speaker_segmenter.hpp"

#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <string>

#include "sonartalk/errors.hpp"

namespace sonartalk {

void SegmenterConfig::validate() const {
    if (!(std::isfinite(frame_rate_hz) && frame_rate_hz > 0)) {
        throw ConfigError("segmenter.frame-rate must be positive");
    }
    if (window_frames < 1) throw ConfigError("segmenter.window must be >= 1");
    if (step_frames < 1 || step_frames > window_frames) {
        throw ConfigError("segmenter.step must be in [1, window]");
    }
    if (end_threshold < 0 || !(end_threshold < start_threshold) || start_threshold > window_frames) {
        throw ConfigError("segmenter thresholds need 0 <= end-thr < start-thr <= window");
    }
    if (min_segment.micros() < 0) throw ConfigError("segmenter.min-segment must be >= 0");
    if (merge_gap.micros() < 0) throw ConfigError("segmenter.merge-gap must be >= 0");
}

TimeStamp SegmenterConfig::frame_time(std::int64_t index) const {
    return TimeStamp::from_micros(std::llround(static_cast<double>(index) * 1e6 / frame_rate_hz));
}

ScriptedClassifier::ScriptedClassifier(std::vector<FrameLabel> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const auto idx = labels_[i].frame_index;
        if (idx < 0) throw InputError("frame_index must be non-negative");
        if (!by_index_.emplace(idx, i).second) {
            throw InputError("duplicate frame_index " + std::to_string(idx));
        }
        frame_count_ = std::max(frame_count_, idx + 1);
    }
}

ScriptedClassifier ScriptedClassifier::load_jsonl(std::istream& in) {
    std::vector<FrameLabel> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const auto& idx = j.at("frame_index");
            if (!idx.is_number_integer()) throw InputError("frame_index must be an integer");
            FrameLabel f{idx.get<std::int64_t>(), std::nullopt};
            const auto& lab = j.at("label");
            if (!lab.is_null()) f.label = SpeakerId(lab.get<std::string>());
            labels.push_back(std::move(f));
        } catch (const nlohmann::json::exception& e) {
            throw InputError("frame label line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return ScriptedClassifier(std::move(labels));
}

std::optional<SpeakerId> ScriptedClassifier::classify(std::int64_t frame_index) const {
    auto it = by_index_.find(frame_index);
    if (it == by_index_.end()) return std::nullopt;
    return labels_[it->second].label;
}

SpeakerSegmenter::SpeakerSegmenter(SegmenterConfig config) : config_(std::move(config)) { config_.validate(); }

std::vector<SegmentEvent> SpeakerSegmenter::push_frames(std::span<const FrameLabel> labels) {
    if (flushed_) throw StreamError("segmenter already flushed");
    std::vector<SegmentEvent> out;
    for (const auto& f : labels) {
        if (f.frame_index < next_index_) {
            throw StreamError("frame index " + std::to_string(f.frame_index) + " does not continue the stream (next " +
                              std::to_string(next_index_) + ")");
        }
        while (next_index_ < f.frame_index) {
            append_frame(std::nullopt, out);
        }
        append_frame(f.label, out);
    }
    return out;
}

void SpeakerSegmenter::append_frame(std::optional<SpeakerId> label, std::vector<SegmentEvent>& out) {
    frames_.push_back(std::move(label));
    ++next_index_;
    while (next_window_ * config_.step_frames + config_.window_frames <= next_index_) {
        evaluate_window(out);
    }
}

void SpeakerSegmenter::evaluate_window(std::vector<SegmentEvent>& out) {
    const std::int64_t first = next_window_ * config_.step_frames;
    const std::int64_t last = first + config_.window_frames;  // exclusive

    std::map<SpeakerId, int> counts;
    for (std::int64_t i = first; i < last; ++i) {
        const auto& lab = frames_[static_cast<std::size_t>(i - buffer_base_)];
        if (lab) ++counts[*lab];
    }
    for (const auto& [speaker, _] : counts) {
        tracks_.try_emplace(speaker);
    }

    const TimeStamp window_start = config_.frame_time(first);
    const TimeStamp window_end = config_.frame_time(last);
    const TimeStamp next_start = config_.frame_time(first + config_.step_frames);

    for (auto& [speaker, track] : tracks_) {
        auto it = counts.find(speaker);
        const int count = it == counts.end() ? 0 : it->second;
        if (!track.raw_open) {
            if (count >= config_.start_threshold) {
                track.raw_open = true;
                if (track.start) {
                    // A held-back segment is only kept while a reopen would
                    // still fall inside merge_gap, so this continues it.
                    track.end.reset();
                } else {
                    track.start = window_start;
                    track.open_emitted = false;
                }
            }
        } else if (count < config_.end_threshold) {
            track.raw_open = false;
            track.end = window_end;
        }
        settle(speaker, track, window_end, next_start, out);
    }

    ++next_window_;
    const std::int64_t keep_from = next_window_ * config_.step_frames;
    while (buffer_base_ < keep_from && !frames_.empty()) {
        frames_.pop_front();
        ++buffer_base_;
    }
}

// Emits what can no longer change for one track. An open track ends no
// earlier than `horizon` (the end of the window just evaluated); `next_open`
// is the earliest media-time a new raw segment of this speaker could start.
void SpeakerSegmenter::settle(const SpeakerId& speaker, Track& track, TimeStamp horizon, TimeStamp next_open,
                              std::vector<SegmentEvent>& out) {
    if (!track.start) return;
    const TimeStamp start = *track.start;
    if (!track.open_emitted) {
        const TimeStamp known_end = track.end ? *track.end : horizon;
        if (known_end - start >= config_.min_segment) {
            out.push_back(SegmentEvent{SegmentEventKind::open, speaker, start, std::nullopt});
            track.open_emitted = true;
        }
    }
    if (track.end && next_open - *track.end >= config_.merge_gap) {
        if (track.open_emitted) {
            out.push_back(SegmentEvent{SegmentEventKind::close, speaker, start, track.end});
        }
        track = Track{};
    }
}

std::vector<SegmentEvent> SpeakerSegmenter::flush() {
    std::vector<SegmentEvent> out;
    if (flushed_) return out;
    flushed_ = true;
    const TimeStamp last_end = config_.frame_time(next_index_);
    for (auto& [speaker, track] : tracks_) {
        if (track.raw_open) {
            track.raw_open = false;
            track.end = last_end;
        }
        if (!track.start) continue;
        const TimeStamp start = *track.start;
        const TimeStamp end = *track.end;
        if (end - start >= config_.min_segment) {
            if (!track.open_emitted) out.push_back(SegmentEvent{SegmentEventKind::open, speaker, start, std::nullopt});
            out.push_back(SegmentEvent{SegmentEventKind::close, speaker, start, end});
        }
        track = Track{};
    }
    return out;
}

std::vector<SpeechSegment> closed_segments(const std::vector<SegmentEvent>& events) {
    std::vector<SpeechSegment> out;
    for (const auto& e : events) {
        if (e.kind == SegmentEventKind::close) out.push_back(SpeechSegment{e.speaker, e.start, *e.end});
    }
    return out;
}

}  // namespace sonartalk
