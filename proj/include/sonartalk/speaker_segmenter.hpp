#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sonartalk/time.hpp"
#include "sonartalk/types.hpp"

namespace sonartalk {

struct FrameLabel {
    std::int64_t frame_index = 0;
    std::optional<SpeakerId> label;  // nullopt: background or silence
};

struct SegmenterConfig {
    double frame_rate_hz = 50.0;
    int window_frames = 25;
    int step_frames = 5;
    int start_threshold = 15;
    int end_threshold = 5;
    Duration min_segment = Duration::from_micros(300'000);
    Duration merge_gap = Duration::from_micros(200'000);

    // Throws ConfigError unless end_threshold < start_threshold <= window_frames,
    // step_frames <= window_frames and all values are in range.
    void validate() const;

    // Media-time at which frame `index` begins.
    TimeStamp frame_time(std::int64_t index) const;
};

// Per-frame speaker classification. Neural classifiers plug in here; the
// library ships the scripted implementation used by scenarios and tests.
class FrameClassifier {
public:
    virtual ~FrameClassifier() = default;
    virtual std::optional<SpeakerId> classify(std::int64_t frame_index) const = 0;
};

class ScriptedClassifier final : public FrameClassifier {
public:
    explicit ScriptedClassifier(std::vector<FrameLabel> labels);

    // JSONL of {"frame_index": n, "label": "speaker_1" | null}.
    static ScriptedClassifier load_jsonl(std::istream& in);

    std::optional<SpeakerId> classify(std::int64_t frame_index) const override;

    std::int64_t frame_count() const { return frame_count_; }
    const std::vector<FrameLabel>& labels() const { return labels_; }

private:
    std::vector<FrameLabel> labels_;
    std::map<std::int64_t, std::size_t> by_index_;
    std::int64_t frame_count_ = 0;
};

enum class SegmentEventKind { open, close };

// open: a segment is confirmed (it will survive the minimum-duration rule);
// `end` is empty. close: the segment is final; `end` is set.
struct SegmentEvent {
    SegmentEventKind kind;
    SpeakerId speaker;
    TimeStamp start;
    std::optional<TimeStamp> end;

    bool operator==(const SegmentEvent&) const = default;
};

// Streaming windowed speaker segmentation.
//
// Windows cover frames [j*step, j*step + W) and are evaluated once complete.
// Per speaker, a closed track opens at the first frame of a window holding at
// least start_threshold of that speaker's frames, and an open track closes at
// the end of the first later window holding fewer than end_threshold. Raw
// segments of one speaker separated by less than merge_gap are merged, and
// merged segments shorter than min_segment are dropped. Events are held back
// until those two rules can no longer change them, so the event stream does
// not depend on how frames are chunked across push_frames calls.
class SpeakerSegmenter {
public:
    explicit SpeakerSegmenter(SegmenterConfig config);

    // Frame indices must be strictly increasing across calls. Missing indices
    // count as background. Throws StreamError on misuse.
    std::vector<SegmentEvent> push_frames(std::span<const FrameLabel> labels);

    // Closes open segments at the end of the last seen frame and releases
    // every held-back segment. The segmenter accepts no frames afterwards.
    std::vector<SegmentEvent> flush();

    const SegmenterConfig& config() const { return config_; }

private:
    struct Track {
        bool raw_open = false;
        std::optional<TimeStamp> start;  // start of the segment being built
        std::optional<TimeStamp> end;    // set once the raw segment closed
        bool open_emitted = false;
    };

    void append_frame(std::optional<SpeakerId> label, std::vector<SegmentEvent>& out);
    void evaluate_window(std::vector<SegmentEvent>& out);
    void settle(const SpeakerId& speaker, Track& track, TimeStamp horizon, TimeStamp next_open,
                std::vector<SegmentEvent>& out);

    SegmenterConfig config_;
    std::deque<std::optional<SpeakerId>> frames_;  // frames from buffer_base_ on
    std::int64_t buffer_base_ = 0;
    std::int64_t next_index_ = 0;  // next dense frame index
    std::int64_t next_window_ = 0;
    std::map<SpeakerId, Track> tracks_;
    bool flushed_ = false;
};

// Closed segments in event order.
std::vector<SpeechSegment> closed_segments(const std::vector<SegmentEvent>& events);

}  // namespace sonartalk
