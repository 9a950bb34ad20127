#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sonartalk/channel.hpp"
#include "sonartalk/config.hpp"
#include "sonartalk/event_log.hpp"
#include "sonartalk/latency.hpp"
#include "sonartalk/scenario.hpp"
#include "sonartalk/session.hpp"
#include "sonartalk/text_segmenter.hpp"
#include "sonartalk/topic_classifier.hpp"
#include "sonartalk/topside.hpp"
#include "sonartalk/wire.hpp"

namespace sonartalk {

// Newly stable ASR text of one segment. Media times are source positions,
// wall is when the decoder produced it.
struct AsrPiece {
    SpeakerId speaker;
    std::string text;
    TimeStamp media_start;
    TimeStamp media_end;
    TimeStamp wall;
    std::string unit_id;
};

// Media-times at which the speaker segmenter confirmed a segment's start and
// its end. Segments given directly are known as they happen.
struct SegmentKnown {
    TimeStamp open;
    TimeStamp close;
};

// Runs one segment through the stability filter, chunk by chunk. Chunk i
// covers media up to min(start + i*C, end) and is decoded decode_delay after
// that media (and the segmenter's confirmation) is available; its newly
// stable tokens form one piece. Unit ids are "<unit_prefix><n>", n counting
// from *counter.
std::vector<AsrPiece> transcribe_segment(const SpeechSegment& segment, const std::vector<Hypothesis>& hypotheses,
                                         const StabilityConfig& stability, Duration decode_delay,
                                         const SegmentKnown& known, const std::string& unit_prefix,
                                         std::uint64_t& counter);

struct OutgoingMessage {
    ConversationMessage message;
    TimeStamp wall;  // emission wall-time
    EmitReason reason = EmitReason::terminal;
};

// Submersible node after ASR: text segmentation on a tick grid, topic
// classification and message numbering. Logs text_segmentation events.
// Not thread-safe; callers serialize access.
class SubmersibleNode {
public:
    SubmersibleNode(const Config& config, std::vector<RosterEntry> roster, std::shared_ptr<EventLog> log,
                    std::shared_ptr<const TopicClassifier> classifier = nullptr);

    // Pieces must arrive in non-decreasing wall order. Ticks due before the
    // piece run first. Pieces of disabled speakers are ignored.
    std::vector<OutgoingMessage> push(const AsrPiece& piece);

    // Direct text entry: enters text segmentation as one terminal-punctuated
    // piece with an empty media span at `now`.
    std::vector<OutgoingMessage> compose(const SpeakerId& speaker, std::string_view text, TimeStamp now);

    // Runs every tick up to and including `now`.
    std::vector<OutgoingMessage> advance(TimeStamp now);

    // Ticks until every buffer is released. Returns the messages and leaves
    // the node's time at the last tick.
    std::vector<OutgoingMessage> drain();

    // Releases every buffer at `now` (reason stream_end).
    std::vector<OutgoingMessage> flush(TimeStamp now);

    TimeStamp now() const { return now_; }
    std::uint64_t messages_sent() const { return next_msg_id_ - 1; }
    bool idle() const { return segmenter_.empty(); }
    const std::vector<RosterEntry>& roster() const { return roster_; }

private:
    std::optional<TimeStamp> next_tick() const;
    void move_to(TimeStamp t);
    void emit(std::vector<Utterance> utts, TimeStamp wall, std::vector<OutgoingMessage>& out);

    Config config_;
    std::vector<RosterEntry> roster_;
    std::shared_ptr<EventLog> log_;
    std::shared_ptr<const TopicClassifier> classifier_;
    TextSegmenter segmenter_;
    TimeStamp now_;
    std::uint64_t next_msg_id_ = 1;
    std::map<SpeakerId, std::uint64_t> compose_count_;
};

// Classifier configured by classifier.dim and classifier.prototypes.
std::shared_ptr<const TopicClassifier> make_classifier(const Config& config);

// Accepted message as the console shows it.
struct ReceivedMessage {
    std::uint64_t seq = 0;  // 1-based arrival order
    TimeStamp received;
    std::string sender;
    ConversationMessage message;
};

// Playback state change on a lane, for the console timeline.
struct LaneEvent {
    std::uint64_t seq = 0;  // 1-based
    EventKind kind = EventKind::chunk_started;  // chunk_started or chunk_ended
    std::string unit_id;
    SpeakerId speaker;
    TimeStamp wall;
    Duration duration;
    std::string text;
};

std::string to_json(const ReceivedMessage& m);
std::string to_json(const LaneEvent& e);

// Unit id correlating one message across stages.
std::string message_unit_id(std::string_view sender, std::uint64_t msg_id);

// Topside node: demultiplexes link bytes into messages, queues them, and
// turns each dequeued message into a scheduled playback chunk. Logs channel
// output, queue, tts, video_generated and playback events. Thread-safe.
class TopsideNode {
public:
    TopsideNode(const Config& config, std::shared_ptr<EventLog> log);

    // Bytes read from the link at wall `now`. Returns newly accepted messages.
    std::vector<ConversationMessage> on_bytes(std::span<const std::uint8_t> bytes, TimeStamp now,
                                              std::string_view sender = default_sender);

    // Dequeues and plays every waiting message at `now`.
    std::vector<PlaybackChunk> drain(TimeStamp now);

    // Blocks for the next message; plays it at clock.now(). Empty once the
    // queue is closed and empty.
    std::optional<PlaybackChunk> process_next(const Clock& clock);
    void close();

    std::vector<ReceivedMessage> messages_since(std::uint64_t seq) const;
    std::vector<LaneEvent> lane_events_since(std::uint64_t seq) const;
    // Played messages per lane, in playback order.
    std::vector<PlaybackChunk> chunks(const SpeakerId& lane) const;
    std::vector<PlaybackChunk> timeline(const SpeakerId& lane, TimeStamp from, TimeStamp to) const;
    std::vector<SpeakerId> lanes() const;

    wire::DecodeStats decode_stats() const;
    std::size_t queue_depth() const { return queue_.size(); }
    std::size_t max_queue_depth() const { return queue_.max_depth(); }
    std::size_t duplicates() const { return queue_.duplicates(); }

private:
    PlaybackChunk play(const QueuedMessage& qm, TimeStamp now);

    Config config_;
    std::shared_ptr<EventLog> log_;
    MessageQueue queue_;
    mutable std::mutex mu_;
    std::map<std::string, wire::FrameDecoder> decoders_;  // per sender
    PlaybackScheduler scheduler_;
    std::vector<ReceivedMessage> received_;
    std::vector<LaneEvent> lane_events_;
};

struct ComposedText {
    SpeakerId speaker;
    std::string text;
};

// One timed input of the submersible node: decoder output or direct text.
struct SubInput {
    TimeStamp wall;
    std::variant<AsrPiece, ComposedText> what;
};

// Segments the scenario's streams, runs the scripted decoders and returns the
// submersible node's inputs in wall order. Throws ScenarioError.
std::vector<SubInput> scenario_inputs(const Scenario& scenario, const Config& config);

struct SimulationResult {
    std::vector<TimelineEvent> events;  // sorted by wall
    LatencyReport report;
    std::vector<OutgoingMessage> sent;         // in emission order
    std::vector<ReceivedMessage> received;     // in arrival order
    std::map<SpeakerId, std::vector<PlaybackChunk>> playback;  // per lane, fillers included
    std::vector<std::uint64_t> lost_msg_ids;
    wire::DecodeStats decode_stats;
    std::size_t max_queue_depth = 0;
    TimeStamp end_wall;

    // Text per speaker in order, as sent and as played.
    std::map<SpeakerId, std::vector<std::string>> sent_text() const;
    std::map<SpeakerId, std::vector<std::string>> played_text() const;
};

// Both nodes in one process over the channel emulator, on a simulated clock
// starting at 0 with media-time 0 at wall 0. A pure function of its inputs.
SimulationResult run_simulate(const Scenario& scenario, const Config& base = {});

}  // namespace sonartalk
