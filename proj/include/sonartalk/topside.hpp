#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sonartalk/event_log.hpp"
#include "sonartalk/time.hpp"
#include "sonartalk/types.hpp"

namespace sonartalk {

inline constexpr std::string_view default_sender = "sub";

struct QueuedMessage {
    ConversationMessage message;
    std::string sender;
    TimeStamp enqueued_at;
};

struct QueuePosition {
    bool accepted = false;     // false for a duplicate (sender, msg_id)
    std::size_t position = 0;  // 0-based index among waiting messages
};

// FIFO of received messages with an optional append-only JSONL journal.
// Duplicate (sender, msg_id) pairs are ignored. Opening an existing journal
// replays it, so a restarted topside sees the same queue. enqueue is safe to
// call from a network thread while one consumer dequeues.
class MessageQueue {
public:
    MessageQueue() = default;
    explicit MessageQueue(std::filesystem::path journal);

    // Throws JournalError when the journal append fails; the queue is
    // unchanged in that case.
    QueuePosition enqueue(const ConversationMessage& msg, TimeStamp now = {},
                          std::string_view sender = default_sender);

    std::optional<QueuedMessage> try_dequeue();
    // Blocks until a message arrives or close() is called.
    std::optional<QueuedMessage> wait_dequeue();
    void close();

    std::size_t size() const;
    std::size_t max_depth() const;
    std::size_t duplicates() const;
    // Waiting messages, front first.
    std::vector<QueuedMessage> pending() const;

private:
    void replay();

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<QueuedMessage> items_;
    std::set<std::pair<std::string, std::uint64_t>> seen_;
    std::optional<std::filesystem::path> journal_path_;
    std::ofstream journal_;
    std::size_t max_depth_ = 0;
    std::size_t duplicates_ = 0;
    bool closed_ = false;
};

std::string journal_line(const ConversationMessage& msg, std::string_view sender);

struct SynthesisStubParams {
    double speaking_rate_wps = 2.5;
    Duration tts_proc = Duration::from_micros(60'000);
    double video_gen_alpha = 0.25;
    Duration video_gen_beta = Duration::from_micros(200'000);

    void validate() const;
};

enum class ChunkState { pending, generated, playing, played, idle_filler };

std::string_view to_string(ChunkState s);

// One synthesized (or filler) clip on a speaker's playback lane. All times are wall-time.
struct PlaybackChunk {
    std::string unit_id;
    SpeakerId speaker;
    Duration duration;
    TimeStamp t_dequeued;
    TimeStamp t_audio_ready;
    TimeStamp t_generated;
    TimeStamp t_started;
    TimeStamp t_ended;
    ChunkState state = ChunkState::pending;
    std::string text;

    bool operator==(const PlaybackChunk&) const = default;
};

std::string to_json_line(const PlaybackChunk& c);
PlaybackChunk parse_playback_chunk(std::string_view line);

std::size_t word_count(std::string_view text);

// Timing stand-in for TTS and talking-face generation:
// duration = words / rate, audio ready after tts_proc, video generated after
// a further alpha * duration + beta.
PlaybackChunk synthesize(const ConversationMessage& msg, TimeStamp t_dequeue, const SynthesisStubParams& params,
                         std::string unit_id = {});

struct PlaybackConfig {
    Duration filler_length = Duration::from_micros(2'000'000);
    // Player start-up delay added after generation. Zero reproduces the plain
    // rule start = max(generated, previous end).
    Duration startup = Duration{};

    void validate() const;
};

// Playback state of a scheduled chunk at wall-time `now`.
ChunkState state_at(const PlaybackChunk& c, TimeStamp now);

// Silent filler clips tiling [from, to) in filler_length pieces, the last one
// truncated. Empty when from >= to.
std::vector<PlaybackChunk> idle_filler(const SpeakerId& lane, TimeStamp from, TimeStamp to, Duration filler_length);

// Non-overlapping per-speaker playback lanes. A chunk starts when it is
// generated and the lane's previous chunk has finished.
class PlaybackScheduler {
public:
    explicit PlaybackScheduler(PlaybackConfig config = {});

    // Requires state generated. Appends chunk_started/chunk_ended events
    // (video_started and video_played components) when `log` is given.
    PlaybackChunk schedule(PlaybackChunk chunk, EventLog* log = nullptr, TimeStamp media_end = {});

    std::optional<TimeStamp> lane_end(const SpeakerId& lane) const;
    const std::vector<PlaybackChunk>& chunks(const SpeakerId& lane) const;
    std::vector<SpeakerId> lanes() const;

    // Real chunks plus fillers covering [from, to) without gaps or overlaps.
    std::vector<PlaybackChunk> timeline(const SpeakerId& lane, TimeStamp from, TimeStamp to) const;

    const PlaybackConfig& config() const { return config_; }

private:
    PlaybackConfig config_;
    std::map<SpeakerId, std::vector<PlaybackChunk>> lanes_;
};

}  // namespace sonartalk
