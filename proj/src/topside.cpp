#include "sonartalk/topside.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "json_fields.hpp"
#include "sonartalk/errors.hpp"
#include "sonartalk/serialize.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

// ---- queue ---------------------------------------------------------------

std::string journal_line(const ConversationMessage& msg, std::string_view sender) {
    // The message's canonical JSON with one extra "sender" key, kept sorted.
    std::string line = to_json_line(msg);
    const std::string key = ",\"speaker\":";
    const auto at = line.find(key);
    line.insert(at, ",\"sender\":" + json_quote(sender));
    return line;
}

MessageQueue::MessageQueue(std::filesystem::path journal) : journal_path_(std::move(journal)) {
    replay();
    journal_.open(*journal_path_, std::ios::binary | std::ios::app);
    if (!journal_) {
        throw JournalError("cannot open queue journal: " + journal_path_->string());
    }
}

void MessageQueue::replay() {
    std::ifstream in(*journal_path_, std::ios::binary);
    if (!in) return;  // fresh journal
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            std::string sender(default_sender);
            if (auto it = j.find("sender"); it != j.end()) sender = it->get<std::string>();
            auto stripped = j;
            stripped.erase("sender");
            ConversationMessage m = parse_message(stripped.dump());
            if (seen_.emplace(sender, m.msg_id).second) {
                items_.push_back(QueuedMessage{std::move(m), std::move(sender), TimeStamp{}});
            }
        } catch (const std::exception& e) {
            throw JournalError("queue journal line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    max_depth_ = items_.size();
}

QueuePosition MessageQueue::enqueue(const ConversationMessage& msg, TimeStamp now, std::string_view sender) {
    validate(msg);
    std::unique_lock lock(mu_);
    if (closed_) throw StreamError("enqueue on a closed queue");
    const auto key = std::make_pair(std::string(sender), msg.msg_id);
    if (seen_.contains(key)) {
        ++duplicates_;
        return QueuePosition{false, items_.size()};
    }
    if (journal_path_) {
        journal_ << journal_line(msg, sender) << '\n';
        journal_.flush();
        if (!journal_) {
            journal_.clear();
            throw JournalError("queue journal append failed: " + journal_path_->string());
        }
    }
    seen_.insert(key);
    items_.push_back(QueuedMessage{msg, std::string(sender), now});
    max_depth_ = std::max(max_depth_, items_.size());
    const QueuePosition pos{true, items_.size() - 1};
    lock.unlock();
    cv_.notify_one();
    return pos;
}

std::optional<QueuedMessage> MessageQueue::try_dequeue() {
    std::lock_guard lock(mu_);
    if (items_.empty()) return std::nullopt;
    QueuedMessage m = std::move(items_.front());
    items_.pop_front();
    return m;
}

std::optional<QueuedMessage> MessageQueue::wait_dequeue() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    QueuedMessage m = std::move(items_.front());
    items_.pop_front();
    return m;
}

void MessageQueue::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

std::size_t MessageQueue::size() const {
    std::lock_guard lock(mu_);
    return items_.size();
}

std::size_t MessageQueue::max_depth() const {
    std::lock_guard lock(mu_);
    return max_depth_;
}

std::size_t MessageQueue::duplicates() const {
    std::lock_guard lock(mu_);
    return duplicates_;
}

std::vector<QueuedMessage> MessageQueue::pending() const {
    std::lock_guard lock(mu_);
    return {items_.begin(), items_.end()};
}

// ---- synthesis stub ------------------------------------------------------

void SynthesisStubParams::validate() const {
    if (!(std::isfinite(speaking_rate_wps) && speaking_rate_wps > 0)) {
        throw ConfigError("synth.speaking-rate must be > 0");
    }
    if (tts_proc.micros() < 0) throw ConfigError("synth.tts-proc must be >= 0");
    if (!(std::isfinite(video_gen_alpha) && video_gen_alpha >= 0)) throw ConfigError("synth.video-alpha must be >= 0");
    if (video_gen_beta.micros() < 0) throw ConfigError("synth.video-beta must be >= 0");
}

std::string_view to_string(ChunkState s) {
    switch (s) {
        case ChunkState::pending: return "pending";
        case ChunkState::generated: return "generated";
        case ChunkState::playing: return "playing";
        case ChunkState::played: return "played";
        case ChunkState::idle_filler: return "idle_filler";
    }
    return "?";
}

namespace {

ChunkState parse_chunk_state(std::string_view s) {
    for (auto st : {ChunkState::pending, ChunkState::generated, ChunkState::playing, ChunkState::played,
                    ChunkState::idle_filler}) {
        if (to_string(st) == s) return st;
    }
    throw InputError("unknown chunk state: " + std::string(s));
}

}  // namespace

std::string to_json_line(const PlaybackChunk& c) {
    return CanonicalObject{}
        .string("unit_id", c.unit_id)
        .string("speaker", c.speaker.str())
        .duration("duration_s", c.duration)
        .time("t_dequeued", c.t_dequeued)
        .time("t_audio_ready", c.t_audio_ready)
        .time("t_generated", c.t_generated)
        .time("t_started", c.t_started)
        .time("t_ended", c.t_ended)
        .string("state", to_string(c.state))
        .string("text", c.text)
        .str();
}

PlaybackChunk parse_playback_chunk(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        return PlaybackChunk{detail::req_string(j, "unit_id"),
                             SpeakerId(detail::req_string(j, "speaker")),
                             detail::as_duration(detail::req(j, "duration_s"), "duration_s"),
                             detail::req_time(j, "t_dequeued"),
                             detail::req_time(j, "t_audio_ready"),
                             detail::req_time(j, "t_generated"),
                             detail::req_time(j, "t_started"),
                             detail::req_time(j, "t_ended"),
                             parse_chunk_state(detail::req_string(j, "state")),
                             detail::req_string(j, "text")};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("playback chunk: ") + e.what());
    }
}

std::size_t word_count(std::string_view text) { return text::split_ws(text).size(); }

PlaybackChunk synthesize(const ConversationMessage& msg, TimeStamp t_dequeue, const SynthesisStubParams& params,
                         std::string unit_id) {
    const std::size_t words = word_count(msg.text);
    if (words == 0) throw InputError("cannot synthesize empty text");
    const Duration duration =
        Duration::from_micros(std::llround(static_cast<double>(words) * 1e6 / params.speaking_rate_wps));
    const Duration video =
        Duration::from_micros(std::llround(params.video_gen_alpha * static_cast<double>(duration.micros()))) +
        params.video_gen_beta;

    PlaybackChunk c{std::move(unit_id), msg.speaker, duration, t_dequeue, {}, {}, {}, {}, ChunkState::generated,
                    msg.text};
    if (c.unit_id.empty()) c.unit_id = "msg-" + std::to_string(msg.msg_id);
    c.t_audio_ready = t_dequeue + params.tts_proc;
    c.t_generated = c.t_audio_ready + video;
    c.t_started = c.t_generated;
    c.t_ended = c.t_started + duration;
    return c;
}

// ---- playback ------------------------------------------------------------

void PlaybackConfig::validate() const {
    if (filler_length.micros() <= 0) throw ConfigError("playback.filler must be > 0");
    if (startup.micros() < 0) throw ConfigError("playback.startup must be >= 0");
}

ChunkState state_at(const PlaybackChunk& c, TimeStamp now) {
    if (c.state == ChunkState::idle_filler || c.state == ChunkState::pending) return c.state;
    if (now < c.t_started) return ChunkState::generated;
    if (now < c.t_ended) return ChunkState::playing;
    return ChunkState::played;
}

std::vector<PlaybackChunk> idle_filler(const SpeakerId& lane, TimeStamp from, TimeStamp to, Duration filler_length) {
    if (filler_length.micros() <= 0) throw InputError("filler length must be > 0");
    std::vector<PlaybackChunk> out;
    for (TimeStamp t = from; t < to;) {
        const TimeStamp end = std::min(to, t + filler_length);
        out.push_back(PlaybackChunk{"filler", lane, end - t, t, t, t, t, end, ChunkState::idle_filler, {}});
        t = end;
    }
    return out;
}

PlaybackScheduler::PlaybackScheduler(PlaybackConfig config) : config_(config) { config_.validate(); }

PlaybackChunk PlaybackScheduler::schedule(PlaybackChunk chunk, EventLog* log, TimeStamp media_end) {
    if (chunk.state != ChunkState::generated) throw InputError("only generated chunks can be scheduled");
    auto& lane = lanes_[chunk.speaker];
    TimeStamp start = chunk.t_generated + config_.startup;
    if (!lane.empty()) start = std::max(start, lane.back().t_ended);
    chunk.t_started = start;
    chunk.t_ended = start + chunk.duration;
    lane.push_back(chunk);
    if (log) {
        log->append({Component::video_started, EventKind::input, chunk.unit_id, media_end, chunk.t_generated});
        log->append({Component::video_started, EventKind::chunk_started, chunk.unit_id, media_end, chunk.t_started});
        log->append({Component::video_played, EventKind::input, chunk.unit_id, media_end, chunk.t_started});
        log->append({Component::video_played, EventKind::chunk_ended, chunk.unit_id, media_end, chunk.t_ended});
    }
    return chunk;
}

std::optional<TimeStamp> PlaybackScheduler::lane_end(const SpeakerId& lane) const {
    auto it = lanes_.find(lane);
    if (it == lanes_.end() || it->second.empty()) return std::nullopt;
    return it->second.back().t_ended;
}

const std::vector<PlaybackChunk>& PlaybackScheduler::chunks(const SpeakerId& lane) const {
    static const std::vector<PlaybackChunk> none;
    auto it = lanes_.find(lane);
    return it == lanes_.end() ? none : it->second;
}

std::vector<SpeakerId> PlaybackScheduler::lanes() const {
    std::vector<SpeakerId> out;
    for (const auto& [k, _] : lanes_) out.push_back(k);
    return out;
}

std::vector<PlaybackChunk> PlaybackScheduler::timeline(const SpeakerId& lane, TimeStamp from, TimeStamp to) const {
    std::vector<PlaybackChunk> out;
    TimeStamp cursor = from;
    for (const auto& c : chunks(lane)) {
        if (c.t_ended <= cursor) continue;
        if (c.t_started >= to) break;
        if (cursor < c.t_started) {
            auto fill = idle_filler(lane, cursor, c.t_started, config_.filler_length);
            out.insert(out.end(), fill.begin(), fill.end());
        }
        out.push_back(c);
        cursor = c.t_ended;
    }
    auto tail = idle_filler(lane, cursor, to, config_.filler_length);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

}  // namespace sonartalk
