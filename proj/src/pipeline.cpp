#include "sonartalk/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <variant>

#include "sonartalk/errors.hpp"
#include "sonartalk/serialize.hpp"
#include "sonartalk/speaker_segmenter.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

// ---- ASR -----------------------------------------------------------------

std::vector<AsrPiece> transcribe_segment(const SpeechSegment& segment, const std::vector<Hypothesis>& hypotheses,
                                         const StabilityConfig& stability, Duration decode_delay,
                                         const SegmentKnown& known, const std::string& unit_prefix,
                                         std::uint64_t& counter) {
    validate(segment);
    const std::int64_t c = stability.chunk_size.micros();
    const std::int64_t span = (segment.end - segment.start).micros();
    const auto chunks = static_cast<std::size_t>((span + c - 1) / c);
    if (hypotheses.size() != chunks) {
        throw InputError("segment of " + std::to_string(chunks) + " chunks got " +
                         std::to_string(hypotheses.size()) + " hypotheses");
    }
    const auto chunk_end = [&](std::int64_t i) {
        return std::min(segment.start + Duration::from_micros(i * c), segment.end);
    };

    StabilityFilter filter(stability);
    std::vector<AsrPiece> out;
    for (std::size_t i = 1; i <= chunks; ++i) {
        const bool last = i == chunks;
        const TimeStamp media = chunk_end(static_cast<std::int64_t>(i));
        const TimeStamp wall = std::max(media, last ? known.close : known.open) + decode_delay;

        StableUpdate up = filter.new_hypothesis(hypotheses[i - 1]);
        if (last) {
            StableUpdate rest = filter.finalize();
            up.newly_stable.insert(up.newly_stable.end(), rest.newly_stable.begin(), rest.newly_stable.end());
            up.first_chunk.insert(up.first_chunk.end(), rest.first_chunk.begin(), rest.first_chunk.end());
        }
        if (up.empty()) continue;

        const auto [lo, hi] = std::minmax_element(up.first_chunk.begin(), up.first_chunk.end());
        out.push_back(AsrPiece{segment.speaker, text::join(up.newly_stable, " "), chunk_end(*lo - 1), chunk_end(*hi),
                               wall, unit_prefix + std::to_string(counter++)});
    }
    return out;
}

// ---- submersible ---------------------------------------------------------

std::shared_ptr<const TopicClassifier> make_classifier(const Config& config) {
    auto embedder = std::make_shared<HashingEmbedder>(config.classifier_dim);
    std::vector<ClusterPrototype> protos;
    if (config.classifier_prototypes.empty()) {
        protos = default_prototypes(*embedder);
    } else {
        std::ifstream in(config.classifier_prototypes);
        if (!in) throw ConfigError("cannot read classifier.prototypes: " + config.classifier_prototypes.string());
        protos = load_prototypes(in, *embedder);
    }
    return std::make_shared<TopicClassifier>(std::move(embedder), PrototypeIndex::build(std::move(protos)));
}

std::string message_unit_id(std::string_view sender, std::uint64_t msg_id) {
    std::string id = "msg-" + std::to_string(msg_id);
    if (sender != default_sender) id = std::string(sender) + "/" + id;
    return id;
}

SubmersibleNode::SubmersibleNode(const Config& config, std::vector<RosterEntry> roster,
                                 std::shared_ptr<EventLog> log, std::shared_ptr<const TopicClassifier> classifier)
    : config_(config),
      roster_(std::move(roster)),
      log_(std::move(log)),
      classifier_(classifier ? std::move(classifier) : make_classifier(config)),
      segmenter_(config.textseg) {
    config_.validate();
}

std::optional<TimeStamp> SubmersibleNode::next_tick() const {
    const auto deadline = segmenter_.next_deadline();
    if (!deadline) return std::nullopt;
    // First tick strictly after the deadline; ticks sit on multiples of the period.
    const std::int64_t p = config_.textseg_tick.micros();
    return TimeStamp::from_micros((deadline->micros() / p + 1) * p);
}

void SubmersibleNode::move_to(TimeStamp t) {
    if (t < now_) throw StreamError("submersible node time moved backwards: " + t.str() + " < " + now_.str());
    now_ = t;
}

void SubmersibleNode::emit(std::vector<Utterance> utts, TimeStamp wall, std::vector<OutgoingMessage>& out) {
    for (auto& u : utts) {
        ConversationMessage m{protocol_version, next_msg_id_++, u.speaker, u.start, u.end, std::move(u.text), {}};
        m.category = classifier_->classify(m.text).label;
        const auto unit = message_unit_id(default_sender, m.msg_id);
        if (log_) {
            log_->append({Component::text_segmentation, EventKind::input, unit, m.end, u.input_wall});
            log_->append({Component::text_segmentation, EventKind::output, unit, m.end, wall});
        }
        out.push_back(OutgoingMessage{std::move(m), wall, u.emit_reason});
    }
}

std::vector<OutgoingMessage> SubmersibleNode::advance(TimeStamp now) {
    std::vector<OutgoingMessage> out;
    while (const auto t = next_tick()) {
        if (now < *t) break;
        move_to(*t);
        emit(segmenter_.tick(*t), *t, out);
    }
    move_to(now);
    return out;
}

std::vector<OutgoingMessage> SubmersibleNode::drain() {
    std::vector<OutgoingMessage> out;
    while (const auto t = next_tick()) {
        move_to(*t);
        emit(segmenter_.tick(*t), *t, out);
    }
    return out;
}

std::vector<OutgoingMessage> SubmersibleNode::flush(TimeStamp now) {
    auto out = advance(now);
    emit(segmenter_.flush_all(), now, out);
    return out;
}

std::vector<OutgoingMessage> SubmersibleNode::push(const AsrPiece& piece) {
    auto out = advance(piece.wall);
    const bool enabled = std::any_of(roster_.begin(), roster_.end(),
                                     [&](const RosterEntry& e) { return e.id == piece.speaker && e.enabled; });
    if (!enabled) return out;
    emit(segmenter_.push(piece.text, piece.speaker, piece.media_start, piece.media_end, piece.wall, piece.unit_id),
         piece.wall, out);
    return out;
}

std::vector<OutgoingMessage> SubmersibleNode::compose(const SpeakerId& speaker, std::string_view text_in,
                                                      TimeStamp now) {
    if (std::none_of(roster_.begin(), roster_.end(), [&](const RosterEntry& e) { return e.id == speaker; })) {
        throw InputError("speaker '" + speaker.str() + "' is not in the roster");
    }
    std::string t = text::normalize_ws(text_in);
    if (t.empty()) throw InputError("composed text is empty");
    const auto& marks = config_.textseg.terminal_marks;
    const std::u32string u = text::decode_utf8(t);
    if (!marks.empty() && marks.find(u.back()) == std::u32string::npos) t += text::encode_utf8(marks.substr(0, 1));
    const auto n = compose_count_[speaker]++;
    return push(AsrPiece{speaker, std::move(t), now, now, now, "compose:" + speaker.str() + ":" + std::to_string(n)});
}

// ---- topside -------------------------------------------------------------

std::string to_json(const ReceivedMessage& m) {
    return CanonicalObject{}
        .integer("seq", static_cast<std::int64_t>(m.seq))
        .time("received", m.received)
        .string("sender", m.sender)
        .raw("message", to_json_line(m.message))
        .str();
}

std::string to_json(const LaneEvent& e) {
    return CanonicalObject{}
        .integer("seq", static_cast<std::int64_t>(e.seq))
        .string("event", to_string(e.kind))
        .string("unit_id", e.unit_id)
        .string("speaker", e.speaker.str())
        .time("wall", e.wall)
        .duration("duration_s", e.duration)
        .string("text", e.text)
        .str();
}

TopsideNode::TopsideNode(const Config& config, std::shared_ptr<EventLog> log)
    : config_(config),
      log_(std::move(log)),
      queue_(config.queue_journal.empty() ? MessageQueue() : MessageQueue(config.queue_journal)),
      scheduler_(config.playback) {
    config_.validate();
}

std::vector<ConversationMessage> TopsideNode::on_bytes(std::span<const std::uint8_t> bytes, TimeStamp now,
                                                       std::string_view sender) {
    std::lock_guard lock(mu_);
    std::vector<ConversationMessage> accepted;
    for (auto& m : decoders_[std::string(sender)].feed(bytes)) {
        const auto unit = message_unit_id(sender, m.msg_id);
        if (log_) log_->append({Component::channel, EventKind::output, unit, m.end, now});
        if (!queue_.enqueue(m, now, sender).accepted) continue;
        if (log_) log_->append({Component::queue, EventKind::input, unit, m.end, now});
        received_.push_back(ReceivedMessage{received_.size() + 1, now, std::string(sender), m});
        accepted.push_back(std::move(m));
    }
    return accepted;
}

PlaybackChunk TopsideNode::play(const QueuedMessage& qm, TimeStamp now) {
    const auto& m = qm.message;
    const auto unit = message_unit_id(qm.sender, m.msg_id);
    std::lock_guard lock(mu_);
    if (log_) log_->append({Component::queue, EventKind::output, unit, m.end, now});
    PlaybackChunk chunk = synthesize(m, now, config_.synth, unit);
    if (log_) {
        log_->append({Component::tts, EventKind::input, unit, m.end, now});
        log_->append({Component::tts, EventKind::output, unit, m.end, chunk.t_audio_ready});
        log_->append({Component::video_generated, EventKind::input, unit, m.end, chunk.t_audio_ready});
        log_->append({Component::video_generated, EventKind::chunk_generated, unit, m.end, chunk.t_generated});
    }
    chunk = scheduler_.schedule(std::move(chunk), log_.get(), m.end);
    for (auto kind : {EventKind::chunk_started, EventKind::chunk_ended}) {
        lane_events_.push_back(LaneEvent{lane_events_.size() + 1, kind, chunk.unit_id, chunk.speaker,
                                         kind == EventKind::chunk_started ? chunk.t_started : chunk.t_ended,
                                         chunk.duration, chunk.text});
    }
    return chunk;
}

std::vector<PlaybackChunk> TopsideNode::drain(TimeStamp now) {
    std::vector<PlaybackChunk> out;
    while (auto qm = queue_.try_dequeue()) out.push_back(play(*qm, now));
    return out;
}

std::optional<PlaybackChunk> TopsideNode::process_next(const Clock& clock) {
    auto qm = queue_.wait_dequeue();
    if (!qm) return std::nullopt;
    return play(*qm, clock.now());
}

void TopsideNode::close() { queue_.close(); }

std::vector<ReceivedMessage> TopsideNode::messages_since(std::uint64_t seq) const {
    std::lock_guard lock(mu_);
    if (seq >= received_.size()) return {};
    return {received_.begin() + static_cast<std::ptrdiff_t>(seq), received_.end()};
}

std::vector<LaneEvent> TopsideNode::lane_events_since(std::uint64_t seq) const {
    std::lock_guard lock(mu_);
    if (seq >= lane_events_.size()) return {};
    return {lane_events_.begin() + static_cast<std::ptrdiff_t>(seq), lane_events_.end()};
}

std::vector<PlaybackChunk> TopsideNode::chunks(const SpeakerId& lane) const {
    std::lock_guard lock(mu_);
    return scheduler_.chunks(lane);
}

std::vector<PlaybackChunk> TopsideNode::timeline(const SpeakerId& lane, TimeStamp from, TimeStamp to) const {
    std::lock_guard lock(mu_);
    return scheduler_.timeline(lane, from, to);
}

std::vector<SpeakerId> TopsideNode::lanes() const {
    std::lock_guard lock(mu_);
    return scheduler_.lanes();
}

wire::DecodeStats TopsideNode::decode_stats() const {
    std::lock_guard lock(mu_);
    wire::DecodeStats total;
    for (const auto& [_, d] : decoders_) total += d.stats();
    return total;
}

// ---- simulation ----------------------------------------------------------

std::map<SpeakerId, std::vector<std::string>> SimulationResult::sent_text() const {
    std::map<SpeakerId, std::vector<std::string>> out;
    for (const auto& m : sent) out[m.message.speaker].push_back(m.message.text);
    return out;
}

std::map<SpeakerId, std::vector<std::string>> SimulationResult::played_text() const {
    std::map<SpeakerId, std::vector<std::string>> out;
    for (const auto& [lane, chunks] : playback) {
        for (const auto& c : chunks) {
            if (c.state != ChunkState::idle_filler) out[lane].push_back(c.text);
        }
    }
    return out;
}

namespace {

int chunk_count(const SpeechSegment& s, Duration chunk) {
    const std::int64_t span = (s.end - s.start).micros();
    return static_cast<int>((span + chunk.micros() - 1) / chunk.micros());
}

void transcribe_scripted(const SpeechSegment& seg, const DecoderScript& script, const SegmentKnown& known,
                         const Config& config, std::map<SpeakerId, std::uint64_t>& counters,
                         std::vector<SubInput>& inputs) {
    try {
        const auto hyps = script.for_chunks(chunk_count(seg, config.stability.chunk_size));
        for (auto& p : transcribe_segment(seg, hyps, config.stability, config.asr_decode_delay, known,
                                          "asr:" + seg.speaker.str() + ":", counters[seg.speaker])) {
            inputs.push_back(SubInput{p.wall, std::move(p)});
        }
    } catch (const DecoderContractError& e) {
        throw ScenarioError("decoder script for " + seg.speaker.str() + " segment at " + seg.start.str() + ": " +
                            e.what());
    }
}

void segment_frames(const ScenarioStream& st, const Config& config, std::map<SpeakerId, std::uint64_t>& counters,
                    std::vector<SubInput>& inputs) {
    SpeakerSegmenter segmenter(config.segmenter);
    std::map<std::pair<SpeakerId, TimeStamp>, TimeStamp> opened;
    std::vector<std::pair<SpeechSegment, SegmentKnown>> closed;
    const auto take = [&](const std::vector<SegmentEvent>& events, TimeStamp known_at) {
        for (const auto& e : events) {
            if (e.kind == SegmentEventKind::open) {
                opened.emplace(std::make_pair(e.speaker, e.start), known_at);
            } else {
                const auto it = opened.find({e.speaker, e.start});
                const TimeStamp open_at = it == opened.end() ? known_at : it->second;
                closed.push_back({SpeechSegment{e.speaker, e.start, *e.end}, SegmentKnown{open_at, known_at}});
            }
        }
    };
    std::int64_t last = -1;
    for (const auto& f : st.frames) {
        take(segmenter.push_frames(std::span(&f, 1)), config.segmenter.frame_time(f.frame_index + 1));
        last = f.frame_index;
    }
    take(segmenter.flush(), config.segmenter.frame_time(last + 1));

    std::map<SpeakerId, std::size_t> nth;
    for (const auto& [seg, known] : closed) {
        const std::size_t k = nth[seg.speaker]++;
        const auto it = st.frame_scripts.find(seg.speaker);
        if (it == st.frame_scripts.end() || k >= it->second.size()) {
            throw ScenarioError("frames stream: no decoder script for segment " + std::to_string(k + 1) + " of " +
                                seg.speaker.str() + " [" + seg.start.str() + ", " + seg.end.str() + ")");
        }
        transcribe_scripted(seg, it->second[k], known, config, counters, inputs);
    }
    for (const auto& [speaker, scripts] : st.frame_scripts) {
        if (scripts.size() != nth[speaker]) {
            throw ScenarioError("frames stream: " + speaker.str() + " has " + std::to_string(scripts.size()) +
                                " decoder scripts but " + std::to_string(nth[speaker]) + " segments");
        }
    }
}

}  // namespace

std::vector<SubInput> scenario_inputs(const Scenario& scenario, const Config& config) {
    std::vector<SubInput> inputs;
    std::map<SpeakerId, std::uint64_t> counters;
    for (const auto& st : scenario.streams) {
        switch (st.kind) {
            case StreamKind::segments:
                for (const auto& s : st.segments) {
                    transcribe_scripted(s.segment, s.decoder, SegmentKnown{s.segment.start, s.segment.end}, config,
                                        counters, inputs);
                }
                break;
            case StreamKind::frames:
                segment_frames(st, config, counters, inputs);
                break;
            case StreamKind::messages:
                for (const auto& m : st.messages) inputs.push_back(SubInput{m.at, ComposedText{*st.speaker, m.text}});
                break;
        }
    }
    std::stable_sort(inputs.begin(), inputs.end(),
                     [](const SubInput& a, const SubInput& b) { return a.wall < b.wall; });
    return inputs;
}

SimulationResult run_simulate(const Scenario& scenario, const Config& base) {
    if (scenario.clock != ClockMode::simulated) throw ScenarioError("simulate needs a simulated clock");
    SessionContext session = new_session(scenario.apply(base));
    auto log = session.log;
    const auto inputs = scenario_inputs(scenario, session.config);

    SimulationResult result;
    SubmersibleNode sub(session.config, session.roster, log);
    const auto keep = [&](std::vector<OutgoingMessage> msgs) {
        for (auto& m : msgs) result.sent.push_back(std::move(m));
    };
    for (const auto& in : inputs) {
        if (const auto* piece = std::get_if<AsrPiece>(&in.what)) {
            if (session.enabled(piece->speaker)) log->append({Component::asr, EventKind::output, piece->unit_id, piece->media_end, piece->wall});
            keep(sub.push(*piece));
        } else {
            const auto& c = std::get<ComposedText>(in.what);
            keep(sub.compose(c.speaker, c.text, in.wall));
        }
    }
    keep(sub.drain());

    AcousticChannel channel(session.config.channel);
    for (const auto& out : result.sent) {
        const auto& m = out.message;
        log->append({Component::channel, EventKind::input, message_unit_id(default_sender, m.msg_id), m.end, out.wall});
        if (!channel.send(wire::encode_frame(m), out.wall).delivered_at) result.lost_msg_ids.push_back(m.msg_id);
    }

    TopsideNode top(session.config, log);
    std::mt19937_64 noise_rng(scenario.noise.seed);
    for (const auto& d : channel.deliver_all()) {
        wire::Bytes bytes;
        for (std::size_t i = 0; i < scenario.noise.bytes_per_frame; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(noise_rng() & 0xff));
        }
        bytes.insert(bytes.end(), d.frame.begin(), d.frame.end());
        top.on_bytes(bytes, d.t_deliver);
        top.drain(d.t_deliver);
    }

    log->sort_by_wall();
    result.events = log->snapshot();
    result.end_wall = result.events.empty() ? TimeStamp{} : result.events.back().wall;
    for (const auto& r : session.roster) result.playback[r.id] = top.timeline(r.id, TimeStamp{}, result.end_wall);
    result.received = top.messages_since(0);
    result.decode_stats = top.decode_stats();
    result.max_queue_depth = top.max_queue_depth();
    result.report = report(result.events);
    return result;
}

}  // namespace sonartalk
