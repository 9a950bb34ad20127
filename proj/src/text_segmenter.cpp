#include "sonartalk/text_segmenter.hpp"

#include <algorithm>

#include "sonartalk/errors.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

void TextSegConfig::validate() const {
    if (soft_len_chars > hard_len_chars) throw ConfigError("textseg.soft-len must be <= textseg.hard-len");
    if (hard_latency.micros() <= 0) throw ConfigError("textseg.hard-latency must be > 0");
    for (char32_t c : terminal_marks + nonterminal_marks) {
        if (text::is_space(c)) throw ConfigError("punctuation marks cannot be whitespace");
    }
}

TextSegmenter::TextSegmenter(TextSegConfig config) : config_(std::move(config)) { config_.validate(); }

std::vector<Utterance> TextSegmenter::push(std::string_view piece, const SpeakerId& speaker, TimeStamp media_start,
                                           TimeStamp media_end, TimeStamp wall_now, std::string unit_id) {
    const std::u32string decoded = text::decode_utf8(piece);
    const std::u32string_view body = text::trim(std::u32string_view(decoded));
    if (body.empty()) throw InputError("text piece is empty");
    if (media_end < media_start) throw InputError("text piece needs media_start <= media_end");

    std::vector<Utterance> out;
    if (config_.flush_on_speaker_change) {
        std::vector<std::pair<SpeakerId, Buffer*>> others;
        for (auto& [who, buf] : buffers_) {
            if (who != speaker && !buf.empty()) others.emplace_back(who, &buf);
        }
        release_in_age_order(std::move(others), EmitReason::speaker_change, out);
    }

    Buffer& buf = buffers_[speaker];
    if (!buf.text.empty()) buf.text.push_back(U' ');
    Piece p;
    p.begin = buf.text.size();
    buf.text.append(body);
    p.end = buf.text.size();
    p.media_start = media_start;
    p.media_end = media_end;
    p.arrival = wall_now;
    p.unit_id = std::move(unit_id);
    buf.pieces.push_back(std::move(p));

    apply_rules(speaker, buf, out);
    return out;
}

void TextSegmenter::apply_rules(const SpeakerId& speaker, Buffer& buf, std::vector<Utterance>& out) {
    const auto is_terminal = [&](char32_t c) { return config_.terminal_marks.find(c) != std::u32string::npos; };
    const auto is_nonterminal = [&](char32_t c) { return config_.nonterminal_marks.find(c) != std::u32string::npos; };

    while (!buf.empty()) {
        const auto& t = buf.text;
        auto term = std::find_if(t.begin(), t.end(), is_terminal);
        if (term != t.end()) {
            // A run such as "?!" or "..." ends one sentence.
            auto run_end = std::find_if_not(term, t.end(), is_terminal);
            cut(speaker, buf, static_cast<std::size_t>(run_end - t.begin()), EmitReason::terminal, out);
            continue;
        }
        if (t.size() > config_.soft_len_chars) {
            auto last = std::find_if(t.rbegin(), t.rend(), is_nonterminal);
            if (last != t.rend()) {
                cut(speaker, buf, static_cast<std::size_t>(t.rend() - last), EmitReason::soft_split, out);
                continue;
            }
        }
        if (t.size() > config_.hard_len_chars) {
            cut(speaker, buf, t.size(), EmitReason::hard_flush, out);
            continue;
        }
        break;
    }
}

void TextSegmenter::cut(const SpeakerId& speaker, Buffer& buf, std::size_t upto, EmitReason reason,
                        std::vector<Utterance>& out) {
    Utterance u{speaker, {}, {}, {}, reason, {}, {}};
    bool first = true;
    for (const auto& p : buf.pieces) {
        if (p.begin >= upto) break;
        if (first) {
            u.start = p.media_start;
            u.end = p.media_end;
            u.input_wall = p.arrival;
            first = false;
        } else {
            u.start = std::min(u.start, p.media_start);
            u.end = std::max(u.end, p.media_end);
            u.input_wall = std::max(u.input_wall, p.arrival);
        }
        if (!p.unit_id.empty() &&
            std::find(u.source_units.begin(), u.source_units.end(), p.unit_id) == u.source_units.end()) {
            u.source_units.push_back(p.unit_id);
        }
    }
    u.text = text::encode_utf8(text::trim(std::u32string_view(buf.text).substr(0, upto)));
    out.push_back(std::move(u));

    std::size_t shift = upto;
    while (shift < buf.text.size() && text::is_space(buf.text[shift])) ++shift;
    buf.text.erase(0, shift);
    std::vector<Piece> rest;
    for (auto& p : buf.pieces) {
        if (p.end <= shift) continue;
        p.begin = p.begin > shift ? p.begin - shift : 0;
        p.end -= shift;
        rest.push_back(std::move(p));
    }
    buf.pieces = std::move(rest);
    if (buf.pieces.empty()) buf.text.clear();
}

void TextSegmenter::release_in_age_order(std::vector<std::pair<SpeakerId, Buffer*>> ready, EmitReason reason,
                                         std::vector<Utterance>& out) {
    std::stable_sort(ready.begin(), ready.end(), [](const auto& a, const auto& b) {
        return a.second->oldest() < b.second->oldest();
    });
    for (auto& [speaker, buf] : ready) {
        cut(speaker, *buf, buf->text.size(), reason, out);
    }
}

std::vector<Utterance> TextSegmenter::tick(TimeStamp wall_now) {
    std::vector<std::pair<SpeakerId, Buffer*>> ready;
    for (auto& [speaker, buf] : buffers_) {
        if (!buf.empty() && wall_now - buf.oldest() > config_.hard_latency) ready.emplace_back(speaker, &buf);
    }
    std::vector<Utterance> out;
    release_in_age_order(std::move(ready), EmitReason::hard_flush, out);
    return out;
}

std::vector<Utterance> TextSegmenter::flush_all() {
    std::vector<std::pair<SpeakerId, Buffer*>> ready;
    for (auto& [speaker, buf] : buffers_) {
        if (!buf.empty()) ready.emplace_back(speaker, &buf);
    }
    std::vector<Utterance> out;
    release_in_age_order(std::move(ready), EmitReason::stream_end, out);
    return out;
}

bool TextSegmenter::empty() const {
    return std::all_of(buffers_.begin(), buffers_.end(), [](const auto& kv) { return kv.second.empty(); });
}

std::optional<TimeStamp> TextSegmenter::next_deadline() const {
    std::optional<TimeStamp> best;
    for (const auto& [_, buf] : buffers_) {
        if (buf.empty()) continue;
        const TimeStamp d = buf.oldest() + config_.hard_latency;
        if (!best || d < *best) best = d;
    }
    return best;
}

std::string TextSegmenter::buffered(const SpeakerId& speaker) const {
    auto it = buffers_.find(speaker);
    return it == buffers_.end() ? std::string{} : text::encode_utf8(it->second.text);
}

}  // namespace sonartalk
