#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sonartalk/time.hpp"
#include "sonartalk/types.hpp"

namespace sonartalk {

struct TextSegConfig {
    std::u32string terminal_marks = U".!?";
    std::u32string nonterminal_marks = U",;:";
    std::size_t soft_len_chars = 120;
    std::size_t hard_len_chars = 200;
    Duration hard_latency = Duration::from_micros(4'000'000);
    // When set, a piece from a new speaker first flushes every other
    // speaker's buffer with reason speaker_change.
    bool flush_on_speaker_change = false;

    void validate() const;
};

// Buffers stable ASR text per speaker and cuts it into Utterances.
//
// Pieces are joined with single spaces. After each push the buffer is cut,
// repeatedly, by the first applicable rule: (a) through the last terminal mark,
// one Utterance per sentence; (b) when longer than soft_len_chars, through the
// last non-terminal mark; (c) when longer than hard_len_chars, entirely. tick()
// releases buffers whose oldest content waited longer than hard_latency. Lengths
// count code points. Periods in abbreviations and numbers count as terminal.
class TextSegmenter {
public:
    explicit TextSegmenter(TextSegConfig config = {});

    // media_start/media_end: media span of the piece; wall_now: arrival time.
    // Throws InputError on an empty piece or media_end < media_start.
    std::vector<Utterance> push(std::string_view piece, const SpeakerId& speaker, TimeStamp media_start,
                                TimeStamp media_end, TimeStamp wall_now, std::string unit_id = {});

    std::vector<Utterance> tick(TimeStamp wall_now);

    std::vector<Utterance> flush_all();

    bool empty() const;
    // Earliest wall time at which tick() would release something.
    std::optional<TimeStamp> next_deadline() const;
    // Buffered text for one speaker (empty when none).
    std::string buffered(const SpeakerId& speaker) const;

    const TextSegConfig& config() const { return config_; }

private:
    struct Piece {
        std::size_t begin = 0;  // code-point offsets into Buffer::text
        std::size_t end = 0;
        TimeStamp media_start;
        TimeStamp media_end;
        TimeStamp arrival;
        std::string unit_id;
    };

    struct Buffer {
        std::u32string text;
        std::vector<Piece> pieces;
        bool empty() const { return pieces.empty(); }
        TimeStamp oldest() const { return pieces.front().arrival; }
    };

    void cut(const SpeakerId& speaker, Buffer& buf, std::size_t upto, EmitReason reason, std::vector<Utterance>& out);
    void apply_rules(const SpeakerId& speaker, Buffer& buf, std::vector<Utterance>& out);
    void release_in_age_order(std::vector<std::pair<SpeakerId, Buffer*>> ready, EmitReason reason,
                              std::vector<Utterance>& out);

    TextSegConfig config_;
    std::map<SpeakerId, Buffer> buffers_;
};

}  // namespace sonartalk
