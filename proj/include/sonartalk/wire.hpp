#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sonartalk/types.hpp"

namespace sonartalk::wire {

// Frame: magic "SNR1" | 4-byte big-endian payload length | payload.
// The payload is the canonical JSON of a ConversationMessage (sorted keys,
// time stamps with 6 fractional digits).
inline constexpr std::array<std::uint8_t, 4> magic{0x53, 0x4E, 0x52, 0x31};
inline constexpr std::size_t header_size = 8;
inline constexpr std::size_t max_payload = 65535;

using Bytes = std::vector<std::uint8_t>;

std::string encode_payload(const ConversationMessage& msg);

// Throws InputError for an invalid message and FrameTooLargeError when the
// payload exceeds max_payload bytes.
Bytes encode_frame(const ConversationMessage& msg);

struct DecodeStats {
    std::size_t skipped_bytes = 0;   // foreign traffic between frames
    std::size_t corrupt_frames = 0;  // well-framed but unparseable or non-canonical payloads
    std::size_t oversize_frames = 0; // length field above max_payload

    std::size_t resyncs() const { return corrupt_frames + oversize_frames; }
    DecodeStats& operator+=(const DecodeStats& o);
    bool operator==(const DecodeStats&) const = default;
};

struct DecodeResult {
    std::vector<ConversationMessage> messages;
    Bytes carry;  // bytes that may still begin a frame
    DecodeStats stats;
};

// Scans carry ++ bytes for frames. Non-frame bytes are skipped, incomplete
// frames are returned in `carry`, and corrupt frames are dropped and counted.
// A payload is accepted only if re-encoding the decoded message reproduces it
// byte for byte, so every returned message is one encode_frame produced.
DecodeResult decode_stream(std::span<const std::uint8_t> bytes, std::span<const std::uint8_t> carry = {});

// Stateful wrapper that keeps the carry between reads.
class FrameDecoder {
public:
    std::vector<ConversationMessage> feed(std::span<const std::uint8_t> bytes);
    const DecodeStats& stats() const { return stats_; }
    std::size_t pending_bytes() const { return carry_.size(); }

private:
    Bytes carry_;
    DecodeStats stats_;
};

}  // namespace sonartalk::wire
