#include "sonartalk/wire.hpp"

#include <algorithm>
#include <optional>
#include <string_view>

#include "sonartalk/errors.hpp"
#include "sonartalk/serialize.hpp"

namespace sonartalk::wire {

std::string encode_payload(const ConversationMessage& msg) {
    validate(msg);
    return to_json_line(msg);
}

Bytes encode_frame(const ConversationMessage& msg) {
    const std::string payload = encode_payload(msg);
    if (payload.size() > max_payload) {
        throw FrameTooLargeError("frame payload of " + std::to_string(payload.size()) + " bytes exceeds " +
                                 std::to_string(max_payload));
    }
    Bytes out;
    out.reserve(header_size + payload.size());
    out.insert(out.end(), magic.begin(), magic.end());
    const auto n = static_cast<std::uint32_t>(payload.size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

DecodeStats& DecodeStats::operator+=(const DecodeStats& o) {
    skipped_bytes += o.skipped_bytes;
    corrupt_frames += o.corrupt_frames;
    oversize_frames += o.oversize_frames;
    return *this;
}

namespace {

std::optional<ConversationMessage> decode_payload(std::string_view payload) {
    try {
        ConversationMessage m = parse_message(payload);
        if (encode_payload(m) != payload) return std::nullopt;
        return m;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

DecodeResult decode_stream(std::span<const std::uint8_t> bytes, std::span<const std::uint8_t> carry) {
    Bytes buf;
    buf.reserve(carry.size() + bytes.size());
    buf.insert(buf.end(), carry.begin(), carry.end());
    buf.insert(buf.end(), bytes.begin(), bytes.end());

    DecodeResult res;
    std::size_t pos = 0;
    while (pos < buf.size()) {
        auto hit = std::search(buf.begin() + static_cast<std::ptrdiff_t>(pos), buf.end(), magic.begin(), magic.end());
        const auto at = static_cast<std::size_t>(hit - buf.begin());
        if (hit == buf.end()) {
            // Keep a tail that could be the start of a split magic.
            std::size_t keep = 0;
            for (std::size_t k = std::min<std::size_t>(magic.size() - 1, buf.size() - pos); k > 0; --k) {
                if (std::equal(buf.end() - static_cast<std::ptrdiff_t>(k), buf.end(), magic.begin())) {
                    keep = k;
                    break;
                }
            }
            res.stats.skipped_bytes += buf.size() - pos - keep;
            pos = buf.size() - keep;
            break;
        }
        res.stats.skipped_bytes += at - pos;
        pos = at;
        if (buf.size() - pos < header_size) break;
        const std::uint32_t len = (std::uint32_t{buf[pos + 4]} << 24) | (std::uint32_t{buf[pos + 5]} << 16) |
                                  (std::uint32_t{buf[pos + 6]} << 8) | std::uint32_t{buf[pos + 7]};
        if (len > max_payload) {
            ++res.stats.oversize_frames;
            pos += 1;
            continue;
        }
        if (buf.size() - pos - header_size < len) break;
        const std::string_view payload(reinterpret_cast<const char*>(buf.data() + pos + header_size), len);
        if (auto m = decode_payload(payload)) {
            res.messages.push_back(std::move(*m));
            pos += header_size + len;
        } else {
            ++res.stats.corrupt_frames;
            pos += 1;
        }
    }
    res.carry.assign(buf.begin() + static_cast<std::ptrdiff_t>(pos), buf.end());
    return res;
}

std::vector<ConversationMessage> FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
    DecodeResult r = decode_stream(bytes, carry_);
    carry_ = std::move(r.carry);
    stats_ += r.stats;
    return std::move(r.messages);
}

}  // namespace sonartalk::wire
