#include "sonartalk/channel.hpp"

#include <cmath>

#include "sonartalk/errors.hpp"

namespace sonartalk {

void ChannelParams::validate() const {
    if (!(std::isfinite(bandwidth_Bps) && bandwidth_Bps > 0)) throw ConfigError("chan.bandwidth must be > 0");
    if (propagation.micros() < 0) throw ConfigError("chan.prop-delay must be >= 0");
    if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) throw ConfigError("chan.drop must be in [0, 1]");
}

Duration serialization_time(std::size_t bytes, double bandwidth_Bps) {
    return Duration::from_micros(std::llround(static_cast<double>(bytes) * 1e6 / bandwidth_Bps));
}

AcousticChannel::AcousticChannel(ChannelParams params) : params_(params), rng_(params.rng_seed) {
    params_.validate();
}

SendOutcome AcousticChannel::send(std::span<const std::uint8_t> frame, TimeStamp t_send) {
    if (last_send_ && t_send < *last_send_) {
        throw StreamError("channel sends must be non-decreasing in time");
    }
    last_send_ = t_send;

    SendOutcome out;
    out.seq = next_seq_++;
    out.serialization_start = std::max(t_send, busy_until_);
    busy_until_ = out.serialization_start + serialization_time(frame.size(), params_.bandwidth_Bps);

    // One draw per frame, independent of drop_prob, so the loss pattern for a
    // seed is a fixed sequence. mt19937_64 output is fully specified, unlike
    // the standard distributions.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (u < params_.drop_prob) {
        ++dropped_;
        return out;
    }
    out.delivered_at = busy_until_ + params_.propagation;
    in_flight_.push_back(Delivery{out.seq, t_send, *out.delivered_at, wire::Bytes(frame.begin(), frame.end())});
    return out;
}

std::vector<Delivery> AcousticChannel::deliver_until(TimeStamp t) {
    std::vector<Delivery> out;
    while (!in_flight_.empty() && in_flight_.front().t_deliver <= t) {
        out.push_back(std::move(in_flight_.front()));
        in_flight_.pop_front();
    }
    return out;
}

std::vector<Delivery> AcousticChannel::deliver_all() {
    std::vector<Delivery> out(std::make_move_iterator(in_flight_.begin()), std::make_move_iterator(in_flight_.end()));
    in_flight_.clear();
    return out;
}

std::optional<TimeStamp> AcousticChannel::next_delivery() const {
    if (in_flight_.empty()) return std::nullopt;
    return in_flight_.front().t_deliver;
}

}  // namespace sonartalk
