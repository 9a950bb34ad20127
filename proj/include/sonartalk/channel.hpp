#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sonartalk/time.hpp"
#include "sonartalk/wire.hpp"

namespace sonartalk {

struct ChannelParams {
    double bandwidth_Bps = 100.0;
    // 3800 m of water at 1500 m/s, to the millisecond.
    Duration propagation = Duration::from_micros(2'533'000);
    double drop_prob = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

// Time to clock `bytes` onto a link of `bandwidth_Bps`, rounded to the microsecond.
Duration serialization_time(std::size_t bytes, double bandwidth_Bps);

struct SendOutcome {
    std::uint64_t seq = 0;  // send order, starting at 0
    TimeStamp serialization_start;
    std::optional<TimeStamp> delivered_at;  // empty when the frame was dropped
};

struct Delivery {
    std::uint64_t seq = 0;
    TimeStamp t_send;
    TimeStamp t_deliver;
    wire::Bytes frame;
};

// Discrete-event model of the acoustic link: one FIFO transmitter with finite
// bandwidth, constant propagation delay, and seeded random loss. A dropped
// frame still occupies the transmitter.
class AcousticChannel {
public:
    explicit AcousticChannel(ChannelParams params);

    // start = max(t_send, busy_until); delivery = start + len/bandwidth + propagation.
    // Throws StreamError if t_send is earlier than the previous send.
    SendOutcome send(std::span<const std::uint8_t> frame, TimeStamp t_send);

    // Removes and returns, in FIFO order, frames delivered at or before t.
    std::vector<Delivery> deliver_until(TimeStamp t);
    std::vector<Delivery> deliver_all();
    std::optional<TimeStamp> next_delivery() const;

    TimeStamp busy_until() const { return busy_until_; }
    std::size_t sent() const { return next_seq_; }
    std::size_t dropped() const { return dropped_; }
    const ChannelParams& params() const { return params_; }

private:
    ChannelParams params_;
    std::mt19937_64 rng_;
    TimeStamp busy_until_;
    std::optional<TimeStamp> last_send_;
    std::uint64_t next_seq_ = 0;
    std::size_t dropped_ = 0;
    std::deque<Delivery> in_flight_;
};

}  // namespace sonartalk
