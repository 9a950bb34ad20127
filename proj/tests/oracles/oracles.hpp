#pragma once

// Brute-force reference implementations. They share no code with the library
// beyond its public value types, and favour literal readability over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

// ---- speaker segmentation -------------------------------------------------

struct Seg {
    std::string speaker;
    std::int64_t start_us = 0;
    std::int64_t end_us = 0;
    bool operator==(const Seg&) const = default;
    auto operator<=>(const Seg&) const = default;
};

struct SegParams {
    double rate = 50.0;
    int window = 25;
    int step = 5;
    int start_thr = 15;
    int end_thr = 5;
    std::int64_t min_segment_us = 300'000;
    std::int64_t merge_gap_us = 200'000;
};

inline std::int64_t frame_us(std::int64_t i, double rate) {
    return std::llround(static_cast<double>(i) * 1e6 / rate);
}

// labels[i] is the label of frame i ("" for background). Materializes every
// complete window, runs the open/close rule per speaker, closes what is still
// open at the end of the last frame, merges gaps below merge_gap and finally
// drops segments shorter than min_segment. Sorted by (speaker, start).
inline std::vector<Seg> segment(const std::vector<std::string>& labels, const SegParams& p) {
    const auto n = static_cast<std::int64_t>(labels.size());
    std::vector<std::string> speakers;
    for (const auto& l : labels) {
        if (!l.empty() && std::find(speakers.begin(), speakers.end(), l) == speakers.end()) speakers.push_back(l);
    }
    std::vector<Seg> result;
    for (const auto& spk : speakers) {
        std::vector<Seg> raw;
        bool open = false;
        std::int64_t open_at = 0;
        for (std::int64_t w = 0; w * p.step + p.window <= n; ++w) {
            const std::int64_t first = w * p.step;
            int count = 0;
            for (std::int64_t i = first; i < first + p.window; ++i) count += labels[i] == spk;
            if (!open && count >= p.start_thr) {
                open = true;
                open_at = first;
            } else if (open && count < p.end_thr) {
                open = false;
                raw.push_back({spk, frame_us(open_at, p.rate), frame_us(first + p.window, p.rate)});
            }
        }
        if (open) raw.push_back({spk, frame_us(open_at, p.rate), frame_us(n, p.rate)});

        std::vector<Seg> merged;
        for (const auto& s : raw) {
            if (!merged.empty() && s.start_us - merged.back().end_us < p.merge_gap_us) {
                merged.back().end_us = std::max(merged.back().end_us, s.end_us);
            } else {
                merged.push_back(s);
            }
        }
        for (const auto& s : merged) {
            if (s.end_us - s.start_us >= p.min_segment_us) result.push_back(s);
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

// ---- local agreement ------------------------------------------------------

inline std::size_t lcp(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return i;
}

// Stable token count after each hypothesis: LCP of hypotheses k-1 and k,
// clamped to be non-decreasing; zero after the first.
inline std::vector<std::size_t> stable_totals(const std::vector<std::vector<std::string>>& hyps) {
    std::vector<std::size_t> out;
    std::size_t total = 0;
    for (std::size_t k = 0; k < hyps.size(); ++k) {
        if (k > 0) total = std::max(total, lcp(hyps[k - 1], hyps[k]));
        out.push_back(total);
    }
    return out;
}

// ---- hashing embedder and cosine argmax -----------------------------------

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h = h ^ c;
        h = h * 1099511628211ULL;
    }
    return h;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

// Index of the highest cosine; the earliest wins within `tie_eps`.
inline std::size_t argmax_cosine(const std::vector<double>& q, const std::vector<std::vector<double>>& protos,
                                 double tie_eps = 1e-12) {
    std::size_t best = 0;
    double best_sim = cosine(q, protos[0]);
    for (std::size_t i = 1; i < protos.size(); ++i) {
        const double s = cosine(q, protos[i]);
        if (s > best_sim + tie_eps) {
            best = i;
            best_sim = s;
        }
    }
    return best;
}

// ---- acoustic channel -----------------------------------------------------

struct Sent {
    std::size_t bytes = 0;
    std::int64_t t_send_us = 0;
};

// Delivery time of every frame on a FIFO link, ignoring loss.
inline std::vector<std::int64_t> deliveries(const std::vector<Sent>& sends, double bandwidth, std::int64_t prop_us) {
    std::vector<std::int64_t> out;
    std::int64_t busy = 0;
    for (const auto& s : sends) {
        const std::int64_t start = std::max(s.t_send_us, busy);
        const std::int64_t ser = std::llround(static_cast<double>(s.bytes) * 1e6 / bandwidth);
        busy = start + ser;
        out.push_back(busy + prop_us);
    }
    return out;
}

// ---- playback lanes -------------------------------------------------------

struct Clip {
    std::string lane;
    std::int64_t generated_us = 0;
    std::int64_t duration_us = 0;
};

struct Slot {
    std::int64_t start_us = 0;
    std::int64_t end_us = 0;
};

// start_i = max(generated_i, end of the lane's previous clip).
inline std::vector<Slot> schedule(const std::vector<Clip>& clips) {
    std::vector<Slot> out;
    for (std::size_t i = 0; i < clips.size(); ++i) {
        std::int64_t prev_end = 0;
        for (std::size_t j = 0; j < i; ++j) {
            if (clips[j].lane == clips[i].lane) prev_end = out[j].end_us;
        }
        const std::int64_t start = std::max(clips[i].generated_us, prev_end);
        out.push_back({start, start + clips[i].duration_us});
    }
    return out;
}

}  // namespace oracle
