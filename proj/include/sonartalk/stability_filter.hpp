#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sonartalk/time.hpp"

namespace sonartalk {

// Decoder output after re-decoding chunks 1..chunk_count of one segment.
struct Hypothesis {
    int chunk_count = 0;
    std::vector<std::string> tokens;
};

struct StableUpdate {
    std::vector<std::string> newly_stable;
    std::size_t total_stable = 0;
    // For each newly stable token, the chunk count of the hypothesis from
    // which it sat unchanged in its position until it became stable.
    std::vector<int> first_chunk;

    bool empty() const { return newly_stable.empty(); }
};

enum class PrefixViolationPolicy { error, truncate_recover };

struct StabilityConfig {
    Duration chunk_size = Duration::from_micros(1'000'000);
    PrefixViolationPolicy on_prefix_violation = PrefixViolationPolicy::error;

    void validate() const;
};

// Local-agreement stability detection for one stream (one speech segment).
//
// Each hypothesis is compared with the previous one; their longest common
// token prefix is stable and never revised. The first hypothesis has nothing
// to agree with and yields an empty update.
class StabilityFilter {
public:
    explicit StabilityFilter(StabilityConfig config = {});

    // Requires chunk_count == previous + 1 and (since decoding is forced on the
    // stable prefix) tokens starting with the stable prefix. Violations throw
    // DecoderContractError, except that with truncate_recover a hypothesis that
    // drifts from the prefix is re-anchored on it.
    StableUpdate new_hypothesis(const Hypothesis& h);

    // Ends the stream: the rest of the last hypothesis becomes stable.
    // Idempotent; new_hypothesis throws afterwards.
    StableUpdate finalize();

    const std::vector<std::string>& stable() const { return stable_; }
    int chunk_count() const { return chunk_count_; }
    std::size_t prefix_violations() const { return violations_; }

private:
    StableUpdate commit(std::size_t new_total);

    StabilityConfig config_;
    std::vector<std::string> previous_;
    std::vector<int> since_;  // per position of previous_
    std::vector<std::string> stable_;
    int chunk_count_ = 0;
    std::size_t violations_ = 0;
    bool finalized_ = false;
};

// Scripted decoder: a fixed list of hypotheses for one segment.
// JSONL, one {"chunk_count": k, "tokens": [...]} per line.
std::vector<Hypothesis> load_hypotheses_jsonl(std::istream& in);

// Longest common prefix length of two token lists.
std::size_t common_prefix_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace sonartalk
