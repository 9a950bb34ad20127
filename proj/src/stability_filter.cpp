#include "sonartalk/stability_filter.hpp"

#include <algorithm>
#include <istream>
#include <nlohmann/json.hpp>

#include "sonartalk/errors.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

void StabilityConfig::validate() const {
    if (chunk_size.micros() <= 0) throw ConfigError("stability.chunk-size must be > 0");
}

std::size_t common_prefix_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

StabilityFilter::StabilityFilter(StabilityConfig config) : config_(config) { config_.validate(); }

StableUpdate StabilityFilter::new_hypothesis(const Hypothesis& h) {
    if (finalized_) throw DecoderContractError("hypothesis after finalize");
    if (h.chunk_count != chunk_count_ + 1) {
        throw DecoderContractError("hypothesis chunk_count " + std::to_string(h.chunk_count) + ", expected " +
                                   std::to_string(chunk_count_ + 1));
    }
    for (const auto& t : h.tokens) {
        if (t.empty() || text::split_ws(t).size() != 1) {
            throw DecoderContractError("tokens must be non-empty and free of whitespace");
        }
    }

    std::vector<std::string> tokens = h.tokens;
    const std::size_t total = stable_.size();
    if (common_prefix_length(stable_, tokens) < total) {
        ++violations_;
        if (config_.on_prefix_violation == PrefixViolationPolicy::error) {
            throw DecoderContractError("hypothesis " + std::to_string(h.chunk_count) +
                                       " does not extend the stable prefix");
        }
        std::vector<std::string> anchored = stable_;
        if (tokens.size() > total) anchored.insert(anchored.end(), tokens.begin() + total, tokens.end());
        tokens = std::move(anchored);
    }

    chunk_count_ = h.chunk_count;
    const std::size_t agreed = common_prefix_length(previous_, tokens);

    std::vector<int> since(tokens.size(), chunk_count_);
    const std::size_t carried = std::min(agreed, since_.size());
    std::copy_n(since_.begin(), carried, since.begin());

    const bool first = previous_.empty() && chunk_count_ == 1;
    previous_ = std::move(tokens);
    since_ = std::move(since);
    if (first) return StableUpdate{{}, total, {}};
    return commit(std::max(agreed, total));
}

StableUpdate StabilityFilter::finalize() {
    if (finalized_) return StableUpdate{{}, stable_.size(), {}};
    finalized_ = true;
    return commit(std::max(previous_.size(), stable_.size()));
}

StableUpdate StabilityFilter::commit(std::size_t new_total) {
    StableUpdate up;
    for (std::size_t i = stable_.size(); i < new_total; ++i) {
        up.newly_stable.push_back(previous_[i]);
        up.first_chunk.push_back(since_[i]);
    }
    stable_.insert(stable_.end(), up.newly_stable.begin(), up.newly_stable.end());
    up.total_stable = stable_.size();
    return up;
}

std::vector<Hypothesis> load_hypotheses_jsonl(std::istream& in) {
    std::vector<Hypothesis> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Hypothesis h;
            h.chunk_count = j.at("chunk_count").get<int>();
            h.tokens = j.at("tokens").get<std::vector<std::string>>();
            out.push_back(std::move(h));
        } catch (const nlohmann::json::exception& e) {
            throw InputError("hypothesis line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace sonartalk
