#include "sonartalk/topic_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>

#include "sonartalk/errors.hpp"
#include "sonartalk/text.hpp"

namespace sonartalk {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
    if (values.empty()) throw InputError("embedding has dimension 0");
    double sq = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("embedding has a non-finite component");
        sq += v * v;
    }
    if (sq == 0.0) throw InputError("embedding is the zero vector");
    const double norm = std::sqrt(sq);
    for (double& v : values) v /= norm;
    EmbeddingVector e;
    e.values_ = std::move(values);
    return e;
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
    if (other.dim() != dim()) throw InputError("embedding dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * other.values_[i];
    return s;
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ConfigError("classifier.dim must be > 0");
}

std::size_t HashingEmbedder::bucket(std::string_view feature) const {
    return static_cast<std::size_t>(fnv1a64(feature) % dim_);
}

std::vector<std::string> HashingEmbedder::features(std::string_view sentence) const {
    const auto raw = text::split_ws(lower_ascii(sentence));
    std::vector<std::string> tokens;
    for (const auto& r : raw) {
        std::string_view t = r;
        while (!t.empty() && ascii_punct(t.front())) t.remove_prefix(1);
        while (!t.empty() && ascii_punct(t.back())) t.remove_suffix(1);
        if (!t.empty()) tokens.emplace_back(t);
    }
    // A sentence made only of punctuation still embeds, by its raw tokens.
    if (tokens.empty()) tokens = raw;

    std::vector<std::string> feats = tokens;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        feats.push_back(tokens[i] + " " + tokens[i + 1]);
    }
    return feats;
}

EmbeddingVector HashingEmbedder::embed(std::string_view sentence) const {
    const auto feats = features(sentence);
    if (feats.empty()) throw InputError("cannot embed an empty sentence");
    std::vector<double> counts(dim_, 0.0);
    for (const auto& f : feats) counts[bucket(f)] += 1.0;
    return EmbeddingVector::normalized(std::move(counts));
}

void LookupEmbedder::add(std::string sentence, EmbeddingVector v) {
    if (v.dim() != dim_) throw InputError("lookup embedding dimension mismatch");
    table_.insert_or_assign(std::move(sentence), std::move(v));
}

EmbeddingVector LookupEmbedder::embed(std::string_view sentence) const {
    if (text::split_ws(sentence).empty()) throw InputError("cannot embed an empty sentence");
    auto it = table_.find(sentence);
    if (it == table_.end()) throw InputError("no precomputed embedding for: " + std::string(sentence));
    return it->second;
}

PrototypeIndex PrototypeIndex::build(std::vector<ClusterPrototype> prototypes) {
    if (prototypes.empty()) throw InputError("prototype index needs at least one prototype");
    const std::size_t dim = prototypes.front().embedding.dim();
    for (const auto& p : prototypes) {
        if (p.label.empty()) throw InputError("prototype label is empty");
        if (p.embedding.dim() == 0) throw InputError("prototype embedding is empty");
        if (p.embedding.dim() != dim) {
            throw InputError("prototype dimension mismatch: " + std::to_string(p.embedding.dim()) + " vs " +
                             std::to_string(dim));
        }
    }
    PrototypeIndex idx;
    idx.prototypes_ = std::move(prototypes);
    idx.dim_ = dim;
    return idx;
}

Classification PrototypeIndex::nearest(const EmbeddingVector& query) const {
    if (query.dim() != dim_) throw InputError("query dimension does not match index");
    Classification best{prototypes_.front().label, query.dot(prototypes_.front().embedding), 0};
    for (std::size_t i = 1; i < prototypes_.size(); ++i) {
        const double s = query.dot(prototypes_[i].embedding);
        if (s > best.similarity) best = Classification{prototypes_[i].label, s, i};
    }
    return best;
}

std::vector<std::string> PrototypeIndex::labels() const {
    std::vector<std::string> out;
    for (const auto& p : prototypes_) {
        if (std::find(out.begin(), out.end(), p.label) == out.end()) out.push_back(p.label);
    }
    return out;
}

Classification classify(std::string_view sentence, const PrototypeIndex& index, const Embedder& embedder) {
    return index.nearest(embedder.embed(sentence));
}

std::vector<ClusterPrototype> load_prototypes(std::istream& in, const Embedder& embedder) {
    std::vector<ClusterPrototype> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            ClusterPrototype p;
            p.label = j.at("label").get<std::string>();
            p.sentence = j.at("sentence").get<std::string>();
            if (auto it = j.find("embedding"); it != j.end()) {
                p.embedding = EmbeddingVector::normalized(it->get<std::vector<double>>());
            } else {
                p.embedding = embedder.embed(p.sentence);
            }
            out.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw InputError("prototype line " + std::to_string(lineno) + ": " + e.what());
        } catch (const InputError& e) {
            throw InputError("prototype line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<ClusterPrototype> default_prototypes(const Embedder& embedder) {
    static const std::vector<std::pair<std::string, std::string>> seed{
        {"small_talk", "How are you doing down there?"},
        {"small_talk", "It is a bit cold in here but we are fine."},
        {"small_talk", "Thanks, that sounds great."},
        {"small_talk", "Did you have lunch before the dive?"},
        {"system_logs", "Battery at eighty percent, all systems nominal."},
        {"system_logs", "Oxygen level stable, scrubber running."},
        {"system_logs", "Thruster two reports high temperature."},
        {"system_logs", "Ballast tanks flooded, descent rate steady."},
        {"topside_comm", "Topside, this is the sub, do you copy?"},
        {"topside_comm", "Surface, we copy you loud and clear."},
        {"topside_comm", "Requesting permission to start the ascent."},
        {"topside_comm", "Roger that, standing by for your instructions."},
        {"observations", "We see a large octopus near the rock."},
        {"observations", "There are white corals on the slope at this depth."},
        {"observations", "A school of fish is swimming past the window."},
        {"observations", "The sediment here looks dark and very fine."},
    };
    std::vector<ClusterPrototype> out;
    for (const auto& [label, sentence] : seed) {
        out.push_back(ClusterPrototype{label, sentence, embedder.embed(sentence)});
    }
    return out;
}

TopicClassifier::TopicClassifier(std::shared_ptr<const Embedder> embedder, PrototypeIndex index)
    : embedder_(std::move(embedder)), index_(std::move(index)) {
    if (!embedder_) throw InputError("topic classifier needs an embedder");
    if (embedder_->dim() != index_.dim()) throw InputError("embedder dimension does not match index");
}

Classification TopicClassifier::classify(std::string_view sentence) const {
    return sonartalk::classify(sentence, index_, *embedder_);
}

}  // namespace sonartalk
