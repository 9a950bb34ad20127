#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sonartalk {

// Unit-length embedding. Construct through normalized().
class EmbeddingVector {
public:
    EmbeddingVector() = default;

    // Throws InputError for an empty, non-finite, or all-zero input.
    static EmbeddingVector normalized(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t dim() const { return values_.size(); }
    double dot(const EmbeddingVector& other) const;

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(std::string_view sentence) const = 0;
    virtual std::size_t dim() const = 0;
};

// Hashed bag of tokens and token bigrams.
//
// Lowercases ASCII, splits on whitespace, strips ASCII punctuation from token
// edges, then counts the FNV-1a hash of every token and of every adjacent
// token pair ("a b") into dim buckets and L2-normalizes the counts.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dim = 256);

    EmbeddingVector embed(std::string_view sentence) const override;
    std::size_t dim() const override { return dim_; }

    std::vector<std::string> features(std::string_view sentence) const;
    std::size_t bucket(std::string_view feature) const;

private:
    std::size_t dim_;
};

// Sentence -> vector table for precomputed embeddings from an external model.
class LookupEmbedder final : public Embedder {
public:
    explicit LookupEmbedder(std::size_t dim) : dim_(dim) {}

    void add(std::string sentence, EmbeddingVector v);
    // Throws InputError for sentences without a stored vector.
    EmbeddingVector embed(std::string_view sentence) const override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
    std::map<std::string, EmbeddingVector, std::less<>> table_;
};

struct ClusterPrototype {
    std::string label;
    std::string sentence;
    EmbeddingVector embedding;
};

struct Classification {
    std::string label;
    double similarity = 0.0;
    std::size_t prototype = 0;  // insertion index of the winning prototype
};

// Immutable exact nearest-prototype index under cosine similarity.
class PrototypeIndex {
public:
    // Throws InputError on an empty list, an empty label, or mixed dimensions.
    static PrototypeIndex build(std::vector<ClusterPrototype> prototypes);

    // Argmax of cosine similarity; ties go to the earliest prototype.
    Classification nearest(const EmbeddingVector& query) const;

    std::size_t size() const { return prototypes_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<ClusterPrototype>& prototypes() const { return prototypes_; }
    std::vector<std::string> labels() const;

private:
    std::vector<ClusterPrototype> prototypes_;
    std::size_t dim_ = 0;
};

Classification classify(std::string_view sentence, const PrototypeIndex& index, const Embedder& embedder);

// Prototype file: JSONL of {"label", "sentence"} with an optional "embedding"
// array. Lines without an embedding are embedded with `embedder`.
std::vector<ClusterPrototype> load_prototypes(std::istream& in, const Embedder& embedder);

// Built-in prototypes for small_talk, system_logs, topside_comm and observations.
std::vector<ClusterPrototype> default_prototypes(const Embedder& embedder);

// Embedder plus index, shared read-only by the pipeline.
class TopicClassifier {
public:
    TopicClassifier(std::shared_ptr<const Embedder> embedder, PrototypeIndex index);

    Classification classify(std::string_view sentence) const;
    const PrototypeIndex& index() const { return index_; }
    const Embedder& embedder() const { return *embedder_; }

private:
    std::shared_ptr<const Embedder> embedder_;
    PrototypeIndex index_;
};

}  // namespace sonartalk
