#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sonartalk/config.hpp"
#include "sonartalk/speaker_segmenter.hpp"
#include "sonartalk/stability_filter.hpp"
#include "sonartalk/time.hpp"
#include "sonartalk/types.hpp"

namespace sonartalk {

inline constexpr int scenario_version = 1;

// What the scripted decoder says for one speech segment. Either explicit
// per-chunk hypotheses or a final transcript from which growing prefix
// hypotheses are generated.
struct DecoderScript {
    std::vector<std::vector<std::string>> hypotheses;
    std::string transcript;

    // Hypotheses for a segment of `chunks` chunks. Chunk i uses entry i-1,
    // the last entry repeating when the script is short; a longer script has
    // its final entry moved onto the last chunk. A transcript of m tokens
    // gives chunk i the first ceil(i*m/chunks) tokens.
    std::vector<Hypothesis> for_chunks(int chunks) const;
};

struct ScriptedSegment {
    SpeechSegment segment;
    DecoderScript decoder;
};

struct DirectMessage {
    TimeStamp at;  // wall-time
    std::string text;
};

enum class StreamKind { segments, frames, messages };

std::string_view to_string(StreamKind k);

struct ScenarioStream {
    StreamKind kind = StreamKind::segments;
    std::optional<SpeakerId> speaker;  // segments and messages streams

    std::vector<ScriptedSegment> segments;

    // frames: labels from the scripted classifier, plus the decoder script for
    // the k-th closed segment of each speaker.
    std::vector<FrameLabel> frames;
    std::map<SpeakerId, std::vector<DecoderScript>> frame_scripts;

    std::vector<DirectMessage> messages;
};

struct NoiseSpec {
    std::size_t bytes_per_frame = 0;  // random bytes injected before every delivered frame
    std::uint64_t seed = 0;
};

enum class ClockMode { simulated, real };

struct Scenario {
    int version = scenario_version;
    std::string name;
    std::vector<SpeakerId> roster;
    ClockMode clock = ClockMode::simulated;
    // Dotted config keys, applied in file order on top of a base config.
    std::vector<std::pair<std::string, std::string>> overrides;
    NoiseSpec noise;
    std::vector<ScenarioStream> streams;

    // Base config with the roster and overrides applied. Throws ScenarioError
    // for an unknown key or a bad value.
    Config apply(Config base = {}) const;
};

// Throws ScenarioError with a diagnostic for schema violations.
Scenario parse_scenario(std::string_view json);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace sonartalk
