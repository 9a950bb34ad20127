#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sonartalk/channel.hpp"
#include "sonartalk/speaker_segmenter.hpp"
#include "sonartalk/stability_filter.hpp"
#include "sonartalk/text_segmenter.hpp"
#include "sonartalk/time.hpp"
#include "sonartalk/topside.hpp"

namespace sonartalk {

struct NetConfig {
    std::string modem_host = "127.0.0.1";
    std::uint16_t modem_port = 7700;    // sub connects here, top listens here
    std::uint16_t console_port = 8080;  // HTTP + WebSocket console API
    int connect_retries = 5;
    Duration connect_backoff = Duration::from_micros(200'000);  // doubled per retry
};

// Every tunable of both nodes. Each field is reachable as a dotted key
// ("textseg.hard-latency") from config files, flags and scenarios.
struct Config {
    SegmenterConfig segmenter;
    StabilityConfig stability;
    // Wall time the decoder needs per chunk.
    Duration asr_decode_delay = Duration::from_micros(500'000);
    TextSegConfig textseg;
    // Period of text-segmenter ticks; bounds how late a hard-latency release can be.
    Duration textseg_tick = Duration::from_micros(100'000);
    std::size_t classifier_dim = 256;
    std::filesystem::path classifier_prototypes;  // empty: built-in prototypes
    ChannelParams channel;
    SynthesisStubParams synth;
    PlaybackConfig playback;
    std::filesystem::path queue_journal;  // empty: in-memory queue
    NetConfig net;
    std::vector<std::string> roster{"speaker_1", "speaker_2"};
    std::vector<std::string> muted;  // roster entries that are not transmitted

    // Throws ConfigError for an unknown key or an unparsable value.
    void set(std::string_view key, std::string_view value);
    std::string get(std::string_view key) const;

    void validate() const;
};

struct ConfigKey {
    std::string key;
    std::string help;
};

const std::vector<ConfigKey>& config_keys();

// INI-style file: "[section]" headers, "name = value" lines, '#' or ';'
// comments. Keys resolve to "section.name".
void load_config_file(Config& config, const std::filesystem::path& path);

}  // namespace sonartalk
