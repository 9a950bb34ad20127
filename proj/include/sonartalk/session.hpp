#pragma once

#include <memory>
#include <vector>

#include "sonartalk/clock.hpp"
#include "sonartalk/config.hpp"
#include "sonartalk/event_log.hpp"
#include "sonartalk/types.hpp"

namespace sonartalk {

struct RosterEntry {
    SpeakerId id;
    bool enabled = true;  // disabled speakers are segmented but not transmitted

    bool operator==(const RosterEntry&) const = default;
};

struct SessionContext {
    std::vector<RosterEntry> roster;
    Config config;
    std::shared_ptr<Clock> clock;
    std::shared_ptr<EventLog> log;

    bool enabled(const SpeakerId& s) const;
    bool in_roster(const SpeakerId& s) const;
};

// Throws ConfigError for an empty roster, a duplicate id or an invalid config.
// Speakers listed in config.muted start disabled. Without a clock the session
// gets a fresh SimulatedClock.
SessionContext new_session(const std::vector<SpeakerId>& roster, Config config,
                           std::shared_ptr<Clock> clock = nullptr);

// Roster taken from config.roster.
SessionContext new_session(Config config, std::shared_ptr<Clock> clock = nullptr);

}  // namespace sonartalk
