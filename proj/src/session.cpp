#include "sonartalk/session.hpp"

#include <algorithm>
#include <set>

#include "sonartalk/errors.hpp"

namespace sonartalk {

bool SessionContext::in_roster(const SpeakerId& s) const {
    return std::any_of(roster.begin(), roster.end(), [&](const RosterEntry& e) { return e.id == s; });
}

bool SessionContext::enabled(const SpeakerId& s) const {
    return std::any_of(roster.begin(), roster.end(), [&](const RosterEntry& e) { return e.id == s && e.enabled; });
}

SessionContext new_session(const std::vector<SpeakerId>& roster, Config config, std::shared_ptr<Clock> clock) {
    if (roster.empty()) throw ConfigError("session roster is empty");
    std::set<SpeakerId> seen;
    for (const auto& s : roster) {
        if (!seen.insert(s).second) throw ConfigError("duplicate speaker id in roster: " + s.str());
    }
    config.roster.clear();
    for (const auto& s : roster) config.roster.push_back(s.str());
    config.validate();

    SessionContext ctx;
    for (const auto& s : roster) {
        const bool muted = std::find(config.muted.begin(), config.muted.end(), s.str()) != config.muted.end();
        ctx.roster.push_back(RosterEntry{s, !muted});
    }
    ctx.config = std::move(config);
    ctx.clock = clock ? std::move(clock) : std::make_shared<SimulatedClock>();
    ctx.log = std::make_shared<EventLog>();
    return ctx;
}

SessionContext new_session(Config config, std::shared_ptr<Clock> clock) {
    std::vector<SpeakerId> roster;
    try {
        for (const auto& s : config.roster) roster.emplace_back(s);
    } catch (const InputError& e) {
        throw ConfigError(std::string("session.roster: ") + e.what());
    }
    return new_session(roster, std::move(config), std::move(clock));
}

}  // namespace sonartalk
