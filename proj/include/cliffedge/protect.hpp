#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cliffedge/doom.hpp"
#include "cliffedge/unfolding.hpp"

namespace cliffedge {

// The scope prefix holds no minimally doomed configuration although doomed
// markings are reachable: the scope is too small for a verdict.
struct ScopeError : Error {
    using Error::Error;
};

// How the decisional height counts. DecidedAgainst counts the distinct
// events the process decided against (reproduces every published figure);
// LiteralCount counts the members that embody some decision.
enum class HeightMode { DecidedAgainst, LiteralCount };
const char* to_string(HeightMode m);

// e #_c e': direct conflict with an event whose entire causal past lies
// inside c — a decision genuinely taken within c. Requires e in c, e' != e.
bool strict_conflict(const Prefix& p, const EventSet& c, std::uint32_t e, std::uint32_t e2);

// Decisional height of a configuration (over the prefix's own root cut) and
// of a residual (over the cut it was shifted to).
std::uint64_t height(const Prefix& p, const EventSet& c,
                     HeightMode mode = HeightMode::DecidedAgainst);
std::uint64_t residual_height(const Prefix& p, const Residual& r,
                              HeightMode mode = HeightMode::DecidedAgainst);

struct Protectedness {
    // Minimum residual decisional height over the minimally doomed
    // extensions; empty when no doomed extension exists at all (reported as
    // "unbounded").
    std::optional<std::uint64_t> value;
    bool doomed_self = false;          // the queried configuration is already doomed/bad
    std::optional<Prefix> scope;       // the prefix the witnesses live in
    std::vector<EventSet> witnesses;   // argmin minimally doomed extensions
};

// Minimally doomed extensions of the (shift-rooted) scope prefix; for a
// doomed marking the set is the configuration itself, i.e. an empty
// residual.
std::vector<EventSet> mdc_of(DoomAnalyzer& an, const Prefix& scope,
                             std::size_t max_configs = 500000);

// Protectedness of a marking, on an explicit scope prefix rooted at m.
// Raises ScopeError when the scope shows no minimally doomed configuration
// but doomed markings are reachable from m — never silently unbounded.
Protectedness protectedness_with_scope(DoomAnalyzer& an, const Marking& m,
                                       const Prefix& scope, HeightMode mode);

// Default scope: the height-first-ordered complete prefix of (net, m),
// which is guaranteed to contain a height-minimizing minimally doomed
// configuration.
Protectedness protectedness(DoomAnalyzer& an, const Marking& m,
                            HeightMode mode = HeightMode::DecidedAgainst);

// Independent route: exhaustive minimally-doomed enumeration over the Π2
// family (built with the Erv order), for stability cross-checks.
Protectedness protectedness_pi2(DoomAnalyzer& an, const Marking& m,
                                HeightMode mode = HeightMode::DecidedAgainst);

// Convenience for configurations of a host prefix.
Protectedness protectedness(DoomAnalyzer& an, const Prefix& host, const EventSet& c,
                            HeightMode mode = HeightMode::DecidedAgainst);

}  // namespace cliffedge
