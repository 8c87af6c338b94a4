#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "cliffedge/petri_net.hpp"
#include "cliffedge/reach.hpp"
#include "cliffedge/unfolding.hpp"

namespace cliffedge {

struct FamilyMismatchError : Error {
    using Error::Error;
};

// Transitions sharing an input place with t; firing any of them cancels an
// enabling of t. Always contains t itself.
std::vector<TransId> spoilers(const PetriNet& net, TransId t);
std::vector<std::uint32_t> event_spoilers(const Prefix& p, std::uint32_t e);

// Outcome of a doom check for one marking. A free verdict carries the loop
// witness: configurations c1 ⊆ c2 of `family` with equal marks such that
// every event enabled at cut(c1) is spoiled inside c2 \ c1 (a deadlocked cut
// shows up as c1 == c2).
struct DoomVerdict {
    MarkStatus value;
    std::optional<Prefix> family;
    std::optional<std::pair<EventSet, EventSet>> witness;
};

struct DoomBudgets {
    UnfoldLimits unfold;
    std::size_t max_configs = 500000;
};

// Classifies markings as bad/doomed/free on unfolding families, one Π_depth
// family per marking, memoized by marking (doom status only depends on the
// marking). Queries are safe to call concurrently; the memo and family cache
// are the only shared mutable state.
class DoomAnalyzer {
public:
    DoomAnalyzer(const PetriNet& net, std::set<Marking> bad, Order order = Order::Erv,
                 std::uint32_t family_depth = 1, DoomBudgets budgets = {});

    const PetriNet& net() const { return net_; }
    const std::set<Marking>& bad() const { return bad_; }
    Order order() const { return order_; }
    const DoomBudgets& budgets() const { return budgets_; }

    DoomVerdict status(const Marking& m);
    MarkStatus status_of_config(const Prefix& host, const EventSet& c);

    // Explicit-family check: verifies family.root() == mark(host, c) and
    // searches that family for the witness.
    DoomVerdict is_free(const Prefix& host, const EventSet& c, const Prefix& family);

    Prefix family(const Marking& m);  // cached Π_depth of (net, m)

    std::uint64_t doom_checks() const { return checks_.load(); }

    // Test hook: plants a wrong verdict so downstream cross-checks can be
    // exercised on a forced divergence.
    void override_status(const Marking& m, MarkStatus value);

private:
    DoomVerdict search(const Prefix& family) const;

    const PetriNet& net_;
    std::set<Marking> bad_;
    Order order_;
    std::uint32_t family_depth_;
    DoomBudgets budgets_;

    mutable std::mutex mu_;
    std::map<Marking, DoomVerdict> memo_;
    std::map<Marking, Prefix> families_;
    std::atomic<std::uint64_t> checks_{0};
};

// ⊆-minimal configurations of the generation-0 layer whose mark is bad.
std::vector<EventSet> min_bad_configs(const Prefix& family, const std::set<Marking>& bad,
                                      std::size_t max_configs = 500000);

// An event is unchallenged when no other event of the prefix consumes any of
// its preset conditions.
bool unchallenged(const Prefix& p, std::uint32_t e);

// Removes unchallenged crest events until none remain: the unique maximal
// shaved sub-configuration, with the same maximal runs.
EventSet shave(const Prefix& p, EventSet c);

struct MdcEntry {
    EventSet events;
    EventSet crest_events;
    Marking mark;
};

struct MdcSet {
    Prefix prefix;  // the family the configurations live in
    std::vector<MdcEntry> configs;
};

// Worklist search for the minimally doomed configurations: seeds with the
// shaved minimal bad configurations of the Π0 layer, then repeatedly rubs
// crest events off doomed configurations until every rub is free. If the
// empty configuration ever enters the worklist, it is the unique answer.
// The pick order does not affect the result; shuffle_seed randomizes it for
// the invariance tests.
MdcSet mindoo(DoomAnalyzer& an, const Prefix& family,
              std::optional<std::uint64_t> shuffle_seed = std::nullopt);

// Exhaustive scan: all configurations of `scope` that are doomed with every
// crest rub free. Prunes below doomed configurations, so the walk stays in
// the free region plus its boundary.
std::vector<EventSet> enumerate_min_doomed(DoomAnalyzer& an, const Prefix& scope,
                                           std::size_t max_configs = 500000);

struct Ridge {
    std::vector<TransId> transitions;    // fold of the cliff-edge, deduplicated
    std::vector<EventSet> witnesses;     // cliff-edges (crests) folding to it
};

std::vector<Ridge> ridges(const MdcSet& m);

// Ridges witnessed anywhere in the Π1 family: scans for minimally doomed
// configurations beyond the worklist's reach so that every ridge of the net
// has a witness.
std::vector<Ridge> ridge_complete(DoomAnalyzer& an, const Prefix& family,
                                  std::size_t max_configs = 500000);

}  // namespace cliffedge
