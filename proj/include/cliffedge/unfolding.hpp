#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cliffedge/bitset.hpp"
#include "cliffedge/petri_net.hpp"

namespace cliffedge {

struct InvalidConfigError : Error {
    using Error::Error;
};

// Adequate total orders on finite configurations. Erv is the classic
// (size, Parikh word, Foata form) key; HeightFirst puts the decisional
// height in front and falls back to the Erv key.
enum class Order { Erv, HeightFirst };
const char* to_string(Order o);

struct Condition {
    std::uint32_t id;
    std::int32_t producer;  // event id, -1 for the initial cut
    PlaceId place;
    std::vector<std::uint32_t> consumers;  // event ids, ascending
};

struct Event {
    std::uint32_t id;
    TransId transition;
    std::vector<std::uint32_t> preset;   // condition ids, sorted
    std::vector<std::uint32_t> postset;  // condition ids, sorted
    bool cutoff = false;
    std::uint32_t generation = 0;  // n of the family layer that created it
    std::uint32_t level = 0;       // Foata level: 1 + max level of causal preds
};

struct PrefixData;

// Immutable occurrence-net prefix with fold map into the source net.
// Cheap to copy; all queries are pure and safe to run concurrently.
class Prefix {
public:
    explicit Prefix(std::shared_ptr<const PrefixData> d) : d_(std::move(d)) {}

    const PetriNet& net() const;
    const Marking& root() const;
    Order order() const;
    std::uint32_t depth() const;  // n of the family Πn

    std::size_t condition_count() const;
    std::size_t event_count() const;
    const Condition& condition(std::uint32_t c) const;
    const Event& event(std::uint32_t e) const;
    const std::vector<std::uint32_t>& initial_cut() const;

    bool concurrent(std::uint32_t c1, std::uint32_t c2) const;  // conditions
    bool in_cone(std::uint32_t e, std::uint32_t f) const;       // f <= e

    // Event of a given (preset, transition), if present.
    std::optional<std::uint32_t> find_event(const std::vector<std::uint32_t>& preset,
                                            TransId t) const;

    const PrefixData& data() const { return *d_; }
    std::shared_ptr<const PrefixData> share() const { return d_; }

private:
    std::shared_ptr<const PrefixData> d_;
};

// Configurations are event sets of a particular prefix.
using EventSet = Bitset;

// --------------------------------------------------------------------------
// Construction
// --------------------------------------------------------------------------

struct UnfoldLimits {
    std::size_t max_events = 200000;
    std::size_t max_configs = 2000000;
};

struct PotentialEvent {
    std::vector<std::uint32_t> preset;  // condition ids, sorted co-set
    TransId transition;

    friend bool operator==(const PotentialEvent& a, const PotentialEvent& b) {
        return a.transition == b.transition && a.preset == b.preset;
    }
    friend bool operator<(const PotentialEvent& a, const PotentialEvent& b) {
        if (a.transition != b.transition) return a.transition < b.transition;
        return a.preset < b.preset;
    }
};

// Incremental prefix construction. add_smallest() pops the pending extension
// whose cone is least in the configured order, which is what cutoff
// detection assumes; add() inserts a chosen candidate and is meant for
// step-by-step exploration and tests.
class PrefixBuilder {
public:
    PrefixBuilder(const PetriNet& net, Order order, Marking root, UnfoldLimits limits = {});
    ~PrefixBuilder();
    PrefixBuilder(PrefixBuilder&&) noexcept;

    bool done() const;
    std::vector<PotentialEvent> pending() const;  // ascending by cone order
    std::uint32_t add_smallest();                 // returns the new event id
    std::uint32_t add(const PotentialEvent& pe);
    Prefix finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Complete finite prefix Π0 for the net rooted at `root` (default: initial
// marking). Events are inserted in ascending cone order; an event is a
// cutoff when its cone rediscovers the root marking or a marking already
// discovered by a smaller cone, and nothing is extended beyond cutoffs.
Prefix build_prefix(const PetriNet& net, Order order, UnfoldLimits limits = {});
Prefix build_prefix(const PetriNet& net, Order order, const Marking& root,
                    UnfoldLimits limits = {});

// Just the initial cut, no events: the starting point for manual building
// and a degenerate analysis scope.
Prefix seed_prefix(const PetriNet& net, Order order, const Marking& root);

// Πn -> Πn+1: grafts, onto the cut of every maximal configuration, a copy of
// the complete prefix of the net re-rooted at that configuration's marking.
// Re-rooted prefixes are built once per distinct marking; event identity is
// global, so overlapping grafts reuse events instead of duplicating them.
Prefix extend_family(const Prefix& p, UnfoldLimits limits = {});

// All extensions of the prefix: co-sets of extendable conditions folding to
// a transition preset, minus events already present. Recomputed from
// scratch; the builder's incremental queue must agree with this.
std::vector<PotentialEvent> possible_extensions(const Prefix& p);

// --------------------------------------------------------------------------
// Configuration queries
// --------------------------------------------------------------------------

EventSet cone(const Prefix& p, std::uint32_t e);   // {f : f <= e}
EventSet stump(const Prefix& p, std::uint32_t e);  // {f : f < e}

// Conditions marked after running c; validates causal closure and
// conflict-freeness (InvalidConfigError otherwise).
std::vector<std::uint32_t> cut(const Prefix& p, const EventSet& c);
Marking mark(const Prefix& p, const EventSet& c);
Marking mark_of_cut(const Prefix& p, const std::vector<std::uint32_t>& cut_conds);
EventSet crest(const Prefix& p, const EventSet& c);  // maximal events of c

enum class Relation { Equal, Causal, Conflict, Concurrent };
const char* to_string(Relation r);

struct NodeRef {
    bool is_event;
    std::uint32_t id;
    static NodeRef cond(std::uint32_t c) { return {false, c}; }
    static NodeRef event(std::uint32_t e) { return {true, e}; }
};
Relation relation(const Prefix& p, NodeRef x, NodeRef y);

// C ⊖ C1: the remainder of c after c1, reinterpreted over the cut of c1.
// Event identity is preserved so conflicts can be evaluated in the shifted
// context.
struct Residual {
    std::vector<std::uint32_t> base_cut;  // cut(c1)
    EventSet events;                      // c \ c1
};
Residual residual(const Prefix& p, const EventSet& c, const EventSet& c1);

// --------------------------------------------------------------------------
// Order keys
// --------------------------------------------------------------------------

struct ConfigKey {
    std::uint64_t height = 0;  // meaningful only under HeightFirst
    std::uint32_t size = 0;
    std::vector<TransId> parikh;              // sorted transition ids
    std::vector<std::vector<TransId>> foata;  // per level, sorted transition ids
};

ConfigKey config_key(const Prefix& p, const EventSet& c, Order order);
int compare_keys(const ConfigKey& a, const ConfigKey& b, Order order);  // -1/0/1
int order_compare(const Prefix& p, const EventSet& a, const EventSet& b, Order order);

// Events of the full unfolding whose entire causal past lies inside the
// member events (given with `base` as the shift root's cut) and which share
// a preset condition with some member: the events decided against. This is
// prefix-independent — candidates are rebuilt from co-sets, so truncation
// behind cutoffs cannot hide any of them.
std::vector<PotentialEvent> decided_against(const Prefix& p,
                                            const std::vector<std::uint32_t>& base,
                                            const EventSet& members);

// --------------------------------------------------------------------------
// Enumeration
// --------------------------------------------------------------------------

enum class Visit { Extend, Prune, Stop };

// Depth-first enumeration of every configuration (each visited exactly
// once). The visitor may prune extensions of the current configuration or
// stop the walk. Throws BudgetError past max_configs. The second form
// restricts the walk to events of generation <= max_generation, i.e. to the
// Π_max_generation layer of a family prefix.
void for_each_config(
    const Prefix& p, std::size_t max_configs,
    const std::function<Visit(const EventSet&, const std::vector<std::uint32_t>& cut_conds,
                              bool maximal)>& visit);
void for_each_config(
    const Prefix& p, std::size_t max_configs, std::uint32_t max_generation,
    const std::function<Visit(const EventSet&, const std::vector<std::uint32_t>& cut_conds,
                              bool maximal)>& visit);

std::vector<EventSet> maximal_configs(const Prefix& p, std::size_t max_configs = 2000000);

// --------------------------------------------------------------------------
// Export
// --------------------------------------------------------------------------

std::string dump(const Prefix& p);  // stable text form, one event per line

struct DotStyle {
    const EventSet* tinted = nullptr;   // filled background
    const EventSet* doubled = nullptr;  // double border
};
std::string to_dot(const Prefix& p, const DotStyle& style = {});

}  // namespace cliffedge
