#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cliffedge/petri_net.hpp"

namespace cliffedge {

struct SafetyError : Error {
    using Error::Error;
};
struct ClosureError : Error {
    using Error::Error;
};

// Explicit reachability graph. Node 0 is the root marking; edges keep the
// firing transition as label.
struct ReachGraph {
    struct Edge {
        std::uint32_t src;
        TransId trans;
        std::uint32_t dst;
    };

    std::vector<Marking> nodes;
    std::map<Marking, std::uint32_t> index;
    std::vector<Edge> edges;
    std::vector<std::vector<std::uint32_t>> out;  // per node, edge indices

    std::uint32_t node_of(const Marking& m) const;  // throws ValidationError
    bool is_deadlock(std::uint32_t n) const { return out[n].empty(); }
};

// BFS closure of fire() from the given root (default: the initial marking).
// Asserts the safety condition (M ∩ post(t)) ⊆ pre(t) at every enabled pair;
// violations raise SafetyError naming the marking and transition. max_nodes
// bounds exploration (BudgetError beyond it).
ReachGraph reach_graph(const PetriNet& net, std::size_t max_nodes = 1 << 20);
ReachGraph reach_graph(const PetriNet& net, const Marking& root,
                       std::size_t max_nodes = 1 << 20);

// Terminal strongly connected components (no edge leaving the component),
// i.e. the attractors of the system.
struct AttractorSet {
    std::vector<std::vector<std::uint32_t>> components;  // node indices, sorted
};
AttractorSet attractors(const ReachGraph& g);

enum class ClosureMode { Require, AutoClose };

struct BadSpec {
    std::vector<Marking> bad_markings;
    ClosureMode mode = ClosureMode::Require;
};

BadSpec parse_bad_spec(const PetriNet& net, const std::string& json_text);
std::string bad_spec_json(const PetriNet& net, const std::vector<Marking>& markings,
                          ClosureMode mode);

// Validates/closes a bad-marking set against the graph. Listed markings that
// are unreachable are dropped with a warning. In Require mode a successor
// escaping the set raises ClosureError naming the step; in AutoClose mode
// the forward reachability closure is returned.
std::set<Marking> validate_bad(const PetriNet& net, const BadSpec& spec, const ReachGraph& g,
                               std::vector<std::string>* warnings = nullptr);

enum class MarkStatus { Bad, Doomed, Free };
const char* to_string(MarkStatus s);

// Ground-truth doom classification on the reachability graph. A non-bad
// marking is free iff it can reach, through non-bad markings, either a
// deadlock of the full graph or a marking M1 on a non-bad cycle whose cycle
// transitions consume every token that could feed a still-enabled
// transition: no t may satisfy pre(t) ⊆ M1 \ consumed(SCC of M1). The side
// condition matches run maximality — an event whose tokens are never touched
// could always be appended, so a loop ignoring it is not a maximal run.
std::map<Marking, MarkStatus> doom_oracle(const PetriNet& net, const ReachGraph& g,
                                          const std::set<Marking>& bad);

}  // namespace cliffedge
