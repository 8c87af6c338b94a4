#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cliffedge {

using PlaceId = std::uint32_t;
using TransId = std::uint32_t;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    ParseError(const std::string& msg, int line = -1);
    int line;
};
struct ValidationError : Error {
    using Error::Error;
};
struct NotEnabledError : Error {
    using Error::Error;
};
struct BudgetError : Error {
    using Error::Error;
};

// A marking: canonical sorted set of place indices. Equality, ordering and
// hashing all operate on this canonical form.
class Marking {
public:
    Marking() = default;
    explicit Marking(std::vector<PlaceId> places);  // sorts, rejects duplicates

    bool contains(PlaceId p) const;
    std::size_t size() const { return places_.size(); }
    bool empty() const { return places_.empty(); }
    const std::vector<PlaceId>& places() const { return places_; }

    friend bool operator==(const Marking& a, const Marking& b) { return a.places_ == b.places_; }
    friend bool operator<(const Marking& a, const Marking& b) { return a.places_ < b.places_; }

private:
    std::vector<PlaceId> places_;
};

struct Transition {
    std::string name;
    std::vector<PlaceId> pre;   // sorted
    std::vector<PlaceId> post;  // sorted
};

// A safe Petri net: named places and transitions, flow arcs, initial marking.
// Construction validates structure (unique disjoint names, declared arc
// endpoints, non-empty pre/postsets); runtime safety is checked by
// reach_graph.
class PetriNet {
public:
    PetriNet(std::vector<std::string> places, std::vector<Transition> transitions,
             Marking initial);

    std::size_t place_count() const { return places_.size(); }
    std::size_t transition_count() const { return transitions_.size(); }
    const std::string& place_name(PlaceId p) const { return places_[p]; }
    const Transition& transition(TransId t) const { return transitions_[t]; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    const Marking& initial_marking() const { return initial_; }

    PlaceId place_id(const std::string& name) const;   // throws ValidationError
    TransId transition_id(const std::string& name) const;

    // Transitions with p in their preset, ascending.
    const std::vector<TransId>& consumers_of(PlaceId p) const { return consumers_[p]; }

    Marking marking_of(const std::vector<std::string>& place_names) const;
    std::string marking_name(const Marking& m) const;  // "{p1,p2}" canonical form

private:
    std::vector<std::string> places_;
    std::vector<Transition> transitions_;
    Marking initial_;
    std::vector<std::vector<TransId>> consumers_;
};

// Transitions enabled at m: every preset place marked.
std::vector<TransId> enabled(const PetriNet& net, const Marking& m);

bool is_enabled(const PetriNet& net, const Marking& m, TransId t);

// Set-based firing rule for safe nets: (m \ pre) | post. Throws
// NotEnabledError if t is not enabled at m.
Marking fire(const PetriNet& net, const Marking& m, TransId t);

// PEP ll_net reader (subset: PL/TR/TP/PT sections, M<n> initial-token
// attribute, other attribute suffixes ignored).
PetriNet parse_llnet(std::istream& in);
PetriNet parse_llnet_string(const std::string& text);

// Native JSON format: {"places":[...],"transitions":[{"name","pre","post"}],
// "initial":[...]}.
PetriNet parse_native(std::istream& in);
PetriNet parse_native_string(const std::string& text);
std::string to_native_json(const PetriNet& net);

}  // namespace cliffedge
