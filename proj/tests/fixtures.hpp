#pragma once

#include <string>
#include <vector>

#include "cliffedge/petri_net.hpp"

namespace cliffedge::testing {

// Running example: two tokens make independent binary choices; the four
// pairing transitions either dead-end in p8 or hand the token pair to the
// reset transition kappa, which restarts the loop.
//
//   alpha: p1->p3   beta: p1->p4   gamma: p2->p5   delta: p2->p6
//   xi: p3,p5->p8   zeta: p4,p5->p7   eta: p4,p6->p8   theta: p3,p6->p7
//   kappa: p7->p1,p2          M0 = {p1,p2}
inline PetriNet make_relay() {
    std::vector<std::string> places{"p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8"};
    auto P = [&](const char* n) -> PlaceId {
        for (PlaceId i = 0; i < places.size(); ++i)
            if (places[i] == n) return i;
        throw ValidationError("fixture place");
    };
    std::vector<Transition> ts{
        {"alpha", {P("p1")}, {P("p3")}},
        {"beta", {P("p1")}, {P("p4")}},
        {"gamma", {P("p2")}, {P("p5")}},
        {"delta", {P("p2")}, {P("p6")}},
        {"xi", {P("p3"), P("p5")}, {P("p8")}},
        {"zeta", {P("p4"), P("p5")}, {P("p7")}},
        {"eta", {P("p4"), P("p6")}, {P("p8")}},
        {"theta", {P("p3"), P("p6")}, {P("p7")}},
        {"kappa", {P("p7")}, {P("p1"), P("p2")}},
    };
    return PetriNet(places, ts, Marking({P("p1"), P("p2")}));
}

// Fork/choice/join occurrence net used for shaving and protectedness cases:
// x forks into two branches, each branch picks one of two transitions, and
// one particular pair (beta, gamma) can join through u.
//
//   x: b1->b2,b3   y: b2->b4   z: b3->b5
//   alpha: b4->b6   beta: b4->b7   gamma: b5->b8   delta: b5->b9
//   u: b7,b8->b10          M0 = {b1}
inline PetriNet make_forkjoin() {
    std::vector<std::string> places{"b1", "b2", "b3", "b4", "b5",
                                    "b6", "b7", "b8", "b9", "b10"};
    auto P = [&](const char* n) -> PlaceId {
        for (PlaceId i = 0; i < places.size(); ++i)
            if (places[i] == n) return i;
        throw ValidationError("fixture place");
    };
    std::vector<Transition> ts{
        {"x", {P("b1")}, {P("b2"), P("b3")}},
        {"y", {P("b2")}, {P("b4")}},
        {"z", {P("b3")}, {P("b5")}},
        {"alpha", {P("b4")}, {P("b6")}},
        {"beta", {P("b4")}, {P("b7")}},
        {"gamma", {P("b5")}, {P("b8")}},
        {"delta", {P("b5")}, {P("b9")}},
        {"u", {P("b7"), P("b8")}, {P("b10")}},
    };
    return PetriNet(places, ts, Marking({P("b1")}));
}

// Small conflict-chain net for decisional-height cases. y and z compete for
// b2; alpha/beta compete for b3; beta/gamma compete for b4.
//
//   x: b1->b3   y: b2->b4   z: b2->b5
//   alpha: b3->b6   beta: b3,b4->b7   gamma: b4->b8     M0 = {b1,b2}
inline PetriNet make_choice_chain() {
    std::vector<std::string> places{"b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8"};
    auto P = [&](const char* n) -> PlaceId {
        for (PlaceId i = 0; i < places.size(); ++i)
            if (places[i] == n) return i;
        throw ValidationError("fixture place");
    };
    std::vector<Transition> ts{
        {"x", {P("b1")}, {P("b3")}},
        {"y", {P("b2")}, {P("b4")}},
        {"z", {P("b2")}, {P("b5")}},
        {"alpha", {P("b3")}, {P("b6")}},
        {"beta", {P("b3"), P("b4")}, {P("b7")}},
        {"gamma", {P("b4")}, {P("b8")}},
    };
    return PetriNet(places, ts, Marking({P("b1"), P("b2")}));
}

}  // namespace cliffedge::testing
