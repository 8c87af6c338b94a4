#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cliffedge/petri_net.hpp"
#include "cliffedge/reach.hpp"
#include "fixtures.hpp"

using namespace cliffedge;
using cliffedge::testing::make_relay;

namespace {

std::string read_file(const std::string& name) {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("llnet: running example parses") {
    PetriNet net = parse_llnet_string(read_file("relay.ll_net"));
    CHECK(net.place_count() == 8);
    CHECK(net.transition_count() == 9);
    CHECK(net.initial_marking() == net.marking_of({"p1", "p2"}));

    const Transition& xi = net.transition(net.transition_id("xi"));
    CHECK(xi.pre == std::vector<PlaceId>{net.place_id("p3"), net.place_id("p5")});
    CHECK(xi.post == std::vector<PlaceId>{net.place_id("p8")});

    // must be the same net as the programmatic fixture
    PetriNet fixture = make_relay();
    CHECK(to_native_json(net) == to_native_json(fixture));
}

TEST_CASE("llnet: attribute suffixes are ignored") {
    PetriNet net = parse_llnet_string(read_file("suffixes.ll_net"));
    CHECK(net.place_count() == 2);
    CHECK(net.initial_marking() == net.marking_of({"on"}));
}

TEST_CASE("llnet: net without transitions is valid and has one marking") {
    PetriNet net = parse_llnet_string(read_file("no_transitions.ll_net"));
    CHECK(net.transition_count() == 0);
    ReachGraph g = reach_graph(net);
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
}

TEST_CASE("llnet: errors carry line numbers and identifiers") {
    CHECK_THROWS_WITH_AS(parse_llnet_string(read_file("bad_undeclared_arc.ll_net")),
                         doctest::Contains("undeclared place id 9"), ParseError);
    CHECK_THROWS_AS(parse_llnet_string(read_file("bad_two_tokens.ll_net")), ParseError);
    CHECK_THROWS_WITH_AS(parse_llnet_string(read_file("bad_dup_place.ll_net")),
                         doctest::Contains("p1"), ValidationError);
    CHECK_THROWS_AS(parse_llnet_string("PTNet\nPL\n1\"p\"M1\n"), ParseError);
}

TEST_CASE("native: round trip is an isomorphism") {
    PetriNet net = cliffedge::testing::make_forkjoin();
    CHECK(net.place_count() == 10);
    CHECK(net.transition_count() == 8);
    std::string json = to_native_json(net);
    PetriNet back = parse_native_string(json);
    CHECK(to_native_json(back) == json);
}

TEST_CASE("native: duplicate place name rejected") {
    CHECK_THROWS_AS(parse_native_string(R"({"places":["a","a"],"transitions":[
        {"name":"t","pre":["a"],"post":["a"]}],"initial":["a"]})"),
                    ParseError);
}

TEST_CASE("native: degenerate transitions rejected") {
    CHECK_THROWS_AS(parse_native_string(R"({"places":["a"],"transitions":[
        {"name":"t","pre":[],"post":["a"]}],"initial":["a"]})"),
                    ValidationError);
}

TEST_CASE("enabled matches the running example's branching") {
    PetriNet net = make_relay();
    auto names = [&](const Marking& m) {
        std::vector<std::string> out;
        for (TransId t : enabled(net, m)) out.push_back(net.transition(t).name);
        return out;
    };
    CHECK(names(net.marking_of({"p1", "p2"})) ==
          std::vector<std::string>{"alpha", "beta", "gamma", "delta"});
    CHECK(names(net.marking_of({"p8"})).empty());
    CHECK(names(Marking{}).empty());
}

TEST_CASE("fire follows the set-based rule") {
    PetriNet net = make_relay();
    Marking m0 = net.marking_of({"p1", "p2"});
    CHECK(fire(net, m0, net.transition_id("alpha")) == net.marking_of({"p2", "p3"}));
    CHECK(fire(net, net.marking_of({"p7"}), net.transition_id("kappa")) ==
          net.marking_of({"p1", "p2"}));
    CHECK(fire(net, net.marking_of({"p3", "p5"}), net.transition_id("xi")) ==
          net.marking_of({"p8"}));
    CHECK_THROWS_AS(fire(net, net.marking_of({"p8"}), net.transition_id("alpha")),
                    NotEnabledError);
}
