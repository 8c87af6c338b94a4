#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cliffedge/reach.hpp"
#include "cliffedge/unfolding.hpp"
#include "fixtures.hpp"

using namespace cliffedge;
using cliffedge::testing::make_forkjoin;
using cliffedge::testing::make_relay;

namespace {

std::vector<std::uint32_t> events_labelled(const Prefix& p, const std::string& name) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t e = 0; e < p.event_count(); ++e)
        if (p.net().transition(p.event(e).transition).name == name) out.push_back(e);
    return out;
}

std::uint32_t the_event(const Prefix& p, const std::string& name) {
    auto v = events_labelled(p, name);
    REQUIRE(v.size() == 1);
    return v[0];
}

EventSet evset(const Prefix& p, std::initializer_list<std::uint32_t> ids) {
    EventSet s(p.event_count());
    for (auto e : ids) s.set(e);
    return s;
}

std::multiset<std::string> label_multiset(const Prefix& p, const EventSet& c) {
    std::multiset<std::string> out;
    c.for_each([&](std::size_t e) {
        out.insert(p.net().transition(p.event(e).transition).name);
    });
    return out;
}

// The completeness conditions of a finite prefix: every reachable marking is
// the mark of some configuration, and that configuration's cut enables an
// event image of every transition enabled at the marking.
void check_completeness(const PetriNet& net, const Prefix& p, const ReachGraph& g,
                        std::size_t budget = 500000) {
    std::map<Marking, std::vector<std::set<TransId>>> seen;  // mark -> cut-enabled sets
    for_each_config(p, budget,
                    [&](const EventSet&, const std::vector<std::uint32_t>& cutc, bool) {
                        Marking m = mark_of_cut(p, cutc);
                        std::set<TransId> at_cut;
                        Bitset cutbits(p.condition_count());
                        for (auto cc : cutc) cutbits.set(cc);
                        for (auto cc : cutc)
                            for (std::uint32_t e : p.condition(cc).consumers) {
                                bool en = true;
                                for (std::uint32_t b : p.event(e).preset)
                                    if (!cutbits.test(b)) en = false;
                                if (en) at_cut.insert(p.event(e).transition);
                            }
                        seen[m].push_back(std::move(at_cut));
                        return Visit::Extend;
                    });

    REQUIRE(seen.size() == g.nodes.size());
    for (const Marking& m : g.nodes) {
        REQUIRE(seen.count(m) == 1);
        std::set<TransId> want;
        for (TransId t : enabled(net, m)) want.insert(t);
        bool witnessed = false;
        for (const auto& have : seen[m])
            if (have == want) witnessed = true;
        CHECK(witnessed);
    }
}

}  // namespace

TEST_CASE("complete prefix of the running example") {
    PetriNet net = make_relay();
    Prefix p = build_prefix(net, Order::Erv);

    // the canonical prefix is smaller than the drawn unfolding: once theta
    // discovers {p7} and xi discovers {p8}, their mirror events zeta and eta
    // are cutoffs, and only one kappa (after theta) gets built
    CHECK(p.event_count() == 9);
    CHECK(p.condition_count() == 12);

    std::multiset<std::string> labels;
    std::multiset<std::string> cutoffs;
    for (std::uint32_t e = 0; e < p.event_count(); ++e) {
        labels.insert(net.transition(p.event(e).transition).name);
        if (p.event(e).cutoff)
            cutoffs.insert(net.transition(p.event(e).transition).name);
    }
    CHECK(labels == std::multiset<std::string>{"alpha", "beta", "gamma", "delta", "xi",
                                               "zeta", "eta", "theta", "kappa"});
    CHECK(cutoffs == std::multiset<std::string>{"zeta", "eta", "kappa"});
    for (std::uint32_t e : events_labelled(p, "kappa")) CHECK(p.event(e).cutoff);
}

TEST_CASE("single-transition net unfolds to one event, no cutoff") {
    PetriNet net({"p", "q"}, {{"t", {0}, {1}}}, Marking({0}));
    Prefix p = build_prefix(net, Order::Erv);
    CHECK(p.event_count() == 1);
    CHECK(p.condition_count() == 2);
    CHECK_FALSE(p.event(0).cutoff);
}

TEST_CASE("acyclic conflict net unfolds to itself") {
    PetriNet net = make_forkjoin();
    Prefix p = build_prefix(net, Order::Erv);
    CHECK(p.event_count() == net.transition_count());
    CHECK(p.condition_count() == net.place_count());
    for (std::uint32_t e = 0; e < p.event_count(); ++e) CHECK_FALSE(p.event(e).cutoff);
}

TEST_CASE("cone, stump, cut, mark, crest") {
    PetriNet net = make_relay();
    Prefix p = build_prefix(net, Order::Erv);
    std::uint32_t alpha = the_event(p, "alpha");
    std::uint32_t gamma = the_event(p, "gamma");
    std::uint32_t beta = the_event(p, "beta");
    std::uint32_t xi = the_event(p, "xi");

    CHECK(cone(p, xi) == evset(p, {alpha, gamma, xi}));
    CHECK(stump(p, xi) == evset(p, {alpha, gamma}));
    CHECK(cone(p, alpha) == evset(p, {alpha}));  // initially enabled => prime, crest {e}
    CHECK(crest(p, cone(p, alpha)) == evset(p, {alpha}));

    CHECK(mark(p, evset(p, {beta, gamma})) == net.marking_of({"p4", "p5"}));
    CHECK(mark(p, evset(p, {})) == net.initial_marking());
    CHECK(cut(p, evset(p, {})) == p.initial_cut());
    CHECK(mark(p, evset(p, {alpha, gamma, xi})) == net.marking_of({"p8"}));

    CHECK(crest(p, evset(p, {alpha, gamma, xi})) == evset(p, {xi}));
    CHECK(crest(p, evset(p, {alpha, gamma})) == evset(p, {alpha, gamma}));
    CHECK(crest(p, evset(p, {})).empty());

    CHECK_THROWS_AS(cut(p, evset(p, {xi})), InvalidConfigError);           // not closed
    CHECK_THROWS_AS(cut(p, evset(p, {alpha, beta})), InvalidConfigError);  // conflict
}

TEST_CASE("relations") {
    PetriNet net = make_relay();
    Prefix p = build_prefix(net, Order::Erv);
    std::uint32_t alpha = the_event(p, "alpha");
    std::uint32_t beta = the_event(p, "beta");
    std::uint32_t gamma = the_event(p, "gamma");
    std::uint32_t xi = the_event(p, "xi");

    CHECK(relation(p, NodeRef::event(alpha), NodeRef::event(beta)) == Relation::Conflict);
    CHECK(relation(p, NodeRef::event(alpha), NodeRef::event(gamma)) == Relation::Concurrent);
    CHECK(relation(p, NodeRef::event(alpha), NodeRef::event(xi)) == Relation::Causal);
    CHECK(relation(p, NodeRef::event(xi), NodeRef::event(alpha)) == Relation::Causal);
    CHECK(relation(p, NodeRef::event(xi), NodeRef::event(xi)) == Relation::Equal);

    // mixed event/condition pairs
    std::uint32_t alpha_out = p.event(alpha).postset[0];
    std::uint32_t beta_out = p.event(beta).postset[0];
    std::uint32_t p2_init = p.initial_cut()[1];
    CHECK(relation(p, NodeRef::event(alpha), NodeRef::cond(alpha_out)) == Relation::Causal);
    CHECK(relation(p, NodeRef::cond(p2_init), NodeRef::event(alpha)) == Relation::Concurrent);
    CHECK(relation(p, NodeRef::event(alpha), NodeRef::cond(beta_out)) == Relation::Conflict);
    CHECK(relation(p, NodeRef::cond(p2_init), NodeRef::event(gamma)) == Relation::Causal);

    // condition-level classification agrees with the co matrix
    for (std::uint32_t c1 = 0; c1 < p.condition_count(); ++c1)
        for (std::uint32_t c2 = 0; c2 < p.condition_count(); ++c2) {
            Relation r = relation(p, NodeRef::cond(c1), NodeRef::cond(c2));
            CHECK((r == Relation::Concurrent) == p.concurrent(c1, c2));
        }
}

TEST_CASE("possible extensions, step by step") {
    PetriNet net = make_relay();
    Prefix seed = seed_prefix(net, Order::Erv, net.initial_marking());
    CHECK(seed.event_count() == 0);

    auto pes = possible_extensions(seed);
    REQUIRE(pes.size() == 4);
    std::set<std::string> names;
    for (const auto& pe : pes) names.insert(net.transition(pe.transition).name);
    CHECK(names == std::set<std::string>{"alpha", "beta", "gamma", "delta"});

    PrefixBuilder b(net, Order::Erv, net.initial_marking());
    auto pending = b.pending();
    REQUIRE(pending.size() == 4);
    // drive alpha then gamma by hand; xi must show up over their outputs
    for (const auto& pe : pending)
        if (net.transition(pe.transition).name == "alpha") b.add(pe);
    for (const auto& pe : b.pending())
        if (net.transition(pe.transition).name == "gamma") {
            b.add(pe);
            break;
        }
    bool found_xi = false;
    for (const auto& pe : b.pending())
        if (net.transition(pe.transition).name == "xi") found_xi = true;
    CHECK(found_xi);

    Prefix partial = b.finish();
    auto again = possible_extensions(partial);
    bool xi_again = false;
    for (const auto& pe : again)
        if (net.transition(pe.transition).name == "xi") xi_again = true;
    CHECK(xi_again);

    // a finished complete prefix has nothing pending
    Prefix full = build_prefix(net, Order::Erv);
    CHECK(possible_extensions(full).empty());
}

TEST_CASE("builder queue agrees with the from-scratch extension scan") {
    PetriNet net = make_relay();
    PrefixBuilder b(net, Order::Erv, net.initial_marking());
    for (int steps = 0; steps < 3 && !b.done(); ++steps) b.add_smallest();
    std::vector<PotentialEvent> queued = b.pending();
    std::sort(queued.begin(), queued.end());
    Prefix partial = b.finish();
    CHECK(queued == possible_extensions(partial));
}

TEST_CASE("order comparisons") {
    PetriNet net = make_relay();
    Prefix p = build_prefix(net, Order::Erv);
    std::uint32_t alpha = the_event(p, "alpha");
    std::uint32_t beta = the_event(p, "beta");
    std::uint32_t gamma = the_event(p, "gamma");
    std::uint32_t delta = the_event(p, "delta");
    std::uint32_t xi = the_event(p, "xi");

    // subset implies strictly smaller
    CHECK(order_compare(p, evset(p, {alpha}), evset(p, {alpha, gamma}), Order::Erv) < 0);
    // equal size: the sorted transition words decide; alpha < beta
    CHECK(order_compare(p, evset(p, {alpha, delta}), evset(p, {beta, gamma}), Order::Erv) < 0);
    // height tie between {beta,gamma} (H=2) and {alpha,gamma,xi} (H=2): size decides
    ConfigKey k1 = config_key(p, evset(p, {beta, gamma}), Order::HeightFirst);
    ConfigKey k2 = config_key(p, evset(p, {alpha, gamma, xi}), Order::HeightFirst);
    CHECK(k1.height == 2);
    CHECK(k2.height == 2);
    CHECK(compare_keys(k1, k2, Order::HeightFirst) < 0);
    CHECK(order_compare(p, evset(p, {beta, gamma}), evset(p, {alpha, gamma, xi}),
                        Order::HeightFirst) < 0);
    CHECK(order_compare(p, evset(p, {alpha}), evset(p, {alpha}), Order::Erv) == 0);
}

TEST_CASE("maximal configurations of the running example's prefix") {
    PetriNet net = make_relay();
    Prefix p = build_prefix(net, Order::Erv);
    auto maxc = maximal_configs(p);
    REQUIRE(maxc.size() == 4);
    std::set<std::multiset<std::string>> got;
    for (const auto& c : maxc) got.insert(label_multiset(p, c));
    // zeta is a cutoff, so the run through it stops at {p7} in this prefix
    std::set<std::multiset<std::string>> want{
        {"alpha", "gamma", "xi"},
        {"beta", "delta", "eta"},
        {"beta", "gamma", "zeta"},
        {"alpha", "delta", "theta", "kappa"},
    };
    CHECK(got == want);
}

TEST_CASE("maximal configurations of the fork/join net") {
    PetriNet net = make_forkjoin();
    Prefix p = build_prefix(net, Order::Erv);
    auto maxc = maximal_configs(p);
    REQUIRE(maxc.size() == 4);
    std::set<std::multiset<std::string>> got;
    for (const auto& c : maxc) got.insert(label_multiset(p, c));
    std::set<std::multiset<std::string>> want{
        {"x", "y", "z", "alpha", "gamma"},
        {"x", "y", "z", "alpha", "delta"},
        {"x", "y", "z", "beta", "delta"},
        {"x", "y", "z", "beta", "gamma", "u"},
    };
    CHECK(got == want);
}

TEST_CASE("single-event prefix has one maximal configuration") {
    PetriNet net({"p", "q"}, {{"t", {0}, {1}}}, Marking({0}));
    Prefix p = build_prefix(net, Order::Erv);
    auto maxc = maximal_configs(p);
    REQUIRE(maxc.size() == 1);
    CHECK(maxc[0].count() == 1);
}

TEST_CASE("family extension grafts fresh copies after reset loops") {
    PetriNet net = make_relay();
    Prefix p0 = build_prefix(net, Order::Erv);
    Prefix p1 = extend_family(p0);

    CHECK(p1.depth() == 1);
    CHECK(p1.event_count() > p0.event_count());
    // one maximal configuration ends back at {p1,p2} and one at {p7}; each
    // grows a 9-event complete prefix, the {p8} cuts are deadlocks
    CHECK(p1.event_count() == 27);

    // generation-0 events keep their identity
    for (std::uint32_t e = 0; e < p0.event_count(); ++e) {
        CHECK(p1.event(e).transition == p0.event(e).transition);
        CHECK(p1.event(e).generation == 0);
    }
    int gen1_alphas = 0;
    for (std::uint32_t e = 0; e < p1.event_count(); ++e)
        if (p1.event(e).generation == 1 &&
            net.transition(p1.event(e).transition).name == "alpha")
            ++gen1_alphas;
    CHECK(gen1_alphas == 2);
}

TEST_CASE("family extension is idle on deadlocked cuts") {
    PetriNet net = make_forkjoin();
    Prefix p0 = build_prefix(net, Order::Erv);
    Prefix p1 = extend_family(p0);
    CHECK(p1.event_count() == p0.event_count());
    CHECK(p1.condition_count() == p0.condition_count());
    CHECK(p1.depth() == 1);
}

TEST_CASE("residuals") {
    PetriNet net = make_relay();
    // the kappa behind zeta's cutoff only exists in the extended family
    Prefix p = extend_family(build_prefix(net, Order::Erv));
    auto gen0 = [&](const std::string& name) {
        for (std::uint32_t e : events_labelled(p, name))
            if (p.event(e).generation == 0) return e;
        REQUIRE(false);
        return 0u;
    };
    std::uint32_t beta = gen0("beta");
    std::uint32_t gamma = gen0("gamma");
    std::uint32_t zeta = gen0("zeta");
    std::uint32_t kappa = 0;
    bool found = false;
    for (std::uint32_t e : events_labelled(p, "kappa"))
        if (p.in_cone(e, zeta)) {
            kappa = e;
            found = true;
        }
    REQUIRE(found);

    EventSet whole = evset(p, {beta, gamma, zeta, kappa});
    Residual r = residual(p, whole, evset(p, {beta, gamma}));
    CHECK(r.events == evset(p, {zeta, kappa}));
    CHECK(mark_of_cut(p, r.base_cut) == net.marking_of({"p4", "p5"}));

    CHECK(residual(p, whole, EventSet(p.event_count())).events == whole);  // C ⊖ ∅ = C
    CHECK(residual(p, whole, whole).events.empty());                       // C ⊖ C = ∅
    CHECK_THROWS_AS(residual(p, evset(p, {beta}), evset(p, {gamma})), Error);
}

TEST_CASE("prefix completeness and size bound, both orders") {
    for (const PetriNet& net : {make_relay(), make_forkjoin()}) {
        ReachGraph g = reach_graph(net);
        for (Order order : {Order::Erv, Order::HeightFirst}) {
            Prefix p = build_prefix(net, order);
            std::size_t noncut = 0;
            for (std::uint32_t e = 0; e < p.event_count(); ++e)
                if (!p.event(e).cutoff) ++noncut;
            CHECK(noncut <= g.nodes.size());
            check_completeness(net, p, g);
        }
    }
}

TEST_CASE("every cut is a co-set with an injective fold") {
    PetriNet net = make_relay();
    Prefix p = build_prefix(net, Order::Erv);
    for_each_config(p, 100000,
                    [&](const EventSet&, const std::vector<std::uint32_t>& cutc, bool) {
                        std::set<PlaceId> places;
                        for (std::size_t i = 0; i < cutc.size(); ++i) {
                            CHECK(places.insert(p.condition(cutc[i]).place).second);
                            for (std::size_t j = i + 1; j < cutc.size(); ++j)
                                CHECK(p.concurrent(cutc[i], cutc[j]));
                        }
                        return Visit::Extend;
                    });
}

TEST_CASE("orders refine subset and height is monotone along DFS chains") {
    PetriNet net = make_relay();
    Prefix p = extend_family(build_prefix(net, Order::Erv));
    int sampled = 0;
    std::vector<EventSet> chain;  // current DFS path from the root
    for_each_config(p, 50000,
                    [&](const EventSet& c, const std::vector<std::uint32_t>&, bool) {
                        while (!chain.empty() && !chain.back().subset_of(c)) chain.pop_back();
                        if (!chain.empty() && chain.back().count() + 1 == c.count()) {
                            ConfigKey a = config_key(p, chain.back(), Order::HeightFirst);
                            ConfigKey b = config_key(p, c, Order::HeightFirst);
                            CHECK(a.height <= b.height);
                            CHECK(compare_keys(a, b, Order::HeightFirst) < 0);
                            CHECK(compare_keys(a, b, Order::Erv) < 0);
                            ++sampled;
                        }
                        chain.push_back(c);
                        return sampled > 400 ? Visit::Stop : Visit::Extend;
                    });
    CHECK(sampled > 0);
}

TEST_CASE("construction is deterministic") {
    PetriNet net = make_relay();
    std::string d1 = dump(build_prefix(net, Order::Erv));
    std::string d2 = dump(build_prefix(net, Order::Erv));
    CHECK(d1 == d2);
    std::string f1 = dump(extend_family(build_prefix(net, Order::HeightFirst)));
    std::string f2 = dump(extend_family(build_prefix(net, Order::HeightFirst)));
    CHECK(f1 == f2);

    // byte-for-byte against the committed golden dump
    std::ifstream golden(std::string(TEST_DATA_DIR) + "/relay_pi0.dump");
    REQUIRE(golden.good());
    std::ostringstream want;
    want << golden.rdbuf();
    CHECK(d1 == want.str());
}

TEST_CASE("dot export mentions every node and dashes cutoffs") {
    PetriNet net = make_relay();
    Prefix p = build_prefix(net, Order::Erv);
    std::string dot = to_dot(p);
    CHECK(dot.find("shape=circle") != std::string::npos);
    CHECK(dot.find("shape=box") != std::string::npos);
    CHECK(dot.find("dashed") != std::string::npos);
    CHECK(dot.find("kappa#0") != std::string::npos);
}
