#include "cliffedge/protect.hpp"

#include <algorithm>

namespace cliffedge {

const char* to_string(HeightMode m) {
    return m == HeightMode::DecidedAgainst ? "decided" : "literal";
}

bool strict_conflict(const Prefix& p, const EventSet& c, std::uint32_t e, std::uint32_t e2) {
    if (!c.test(e)) throw ValidationError("strict conflict: event is not in the configuration");
    if (e == e2) return false;
    const auto& a = p.event(e).preset;
    const auto& b = p.event(e2).preset;
    bool shared = false;
    for (std::uint32_t x : a)
        if (std::binary_search(b.begin(), b.end(), x)) {
            shared = true;
            break;
        }
    if (!shared) return false;
    return stump(p, e2).subset_of(c);
}

namespace {

std::uint64_t count_mode(const Prefix& p, const std::vector<PotentialEvent>& against,
                         const EventSet& members, HeightMode mode) {
    if (mode == HeightMode::DecidedAgainst) return against.size();
    // literal: members that share a preset condition with a decided-against
    // event
    std::uint64_t n = 0;
    members.for_each([&](std::size_t e) {
        const auto& pre = p.event(e).preset;
        for (const PotentialEvent& pe : against) {
            bool shared = false;
            for (std::uint32_t b : pe.preset)
                if (std::binary_search(pre.begin(), pre.end(), b)) {
                    shared = true;
                    break;
                }
            if (shared) {
                ++n;
                return;
            }
        }
    });
    return n;
}

}  // namespace

std::uint64_t height(const Prefix& p, const EventSet& c, HeightMode mode) {
    return count_mode(p, decided_against(p, p.initial_cut(), c), c, mode);
}

std::uint64_t residual_height(const Prefix& p, const Residual& r, HeightMode mode) {
    return count_mode(p, decided_against(p, r.base_cut, r.events), r.events, mode);
}

std::vector<EventSet> mdc_of(DoomAnalyzer& an, const Prefix& scope, std::size_t max_configs) {
    return enumerate_min_doomed(an, scope, max_configs);
}

Protectedness protectedness_with_scope(DoomAnalyzer& an, const Marking& m,
                                       const Prefix& scope, HeightMode mode) {
    Protectedness out;
    out.scope = scope;
    if (an.status(m).value != MarkStatus::Free) {
        out.value = 0;
        out.doomed_self = true;
        return out;
    }
    if (!(scope.root() == m))
        throw ValidationError("protectedness scope is not rooted at the queried marking");

    std::vector<EventSet> mdc = mdc_of(an, scope, an.budgets().max_configs);
    if (mdc.empty()) {
        // unbounded only when the doom memo certifies that no doomed or bad
        // marking is reachable at all
        ReachGraph g = reach_graph(an.net(), m);
        for (const Marking& mm : g.nodes)
            if (an.status(mm).value != MarkStatus::Free)
                throw ScopeError(
                    "scope prefix shows no minimally doomed configuration although " +
                    an.net().marking_name(mm) +
                    " is reachable and not free; enlarge the analysis scope");
        return out;  // value stays empty: unbounded
    }

    std::uint64_t best = 0;
    bool have = false;
    std::vector<std::uint64_t> hs(mdc.size());
    for (std::size_t i = 0; i < mdc.size(); ++i) {
        hs[i] = height(scope, mdc[i], mode);
        if (!have || hs[i] < best) {
            best = hs[i];
            have = true;
        }
    }
    out.value = best;
    for (std::size_t i = 0; i < mdc.size(); ++i)
        if (hs[i] == best) out.witnesses.push_back(mdc[i]);
    return out;
}

Protectedness protectedness(DoomAnalyzer& an, const Marking& m, HeightMode mode) {
    if (an.status(m).value != MarkStatus::Free) {
        Protectedness out;
        out.value = 0;
        out.doomed_self = true;
        return out;
    }
    Prefix scope = build_prefix(an.net(), Order::HeightFirst, m, an.budgets().unfold);
    return protectedness_with_scope(an, m, scope, mode);
}

Protectedness protectedness_pi2(DoomAnalyzer& an, const Marking& m, HeightMode mode) {
    if (an.status(m).value != MarkStatus::Free) {
        Protectedness out;
        out.value = 0;
        out.doomed_self = true;
        return out;
    }
    Prefix scope = build_prefix(an.net(), Order::Erv, m, an.budgets().unfold);
    scope = extend_family(scope, an.budgets().unfold);
    scope = extend_family(scope, an.budgets().unfold);
    return protectedness_with_scope(an, m, scope, mode);
}

Protectedness protectedness(DoomAnalyzer& an, const Prefix& host, const EventSet& c,
                            HeightMode mode) {
    return protectedness(an, mark(host, c), mode);
}

}  // namespace cliffedge
