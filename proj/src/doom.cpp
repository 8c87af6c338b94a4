#include "cliffedge/doom.hpp"

#include <algorithm>
#include <random>

namespace cliffedge {

std::vector<TransId> spoilers(const PetriNet& net, TransId t) {
    std::vector<TransId> out;
    for (TransId u = 0; u < net.transition_count(); ++u) {
        const auto& a = net.transition(t).pre;
        const auto& b = net.transition(u).pre;
        bool shared = false;
        for (PlaceId p : a)
            if (std::binary_search(b.begin(), b.end(), p)) {
                shared = true;
                break;
            }
        if (shared) out.push_back(u);
    }
    return out;
}

std::vector<std::uint32_t> event_spoilers(const Prefix& p, std::uint32_t e) {
    std::set<std::uint32_t> out;
    for (std::uint32_t b : p.event(e).preset)
        for (std::uint32_t f : p.condition(b).consumers) out.insert(f);
    return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// DoomAnalyzer
// ---------------------------------------------------------------------------

DoomAnalyzer::DoomAnalyzer(const PetriNet& net, std::set<Marking> bad, Order order,
                           std::uint32_t family_depth, DoomBudgets budgets)
    : net_(net), bad_(std::move(bad)), order_(order), family_depth_(family_depth),
      budgets_(budgets) {
    if (family_depth_ < 1)
        throw ValidationError("doom checks need a family depth of at least 1");
}

Prefix DoomAnalyzer::family(const Marking& m) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = families_.find(m);
        if (it != families_.end()) return it->second;
    }
    Prefix p = build_prefix(net_, order_, m, budgets_.unfold);
    for (std::uint32_t n = 0; n < family_depth_; ++n) p = extend_family(p, budgets_.unfold);
    std::lock_guard<std::mutex> lock(mu_);
    return families_.emplace(m, std::move(p)).first->second;
}

namespace {

struct Collected {
    EventSet events;
    std::vector<std::uint32_t> cutc;
    Marking mark;
    bool gen0;
};

}  // namespace

// The freeness test: the root marking of `fam` is free iff some
// configuration c1 of the Π0 layer extends, within the family, to c2 with
// the same (non-bad) marking such that no transition stays enabled on the
// part of cut(c1) that c2 \ c1 leaves untouched. A deadlocked cut passes
// with c2 == c1.
DoomVerdict DoomAnalyzer::search(const Prefix& fam) const {
    const Marking& root = fam.root();
    if (bad_.count(root)) return {MarkStatus::Bad, fam, std::nullopt};

    std::vector<Collected> cfgs;
    std::map<Marking, std::vector<std::size_t>> groups;
    for_each_config(
        fam, budgets_.max_configs,
        [&](const EventSet& c, const std::vector<std::uint32_t>& cutc, bool) {
            Marking m = mark_of_cut(fam, cutc);
            if (bad_.count(m)) return Visit::Prune;  // bad configs stay bad upward
            bool gen0 = true;
            c.for_each([&](std::size_t e) {
                if (fam.event(e).generation != 0) gen0 = false;
            });
            groups[m].push_back(cfgs.size());
            cfgs.push_back({c, cutc, std::move(m), gen0});
            return Visit::Extend;
        });

    // c1 candidates ascending in the Erv order; first witness wins
    std::vector<std::size_t> c1s;
    for (std::size_t i = 0; i < cfgs.size(); ++i)
        if (cfgs[i].gen0) c1s.push_back(i);
    std::vector<ConfigKey> keys(cfgs.size());
    for (std::size_t i : c1s) keys[i] = config_key(fam, cfgs[i].events, Order::Erv);
    std::sort(c1s.begin(), c1s.end(), [&](std::size_t a, std::size_t b) {
        int c = compare_keys(keys[a], keys[b], Order::Erv);
        if (c != 0) return c < 0;
        return cfgs[a].events < cfgs[b].events;
    });

    for (std::size_t i : c1s) {
        const Collected& c1 = cfgs[i];
        for (std::size_t j : groups[c1.mark]) {
            const Collected& c2 = cfgs[j];
            if (!c1.events.subset_of(c2.events)) continue;

            Bitset consumed(fam.condition_count());
            EventSet extra = c2.events;
            extra.subtract(c1.events);
            extra.for_each([&](std::size_t e) {
                for (std::uint32_t b : fam.event(e).preset) consumed.set(b);
            });
            std::vector<PlaceId> rest;
            for (std::uint32_t b : c1.cutc)
                if (!consumed.test(b)) rest.push_back(fam.condition(b).place);
            Marking untouched(std::move(rest));
            bool spoiled_all = true;
            for (TransId t = 0; t < net_.transition_count(); ++t)
                if (is_enabled(net_, untouched, t)) {
                    spoiled_all = false;
                    break;
                }
            if (spoiled_all)
                return {MarkStatus::Free, fam, std::make_pair(c1.events, c2.events)};
        }
    }
    return {MarkStatus::Doomed, fam, std::nullopt};
}

DoomVerdict DoomAnalyzer::status(const Marking& m) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(m);
        if (it != memo_.end()) return it->second;
    }
    Prefix fam = family(m);
    checks_.fetch_add(1);
    DoomVerdict v = search(fam);
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.emplace(m, std::move(v)).first->second;
}

MarkStatus DoomAnalyzer::status_of_config(const Prefix& host, const EventSet& c) {
    return status(mark(host, c)).value;
}

DoomVerdict DoomAnalyzer::is_free(const Prefix& host, const EventSet& c,
                                  const Prefix& fam) {
    Marking m = mark(host, c);
    if (!(m == fam.root()))
        throw FamilyMismatchError("family rooted at " + net_.marking_name(fam.root()) +
                                  " cannot classify a configuration with marking " +
                                  net_.marking_name(m));
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(m);
        if (it != memo_.end()) return it->second;
    }
    checks_.fetch_add(1);
    DoomVerdict v = search(fam);
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.emplace(std::move(m), std::move(v)).first->second;
}

void DoomAnalyzer::override_status(const Marking& m, MarkStatus value) {
    std::lock_guard<std::mutex> lock(mu_);
    memo_[m] = DoomVerdict{value, std::nullopt, std::nullopt};
}

// ---------------------------------------------------------------------------
// Shaving and minimal bad configurations
// ---------------------------------------------------------------------------

bool unchallenged(const Prefix& p, std::uint32_t e) {
    for (std::uint32_t b : p.event(e).preset)
        if (p.condition(b).consumers.size() != 1) return false;
    return true;
}

EventSet shave(const Prefix& p, EventSet c) {
    for (;;) {
        EventSet cr = crest(p, c);
        bool removed = false;
        cr.for_each([&](std::size_t e) {
            if (unchallenged(p, static_cast<std::uint32_t>(e))) {
                c.reset(e);
                removed = true;
            }
        });
        if (!removed) return c;
    }
}

std::vector<EventSet> min_bad_configs(const Prefix& family, const std::set<Marking>& bad,
                                      std::size_t max_configs) {
    std::vector<EventSet> hits;
    for_each_config(family, max_configs, 0,
                    [&](const EventSet& c, const std::vector<std::uint32_t>& cutc, bool) {
                        if (bad.count(mark_of_cut(family, cutc))) {
                            hits.push_back(c);
                            return Visit::Prune;
                        }
                        return Visit::Extend;
                    });
    std::vector<EventSet> out;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        bool minimal = true;
        for (std::size_t j = 0; j < hits.size(); ++j)
            if (j != i && hits[j].subset_of(hits[i]) && !(hits[j] == hits[i])) {
                minimal = false;
                break;
            }
        if (minimal) out.push_back(hits[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// MinDoo worklist
// ---------------------------------------------------------------------------

MdcSet mindoo(DoomAnalyzer& an, const Prefix& family,
              std::optional<std::uint64_t> shuffle_seed) {
    auto doomed = [&](const EventSet& c) {
        return an.status_of_config(family, c) != MarkStatus::Free;
    };

    auto as_result = [&](std::vector<EventSet> sets) {
        MdcSet out{family, {}};
        std::sort(sets.begin(), sets.end(), [](const EventSet& a, const EventSet& b) {
            if (a.count() != b.count()) return a.count() < b.count();
            return a < b;
        });
        for (EventSet& s : sets) {
            MdcEntry e{s, crest(family, s), mark(family, s)};
            out.configs.push_back(std::move(e));
        }
        return out;
    };

    std::set<EventSet> wl;
    std::set<EventSet> seen;
    bool all_doomed = false;
    auto enqueue = [&](const EventSet& c) {
        EventSet s = shave(family, c);
        if (s.empty()) {
            all_doomed = true;  // the empty configuration is doomed
            return;
        }
        if (seen.insert(s).second) wl.insert(std::move(s));
    };

    for (const EventSet& c : min_bad_configs(family, an.bad(), an.budgets().max_configs))
        enqueue(c);
    if (all_doomed) return as_result({EventSet(family.event_count())});

    std::optional<std::mt19937_64> rng;
    if (shuffle_seed) rng.emplace(*shuffle_seed);

    std::set<EventSet> out;
    while (!wl.empty()) {
        auto it = wl.begin();
        if (rng) {
            std::uniform_int_distribution<std::size_t> pick(0, wl.size() - 1);
            std::advance(it, pick(*rng));
        }
        EventSet c = *it;
        wl.erase(it);

        EventSet cr = crest(family, c);
        EventSet base = c;
        base.subtract(cr);

        bool addit = true;
        if (doomed(base)) {
            addit = false;
            enqueue(base);
        } else {
            std::vector<std::uint32_t> crest_events = cr.to_vector();
            for (std::uint32_t e : crest_events) {
                EventSet rubbed = c;
                rubbed.reset(e);
                if (doomed(rubbed)) {
                    addit = false;
                    enqueue(rubbed);
                }
            }
        }
        if (all_doomed) return as_result({EventSet(family.event_count())});
        if (addit) out.insert(c);
    }
    return as_result({out.begin(), out.end()});
}

// ---------------------------------------------------------------------------
// Exhaustive minimally-doomed scan, cliff-edges and ridges
// ---------------------------------------------------------------------------

std::vector<EventSet> enumerate_min_doomed(DoomAnalyzer& an, const Prefix& scope,
                                           std::size_t max_configs) {
    std::vector<EventSet> frontier;
    for_each_config(scope, max_configs,
                    [&](const EventSet& c, const std::vector<std::uint32_t>& cutc, bool) {
                        MarkStatus s = an.status(mark_of_cut(scope, cutc)).value;
                        if (s != MarkStatus::Free) {
                            frontier.push_back(c);
                            return Visit::Prune;  // supersets cannot be minimal
                        }
                        return Visit::Extend;
                    });
    std::vector<EventSet> out;
    for (const EventSet& c : frontier) {
        bool minimal = true;
        EventSet cr = crest(scope, c);
        cr.for_each([&](std::size_t e) {
            if (!minimal) return;
            EventSet rubbed = c;
            rubbed.reset(e);
            if (an.status_of_config(scope, rubbed) != MarkStatus::Free) minimal = false;
        });
        if (minimal) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const EventSet& a, const EventSet& b) {
        if (a.count() != b.count()) return a.count() < b.count();
        return a < b;
    });
    return out;
}

namespace {

std::vector<Ridge> group_ridges(const Prefix& p, const std::vector<EventSet>& crests) {
    std::map<std::vector<TransId>, Ridge> by_fold;
    for (const EventSet& cr : crests) {
        std::vector<TransId> fold;
        cr.for_each([&](std::size_t e) { fold.push_back(p.event(e).transition); });
        std::sort(fold.begin(), fold.end());
        fold.erase(std::unique(fold.begin(), fold.end()), fold.end());
        auto [it, fresh] = by_fold.emplace(fold, Ridge{fold, {}});
        bool dup = false;
        for (const EventSet& w : it->second.witnesses)
            if (w == cr) dup = true;
        if (!dup) it->second.witnesses.push_back(cr);
    }
    std::vector<Ridge> out;
    for (auto& [fold, r] : by_fold) out.push_back(std::move(r));
    return out;
}

}  // namespace

std::vector<Ridge> ridges(const MdcSet& m) {
    std::vector<EventSet> crests;
    crests.reserve(m.configs.size());
    for (const MdcEntry& e : m.configs) crests.push_back(e.crest_events);
    return group_ridges(m.prefix, crests);
}

std::vector<Ridge> ridge_complete(DoomAnalyzer& an, const Prefix& family,
                                  std::size_t max_configs) {
    std::vector<EventSet> crests;
    for (const EventSet& c : enumerate_min_doomed(an, family, max_configs))
        crests.push_back(crest(family, c));
    return group_ridges(family, crests);
}

}  // namespace cliffedge
