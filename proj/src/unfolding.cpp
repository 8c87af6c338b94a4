#include "cliffedge/unfolding.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace cliffedge {

const char* to_string(Order o) {
    return o == Order::Erv ? "erv" : "hfirst";
}

const char* to_string(Relation r) {
    switch (r) {
        case Relation::Equal: return "equal";
        case Relation::Causal: return "causal";
        case Relation::Conflict: return "conflict";
        case Relation::Concurrent: return "concurrent";
    }
    return "?";
}

struct PrefixData {
    const PetriNet* net = nullptr;
    Marking root;
    Order order = Order::Erv;
    std::uint32_t depth = 0;
    std::vector<Condition> conds;
    std::vector<Event> events;
    std::vector<std::uint32_t> initial_cut;
    // co[i] has universe i: bit j (j < i) set iff conditions i, j concurrent
    std::vector<Bitset> co;
    // cones[e] has universe e+1: bit f set iff f <= e (includes e itself)
    std::vector<Bitset> cones;
    std::map<std::pair<std::vector<std::uint32_t>, TransId>, std::uint32_t> identity;
};

namespace {

bool co_test(const PrefixData& d, std::uint32_t a, std::uint32_t b) {
    if (a == b) return false;
    return a > b ? d.co[a].test(b) : d.co[b].test(a);
}

bool cone_test(const PrefixData& d, std::uint32_t e, std::uint32_t f) {
    return f <= e && d.cones[e].test(f);
}

std::uint32_t new_condition(PrefixData& d, std::int32_t producer, PlaceId place) {
    std::uint32_t id = static_cast<std::uint32_t>(d.conds.size());
    Bitset row(id);
    if (producer < 0) {
        // initial conditions are created first and are pairwise concurrent
        for (std::uint32_t j = 0; j < id; ++j) row.set(j);
    } else {
        const Event& e = d.events[static_cast<std::uint32_t>(producer)];
        // concurrent to the new condition: everything concurrent to all of
        // the producer's inputs, minus those inputs, plus earlier siblings
        bool first = true;
        for (std::uint32_t b : e.preset) {
            if (first) {
                for (std::uint32_t j = 0; j < id; ++j)
                    if (co_test(d, b, j)) row.set(j);
                first = false;
            } else {
                row.for_each([&](std::size_t j) {
                    if (!co_test(d, b, static_cast<std::uint32_t>(j))) row.reset(j);
                });
            }
        }
        for (std::uint32_t b : e.preset)
            if (b < id) row.reset(b);
        for (std::uint32_t s : e.postset)
            if (s < id) row.set(s);
    }
    d.conds.push_back({id, producer, place, {}});
    d.co.push_back(std::move(row));
    return id;
}

// Creates the event with its causal bookkeeping; the caller attaches the
// postset conditions.
std::uint32_t new_event(PrefixData& d, std::vector<std::uint32_t> preset, TransId t,
                        std::uint32_t generation) {
    std::uint32_t id = static_cast<std::uint32_t>(d.events.size());
    Bitset cone_row(id + 1);
    cone_row.set(id);
    std::uint32_t level = 1;
    for (std::uint32_t b : preset) {
        std::int32_t pr = d.conds[b].producer;
        if (pr >= 0) {
            cone_row.merge_prefix(d.cones[static_cast<std::uint32_t>(pr)]);
            level = std::max(level, d.events[static_cast<std::uint32_t>(pr)].level + 1);
        }
    }
    for (std::uint32_t b : preset) d.conds[b].consumers.push_back(id);
    d.identity.emplace(std::make_pair(preset, t), id);
    Event ev;
    ev.id = id;
    ev.transition = t;
    ev.preset = std::move(preset);
    ev.generation = generation;
    ev.level = level;
    d.events.push_back(std::move(ev));
    d.cones.push_back(std::move(cone_row));
    return id;
}

std::vector<std::uint32_t> cut_ids(const PrefixData& d, const Bitset& config) {
    Bitset cutbits(d.conds.size());
    for (std::uint32_t c : d.initial_cut) cutbits.set(c);
    bool ok = true;
    config.for_each([&](std::size_t ei) {
        const Event& e = d.events[ei];
        for (std::uint32_t b : e.preset) {
            if (!cutbits.test(b)) ok = false;
            cutbits.reset(b);
        }
        for (std::uint32_t b : e.postset) cutbits.set(b);
    });
    if (!ok)
        throw InvalidConfigError(
            "event set is not a configuration (not causally closed or not conflict-free)");
    return cutbits.to_vector();
}

Marking fold_cut(const PrefixData& d, const std::vector<std::uint32_t>& cut_conds) {
    std::vector<PlaceId> places;
    places.reserve(cut_conds.size());
    for (std::uint32_t c : cut_conds) places.push_back(d.conds[c].place);
    std::sort(places.begin(), places.end());
    if (std::adjacent_find(places.begin(), places.end()) != places.end())
        throw InvalidConfigError("fold map is not injective on a cut (unsafe net?)");
    return Marking(std::move(places));
}

// --------------------------------------------------------------------------
// Decided-against enumeration: shared core of the decisional height and of
// the height-first order key.
// --------------------------------------------------------------------------

struct MemberView {
    const std::vector<std::uint32_t>* preset;
    TransId trans;
};

std::vector<PotentialEvent> decided_core(const PrefixData& d,
                                         const std::vector<std::uint32_t>& cond_universe,
                                         const std::vector<MemberView>& members) {
    const PetriNet& net = *d.net;

    std::map<PlaceId, std::vector<std::uint32_t>> by_place;
    for (std::uint32_t c : cond_universe) by_place[d.conds[c].place].push_back(c);

    Bitset member_pre(d.conds.size());
    std::set<std::pair<std::vector<std::uint32_t>, TransId>> member_keys;
    for (const MemberView& m : members) {
        for (std::uint32_t b : *m.preset) member_pre.set(b);
        member_keys.emplace(*m.preset, m.trans);
    }

    std::vector<PotentialEvent> out;
    std::vector<std::uint32_t> chosen;
    for (TransId t = 0; t < net.transition_count(); ++t) {
        const auto& pre = net.transition(t).pre;
        std::vector<const std::vector<std::uint32_t>*> slots;
        bool feasible = true;
        for (PlaceId q : pre) {
            auto it = by_place.find(q);
            if (it == by_place.end()) {
                feasible = false;
                break;
            }
            slots.push_back(&it->second);
        }
        if (!feasible) continue;

        chosen.clear();
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == slots.size()) {
                std::vector<std::uint32_t> preset = chosen;
                std::sort(preset.begin(), preset.end());
                bool shares = false;
                for (std::uint32_t b : preset)
                    if (member_pre.test(b)) {
                        shares = true;
                        break;
                    }
                if (!shares) return;
                if (member_keys.count({preset, t})) return;  // is itself a member
                out.push_back({std::move(preset), t});
                return;
            }
            for (std::uint32_t c : *slots[i]) {
                bool ok = true;
                for (std::uint32_t prev : chosen)
                    if (!co_test(d, prev, c)) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                chosen.push_back(c);
                rec(i + 1);
                chosen.pop_back();
            }
        };
        rec(0);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::uint32_t> universe_for(const PrefixData& d,
                                        const std::vector<std::uint32_t>& base,
                                        const std::vector<std::uint32_t>& member_events) {
    std::vector<std::uint32_t> u = base;
    for (std::uint32_t e : member_events)
        for (std::uint32_t c : d.events[e].postset) u.push_back(c);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

std::uint64_t height_of_members(const PrefixData& d, const std::vector<std::uint32_t>& base,
                                const std::vector<std::uint32_t>& member_events,
                                const PotentialEvent* virt) {
    std::vector<MemberView> members;
    members.reserve(member_events.size() + 1);
    for (std::uint32_t e : member_events)
        members.push_back({&d.events[e].preset, d.events[e].transition});
    if (virt) members.push_back({&virt->preset, virt->transition});
    return decided_core(d, universe_for(d, base, member_events), members).size();
}

ConfigKey key_of_members(const PrefixData& d, Order order,
                         const std::vector<std::uint32_t>& member_events,
                         const PotentialEvent* virt, std::uint32_t virt_level) {
    ConfigKey k;
    k.size = static_cast<std::uint32_t>(member_events.size() + (virt ? 1 : 0));

    std::uint32_t max_level = virt ? virt_level : 0;
    for (std::uint32_t e : member_events) max_level = std::max(max_level, d.events[e].level);
    k.foata.resize(max_level);

    k.parikh.reserve(k.size);
    for (std::uint32_t e : member_events) {
        k.parikh.push_back(d.events[e].transition);
        k.foata[d.events[e].level - 1].push_back(d.events[e].transition);
    }
    if (virt) {
        k.parikh.push_back(virt->transition);
        k.foata[virt_level - 1].push_back(virt->transition);
    }
    std::sort(k.parikh.begin(), k.parikh.end());
    for (auto& lvl : k.foata) std::sort(lvl.begin(), lvl.end());

    if (order == Order::HeightFirst)
        k.height = height_of_members(d, d.initial_cut, member_events, virt);
    return k;
}

}  // namespace

int compare_keys(const ConfigKey& a, const ConfigKey& b, Order order) {
    if (order == Order::HeightFirst && a.height != b.height)
        return a.height < b.height ? -1 : 1;
    if (a.size != b.size) return a.size < b.size ? -1 : 1;
    if (a.parikh != b.parikh) return a.parikh < b.parikh ? -1 : 1;
    if (a.foata != b.foata) return a.foata < b.foata ? -1 : 1;
    return 0;
}

// --------------------------------------------------------------------------
// Prefix accessors
// --------------------------------------------------------------------------

const PetriNet& Prefix::net() const { return *d_->net; }
const Marking& Prefix::root() const { return d_->root; }
Order Prefix::order() const { return d_->order; }
std::uint32_t Prefix::depth() const { return d_->depth; }
std::size_t Prefix::condition_count() const { return d_->conds.size(); }
std::size_t Prefix::event_count() const { return d_->events.size(); }
const Condition& Prefix::condition(std::uint32_t c) const { return d_->conds[c]; }
const Event& Prefix::event(std::uint32_t e) const { return d_->events[e]; }
const std::vector<std::uint32_t>& Prefix::initial_cut() const { return d_->initial_cut; }
bool Prefix::concurrent(std::uint32_t c1, std::uint32_t c2) const {
    return co_test(*d_, c1, c2);
}
bool Prefix::in_cone(std::uint32_t e, std::uint32_t f) const { return cone_test(*d_, e, f); }

std::optional<std::uint32_t> Prefix::find_event(const std::vector<std::uint32_t>& preset,
                                                TransId t) const {
    auto it = d_->identity.find({preset, t});
    if (it == d_->identity.end()) return std::nullopt;
    return it->second;
}

// --------------------------------------------------------------------------
// Builder
// --------------------------------------------------------------------------

namespace {

struct QEntry {
    ConfigKey key;
    PotentialEvent pe;
    std::uint64_t seq;
};

struct QCmp {
    Order order;
    bool operator()(const QEntry& a, const QEntry& b) const {
        int c = compare_keys(a.key, b.key, order);
        if (c != 0) return c < 0;
        if (a.pe.transition != b.pe.transition) return a.pe.transition < b.pe.transition;
        if (a.pe.preset != b.pe.preset) return a.pe.preset < b.pe.preset;
        return a.seq < b.seq;
    }
};

}  // namespace

struct PrefixBuilder::Impl {
    PrefixData d;
    UnfoldLimits limits;
    std::map<PlaceId, std::vector<std::uint32_t>> by_place;  // extendable conditions
    std::set<QEntry, QCmp> queue;
    std::set<std::pair<std::vector<std::uint32_t>, TransId>> queued;
    std::map<Marking, std::uint32_t> mark_table;  // marking -> discovering event
    std::uint64_t seq = 0;
    bool finished = false;

    Impl(const PetriNet& net, Order order, Marking root, UnfoldLimits lim)
        : limits(lim), queue(QCmp{order}) {
        d.net = &net;
        d.order = order;
        d.root = std::move(root);
        for (PlaceId p : d.root.places()) {
            std::uint32_t c = new_condition(d, -1, p);
            d.initial_cut.push_back(c);
            by_place[p].push_back(c);
        }
        for (std::uint32_t c : d.initial_cut) queue_extensions_with_max(c);
    }

    // Queues every extension whose newest preset condition is x; combinations
    // of older conditions were queued when their own newest member appeared.
    void queue_extensions_with_max(std::uint32_t x) {
        PlaceId px = d.conds[x].place;
        for (TransId t : d.net->consumers_of(px)) {
            const auto& pre = d.net->transition(t).pre;
            std::vector<std::vector<std::uint32_t>> slots;
            bool feasible = true;
            for (PlaceId q : pre) {
                if (q == px) {
                    slots.push_back({x});
                    continue;
                }
                std::vector<std::uint32_t> cands;
                auto it = by_place.find(q);
                if (it != by_place.end())
                    for (std::uint32_t c : it->second)
                        if (c < x && co_test(d, c, x)) cands.push_back(c);
                if (cands.empty()) {
                    feasible = false;
                    break;
                }
                slots.push_back(std::move(cands));
            }
            if (!feasible) continue;

            std::vector<std::uint32_t> chosen;
            std::function<void(std::size_t)> rec = [&](std::size_t i) {
                if (i == slots.size()) {
                    std::vector<std::uint32_t> preset = chosen;
                    std::sort(preset.begin(), preset.end());
                    push_candidate({std::move(preset), t});
                    return;
                }
                for (std::uint32_t c : slots[i]) {
                    bool ok = true;
                    for (std::uint32_t prev : chosen)
                        if (!co_test(d, prev, c)) {
                            ok = false;
                            break;
                        }
                    if (!ok) continue;
                    chosen.push_back(c);
                    rec(i + 1);
                    chosen.pop_back();
                }
            };
            rec(0);
        }
    }

    void push_candidate(PotentialEvent pe) {
        auto key = std::make_pair(pe.preset, pe.transition);
        if (d.identity.count(key) || queued.count(key)) return;
        queued.insert(key);

        Bitset past(d.events.size());
        std::uint32_t virt_level = 1;
        for (std::uint32_t b : pe.preset) {
            std::int32_t pr = d.conds[b].producer;
            if (pr >= 0) {
                past.merge_prefix(d.cones[static_cast<std::uint32_t>(pr)]);
                virt_level =
                    std::max(virt_level, d.events[static_cast<std::uint32_t>(pr)].level + 1);
            }
        }
        ConfigKey k = key_of_members(d, d.order, past.to_vector(), &pe, virt_level);
        queue.insert({std::move(k), std::move(pe), seq++});
    }

    Marking mark_of_new_cone(const PotentialEvent& pe) {
        Bitset past(d.events.size());
        for (std::uint32_t b : pe.preset) {
            std::int32_t pr = d.conds[b].producer;
            if (pr >= 0) past.merge_prefix(d.cones[static_cast<std::uint32_t>(pr)]);
        }
        Marking before = fold_cut(d, cut_ids(d, past));
        const Transition& tr = d.net->transition(pe.transition);
        std::vector<PlaceId> next;
        for (PlaceId p : before.places())
            if (!std::binary_search(tr.pre.begin(), tr.pre.end(), p)) next.push_back(p);
        for (PlaceId p : tr.post)
            if (!std::binary_search(next.begin(), next.end(), p)) next.push_back(p);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        return Marking(std::move(next));
    }

    std::uint32_t add_entry(QEntry entry) {
        Marking m = mark_of_new_cone(entry.pe);
        std::uint32_t e = new_event(d, entry.pe.preset, entry.pe.transition, d.depth);
        bool cutoff = (m == d.root) || mark_table.count(m) > 0;
        d.events[e].cutoff = cutoff;
        if (!cutoff) mark_table.emplace(std::move(m), e);

        for (PlaceId p : d.net->transition(entry.pe.transition).post) {
            std::uint32_t c = new_condition(d, static_cast<std::int32_t>(e), p);
            d.events[e].postset.push_back(c);
            if (!cutoff) by_place[p].push_back(c);
        }
        if (!cutoff)
            for (std::uint32_t c : d.events[e].postset) queue_extensions_with_max(c);

        if (d.events.size() > limits.max_events)
            throw BudgetError("prefix exceeds " + std::to_string(limits.max_events) +
                              " events");
        return e;
    }
};

PrefixBuilder::PrefixBuilder(const PetriNet& net, Order order, Marking root,
                             UnfoldLimits limits)
    : impl_(std::make_unique<Impl>(net, order, std::move(root), limits)) {}
PrefixBuilder::~PrefixBuilder() = default;
PrefixBuilder::PrefixBuilder(PrefixBuilder&&) noexcept = default;

bool PrefixBuilder::done() const { return impl_->queue.empty(); }

std::vector<PotentialEvent> PrefixBuilder::pending() const {
    std::vector<PotentialEvent> out;
    out.reserve(impl_->queue.size());
    for (const auto& q : impl_->queue) out.push_back(q.pe);
    return out;
}

std::uint32_t PrefixBuilder::add_smallest() {
    if (impl_->queue.empty()) throw Error("no pending extensions");
    QEntry entry = *impl_->queue.begin();
    impl_->queue.erase(impl_->queue.begin());
    return impl_->add_entry(std::move(entry));
}

std::uint32_t PrefixBuilder::add(const PotentialEvent& pe) {
    for (auto it = impl_->queue.begin(); it != impl_->queue.end(); ++it) {
        if (it->pe == pe) {
            QEntry entry = *it;
            impl_->queue.erase(it);
            return impl_->add_entry(std::move(entry));
        }
    }
    throw Error("extension is not pending");
}

Prefix PrefixBuilder::finish() {
    if (impl_->finished) throw Error("builder already finished");
    impl_->finished = true;
    return Prefix(std::make_shared<const PrefixData>(std::move(impl_->d)));
}

Prefix build_prefix(const PetriNet& net, Order order, const Marking& root,
                    UnfoldLimits limits) {
    PrefixBuilder b(net, order, root, limits);
    while (!b.done()) b.add_smallest();
    return b.finish();
}

Prefix build_prefix(const PetriNet& net, Order order, UnfoldLimits limits) {
    return build_prefix(net, order, net.initial_marking(), limits);
}

Prefix seed_prefix(const PetriNet& net, Order order, const Marking& root) {
    PrefixBuilder b(net, order, root, UnfoldLimits{});
    return b.finish();
}

// --------------------------------------------------------------------------
// Family extension (Πn -> Πn+1)
// --------------------------------------------------------------------------

namespace {

void graft(PrefixData& d, const std::vector<std::uint32_t>& host_cut,
           const PrefixData& copy, std::uint32_t gen, const UnfoldLimits& limits) {
    std::map<PlaceId, std::uint32_t> cut_by_place;
    for (std::uint32_t c : host_cut) cut_by_place[d.conds[c].place] = c;

    constexpr std::uint32_t kUnmapped = 0xffffffffu;
    std::vector<std::uint32_t> condmap(copy.conds.size(), kUnmapped);
    for (std::uint32_t ic : copy.initial_cut)
        condmap[ic] = cut_by_place.at(copy.conds[ic].place);

    for (std::uint32_t ce = 0; ce < copy.events.size(); ++ce) {
        const Event& cev = copy.events[ce];
        std::vector<std::uint32_t> hpre;
        hpre.reserve(cev.preset.size());
        for (std::uint32_t b : cev.preset) hpre.push_back(condmap[b]);
        std::sort(hpre.begin(), hpre.end());

        auto it = d.identity.find({hpre, cev.transition});
        if (it != d.identity.end()) {
            // grafts may overlap: reuse the event, align postsets by place
            const Event& hev = d.events[it->second];
            for (std::uint32_t cpost : cev.postset) {
                PlaceId pp = copy.conds[cpost].place;
                for (std::uint32_t hpost : hev.postset)
                    if (d.conds[hpost].place == pp) {
                        condmap[cpost] = hpost;
                        break;
                    }
            }
            continue;
        }

        std::uint32_t he = new_event(d, std::move(hpre), cev.transition, gen);
        d.events[he].cutoff = cev.cutoff;
        for (std::uint32_t cpost : cev.postset) {
            std::uint32_t hc =
                new_condition(d, static_cast<std::int32_t>(he), copy.conds[cpost].place);
            d.events[he].postset.push_back(hc);
            condmap[cpost] = hc;
        }
        if (d.events.size() > limits.max_events)
            throw BudgetError("family prefix exceeds " + std::to_string(limits.max_events) +
                              " events");
    }
}

}  // namespace

Prefix extend_family(const Prefix& p, UnfoldLimits limits) {
    const PrefixData& src = p.data();
    std::vector<EventSet> maxcfgs = maximal_configs(p, limits.max_configs);
    std::sort(maxcfgs.begin(), maxcfgs.end());

    auto next = std::make_shared<PrefixData>(src);
    next->depth = src.depth + 1;

    std::map<Marking, Prefix> rerooted;
    for (const EventSet& c : maxcfgs) {
        std::vector<std::uint32_t> cutc = cut_ids(src, c);
        Marking m = fold_cut(src, cutc);
        auto it = rerooted.find(m);
        if (it == rerooted.end())
            it = rerooted.emplace(m, build_prefix(*src.net, src.order, m, limits)).first;
        graft(*next, cutc, it->second.data(), next->depth, limits);
    }
    return Prefix(std::shared_ptr<const PrefixData>(std::move(next)));
}

// --------------------------------------------------------------------------
// Possible extensions, recomputed from scratch
// --------------------------------------------------------------------------

std::vector<PotentialEvent> possible_extensions(const Prefix& p) {
    const PrefixData& d = p.data();
    std::map<PlaceId, std::vector<std::uint32_t>> by_place;
    for (const Condition& c : d.conds) {
        bool ext =
            c.producer < 0 || !d.events[static_cast<std::uint32_t>(c.producer)].cutoff;
        if (ext) by_place[c.place].push_back(c.id);
    }

    std::vector<PotentialEvent> out;
    std::vector<std::uint32_t> chosen;
    for (TransId t = 0; t < d.net->transition_count(); ++t) {
        const auto& pre = d.net->transition(t).pre;
        std::vector<const std::vector<std::uint32_t>*> slots;
        bool feasible = true;
        for (PlaceId q : pre) {
            auto it = by_place.find(q);
            if (it == by_place.end()) {
                feasible = false;
                break;
            }
            slots.push_back(&it->second);
        }
        if (!feasible) continue;
        chosen.clear();
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == slots.size()) {
                std::vector<std::uint32_t> preset = chosen;
                std::sort(preset.begin(), preset.end());
                if (!d.identity.count({preset, t})) out.push_back({std::move(preset), t});
                return;
            }
            for (std::uint32_t c : *slots[i]) {
                bool ok = true;
                for (std::uint32_t prev : chosen)
                    if (!co_test(d, prev, c)) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                chosen.push_back(c);
                rec(i + 1);
                chosen.pop_back();
            }
        };
        rec(0);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// --------------------------------------------------------------------------
// Configuration queries
// --------------------------------------------------------------------------

EventSet cone(const Prefix& p, std::uint32_t e) {
    EventSet out(p.event_count());
    out.merge_prefix(p.data().cones[e]);
    return out;
}

EventSet stump(const Prefix& p, std::uint32_t e) {
    EventSet out = cone(p, e);
    out.reset(e);
    return out;
}

std::vector<std::uint32_t> cut(const Prefix& p, const EventSet& c) {
    return cut_ids(p.data(), c);
}

Marking mark(const Prefix& p, const EventSet& c) {
    return fold_cut(p.data(), cut_ids(p.data(), c));
}

Marking mark_of_cut(const Prefix& p, const std::vector<std::uint32_t>& cut_conds) {
    return fold_cut(p.data(), cut_conds);
}

EventSet crest(const Prefix& p, const EventSet& c) {
    const PrefixData& d = p.data();
    Bitset below(p.event_count());
    c.for_each([&](std::size_t e) {
        Bitset st(d.cones[e].universe());
        st.merge_prefix(d.cones[e]);
        st.reset(e);
        below.merge_prefix(st);
    });
    EventSet out = c;
    out.subtract(below);
    return out;
}

namespace {

// Do the causal pasts of two node sets contain conflicting consumption?
bool merged_conflict(const PrefixData& d, const Bitset& past_a, const Bitset& past_b) {
    std::map<std::uint32_t, std::uint32_t> consumer;
    bool clash = false;
    auto scan = [&](const Bitset& past) {
        past.for_each([&](std::size_t e) {
            for (std::uint32_t b : d.events[e].preset) {
                auto [it, fresh] = consumer.emplace(b, static_cast<std::uint32_t>(e));
                if (!fresh && it->second != e) clash = true;
            }
        });
    };
    scan(past_a);
    scan(past_b);
    return clash;
}

Bitset past_of_condition(const PrefixData& d, std::uint32_t c) {
    Bitset out(d.events.size());
    std::int32_t pr = d.conds[c].producer;
    if (pr >= 0) out.merge_prefix(d.cones[static_cast<std::uint32_t>(pr)]);
    return out;
}

bool cond_below_cond(const PrefixData& d, std::uint32_t c1, std::uint32_t c2) {
    // c1 < c2: some event on the way to c2 consumed c1
    std::int32_t pr = d.conds[c2].producer;
    if (pr < 0) return false;
    bool found = false;
    d.cones[static_cast<std::uint32_t>(pr)].for_each([&](std::size_t e) {
        const auto& pre = d.events[e].preset;
        if (std::binary_search(pre.begin(), pre.end(), c1)) found = true;
    });
    return found;
}

bool cond_below_event(const PrefixData& d, std::uint32_t c, std::uint32_t e) {
    bool found = false;
    d.cones[e].for_each([&](std::size_t f) {
        const auto& pre = d.events[f].preset;
        if (std::binary_search(pre.begin(), pre.end(), c)) found = true;
    });
    return found;
}

}  // namespace

Relation relation(const Prefix& p, NodeRef x, NodeRef y) {
    const PrefixData& d = p.data();
    if (x.is_event == y.is_event && x.id == y.id) return Relation::Equal;

    if (x.is_event && y.is_event) {
        // ids are topologically sorted, so only the larger can see the smaller
        if (cone_test(d, std::max(x.id, y.id), std::min(x.id, y.id)))
            return Relation::Causal;
        Bitset ca(d.events.size()), cb(d.events.size());
        ca.merge_prefix(d.cones[x.id]);
        cb.merge_prefix(d.cones[y.id]);
        return merged_conflict(d, ca, cb) ? Relation::Conflict : Relation::Concurrent;
    }
    if (!x.is_event && !y.is_event) {
        if (cond_below_cond(d, x.id, y.id) || cond_below_cond(d, y.id, x.id))
            return Relation::Causal;
        if (merged_conflict(d, past_of_condition(d, x.id), past_of_condition(d, y.id)))
            return Relation::Conflict;
        return Relation::Concurrent;
    }
    NodeRef ev = x.is_event ? x : y;
    NodeRef cd = x.is_event ? y : x;
    std::int32_t pr = d.conds[cd.id].producer;
    bool event_below = pr >= 0 && cone_test(d, static_cast<std::uint32_t>(pr), ev.id);
    if (event_below || cond_below_event(d, cd.id, ev.id)) return Relation::Causal;
    Bitset ce(d.events.size());
    ce.merge_prefix(d.cones[ev.id]);
    return merged_conflict(d, ce, past_of_condition(d, cd.id)) ? Relation::Conflict
                                                               : Relation::Concurrent;
}

Residual residual(const Prefix& p, const EventSet& c, const EventSet& c1) {
    if (!c1.subset_of(c))
        throw Error("residual: second configuration is not contained in the first");
    Residual r;
    r.base_cut = cut(p, c1);  // validates c1
    cut(p, c);                // validates c
    r.events = c;
    r.events.subtract(c1);
    return r;
}

ConfigKey config_key(const Prefix& p, const EventSet& c, Order order) {
    cut(p, c);  // validate
    return key_of_members(p.data(), order, c.to_vector(), nullptr, 0);
}

int order_compare(const Prefix& p, const EventSet& a, const EventSet& b, Order order) {
    return compare_keys(config_key(p, a, order), config_key(p, b, order), order);
}

std::vector<PotentialEvent> decided_against(const Prefix& p,
                                            const std::vector<std::uint32_t>& base,
                                            const EventSet& members) {
    const PrefixData& d = p.data();
    std::vector<std::uint32_t> evs = members.to_vector();
    std::vector<MemberView> views;
    views.reserve(evs.size());
    for (std::uint32_t e : evs) views.push_back({&d.events[e].preset, d.events[e].transition});
    return decided_core(d, universe_for(d, base, evs), views);
}

// --------------------------------------------------------------------------
// Enumeration
// --------------------------------------------------------------------------

void for_each_config(
    const Prefix& p, std::size_t max_configs, std::uint32_t max_generation,
    const std::function<Visit(const EventSet&, const std::vector<std::uint32_t>&, bool)>&
        visit) {
    const PrefixData& d = p.data();
    std::unordered_set<Bitset, BitsetHash> visited;

    EventSet cfg(d.events.size());
    Bitset cutbits(d.conds.size());
    for (std::uint32_t c : d.initial_cut) cutbits.set(c);

    auto enabled_events = [&]() {
        std::vector<std::uint32_t> out;
        cutbits.for_each([&](std::size_t c) {
            for (std::uint32_t e : d.conds[c].consumers) {
                if (cfg.test(e) || d.events[e].generation > max_generation) continue;
                bool en = true;
                for (std::uint32_t b : d.events[e].preset)
                    if (!cutbits.test(b)) {
                        en = false;
                        break;
                    }
                if (en) out.push_back(e);
            }
        });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };

    std::function<bool()> rec = [&]() -> bool {
        if (!visited.insert(cfg).second) return true;
        if (visited.size() > max_configs)
            throw BudgetError("configuration enumeration exceeds " +
                              std::to_string(max_configs) + " configurations");
        std::vector<std::uint32_t> en = enabled_events();
        Visit v = visit(cfg, cutbits.to_vector(), en.empty());
        if (v == Visit::Stop) return false;
        if (v == Visit::Prune) return true;
        for (std::uint32_t e : en) {
            cfg.set(e);
            for (std::uint32_t b : d.events[e].preset) cutbits.reset(b);
            for (std::uint32_t b : d.events[e].postset) cutbits.set(b);
            bool keep = rec();
            for (std::uint32_t b : d.events[e].postset) cutbits.reset(b);
            for (std::uint32_t b : d.events[e].preset) cutbits.set(b);
            cfg.reset(e);
            if (!keep) return false;
        }
        return true;
    };
    rec();
}

void for_each_config(
    const Prefix& p, std::size_t max_configs,
    const std::function<Visit(const EventSet&, const std::vector<std::uint32_t>&, bool)>&
        visit) {
    for_each_config(p, max_configs, 0xffffffffu, visit);
}

std::vector<EventSet> maximal_configs(const Prefix& p, std::size_t max_configs) {
    std::vector<EventSet> out;
    for_each_config(p, max_configs,
                    [&](const EventSet& c, const std::vector<std::uint32_t>&, bool maximal) {
                        if (maximal) out.push_back(c);
                        return Visit::Extend;
                    });
    return out;
}

// --------------------------------------------------------------------------
// Export
// --------------------------------------------------------------------------

std::string dump(const Prefix& p) {
    const PrefixData& d = p.data();
    std::ostringstream out;
    out << "prefix root=" << d.net->marking_name(d.root) << " order=" << to_string(d.order)
        << " depth=" << d.depth << " conditions=" << d.conds.size()
        << " events=" << d.events.size() << "\n";
    for (const Condition& c : d.conds) {
        out << "c" << c.id << " " << d.net->place_name(c.place) << " <- ";
        if (c.producer < 0)
            out << "init";
        else
            out << "e" << c.producer;
        out << "\n";
    }
    for (const Event& e : d.events) {
        out << "e" << e.id << " " << d.net->transition(e.transition).name << " pre=";
        for (std::size_t i = 0; i < e.preset.size(); ++i)
            out << (i ? "," : "") << "c" << e.preset[i];
        out << " cutoff=" << (e.cutoff ? 1 : 0) << " gen=" << e.generation << "\n";
    }
    return out.str();
}

std::string to_dot(const Prefix& p, const DotStyle& style) {
    const PrefixData& d = p.data();
    std::ostringstream out;
    out << "digraph prefix {\n  rankdir=TB;\n";
    for (const Condition& c : d.conds)
        out << "  c" << c.id << " [shape=circle,label=\"" << d.net->place_name(c.place)
            << "\"];\n";
    for (const Event& e : d.events) {
        out << "  e" << e.id << " [shape=box,label=\"" << d.net->transition(e.transition).name
            << "#" << e.generation << "\"";
        std::string dstyle;
        if (e.cutoff) dstyle = "dashed";
        if (style.tinted && style.tinted->test(e.id))
            dstyle += dstyle.empty() ? "filled" : ",filled";
        if (!dstyle.empty()) out << ",style=\"" << dstyle << "\"";
        if (style.tinted && style.tinted->test(e.id)) out << ",fillcolor=lightcoral";
        if (style.doubled && style.doubled->test(e.id)) out << ",peripheries=2";
        out << "];\n";
    }
    for (const Event& e : d.events) {
        for (std::uint32_t b : e.preset) out << "  c" << b << " -> e" << e.id << ";\n";
        for (std::uint32_t b : e.postset) out << "  e" << e.id << " -> c" << b << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace cliffedge
