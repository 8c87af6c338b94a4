#include "cliffedge/reach.hpp"

#include <algorithm>
#include <deque>

#include <json.hpp>

namespace cliffedge {

std::uint32_t ReachGraph::node_of(const Marking& m) const {
    auto it = index.find(m);
    if (it == index.end()) throw ValidationError("marking not in reachability graph");
    return it->second;
}

namespace {

void check_safe(const PetriNet& net, const Marking& m, TransId t) {
    // (M ∩ post(t)) ⊆ pre(t)
    const Transition& tr = net.transition(t);
    for (PlaceId p : tr.post) {
        if (m.contains(p) &&
            !std::binary_search(tr.pre.begin(), tr.pre.end(), p))
            throw SafetyError("safety violation: firing '" + tr.name + "' at " +
                              net.marking_name(m) + " would duplicate token on '" +
                              net.place_name(p) + "'");
    }
}

}  // namespace

ReachGraph reach_graph(const PetriNet& net, const Marking& root, std::size_t max_nodes) {
    ReachGraph g;
    g.nodes.push_back(root);
    g.index[root] = 0;
    g.out.emplace_back();

    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
        std::uint32_t n = queue.front();
        queue.pop_front();
        Marking m = g.nodes[n];  // copy: nodes vector may grow
        for (TransId t : enabled(net, m)) {
            check_safe(net, m, t);
            Marking next = fire(net, m, t);
            auto [it, fresh] = g.index.emplace(next, static_cast<std::uint32_t>(g.nodes.size()));
            if (fresh) {
                if (g.nodes.size() >= max_nodes)
                    throw BudgetError("reachability graph exceeds " +
                                      std::to_string(max_nodes) + " markings");
                g.nodes.push_back(next);
                g.out.emplace_back();
                queue.push_back(it->second);
            }
            g.out[n].push_back(static_cast<std::uint32_t>(g.edges.size()));
            g.edges.push_back({n, t, it->second});
        }
    }
    return g;
}

ReachGraph reach_graph(const PetriNet& net, std::size_t max_nodes) {
    return reach_graph(net, net.initial_marking(), max_nodes);
}

// ---------------------------------------------------------------------------
// SCC decomposition (iterative Tarjan) and attractors
// ---------------------------------------------------------------------------

namespace {

// Returns per-node component id; components are numbered in reverse
// topological order of discovery.
std::vector<std::uint32_t> tarjan_sccs(std::size_t n,
                                       const std::vector<std::vector<std::uint32_t>>& succ,
                                       std::uint32_t& comp_count) {
    constexpr std::uint32_t kUnseen = 0xffffffffu;
    std::vector<std::uint32_t> num(n, kUnseen), low(n, 0), comp(n, kUnseen);
    std::vector<std::uint32_t> stack;
    std::vector<bool> on_stack(n, false);
    std::uint32_t next_num = 0;
    comp_count = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t child;
    };
    std::vector<Frame> frames;

    for (std::uint32_t start = 0; start < n; ++start) {
        if (num[start] != kUnseen) continue;
        frames.push_back({start, 0});
        num[start] = low[start] = next_num++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < succ[f.v].size()) {
                std::uint32_t w = succ[f.v][f.child++];
                if (num[w] == kUnseen) {
                    num[w] = low[w] = next_num++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], num[w]);
                }
            } else {
                if (low[f.v] == num[f.v]) {
                    while (true) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if (w == f.v) break;
                    }
                    ++comp_count;
                }
                std::uint32_t v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return comp;
}

}  // namespace

AttractorSet attractors(const ReachGraph& g) {
    std::size_t n = g.nodes.size();
    std::vector<std::vector<std::uint32_t>> succ(n);
    for (const auto& e : g.edges) succ[e.src].push_back(e.dst);

    std::uint32_t comp_count = 0;
    std::vector<std::uint32_t> comp = tarjan_sccs(n, succ, comp_count);

    std::vector<bool> has_exit(comp_count, false);
    for (const auto& e : g.edges)
        if (comp[e.src] != comp[e.dst]) has_exit[comp[e.src]] = true;

    std::vector<std::vector<std::uint32_t>> members(comp_count);
    for (std::uint32_t v = 0; v < n; ++v) members[comp[v]].push_back(v);

    AttractorSet out;
    for (std::uint32_t c = 0; c < comp_count; ++c) {
        if (has_exit[c]) continue;
        std::sort(members[c].begin(), members[c].end());
        out.components.push_back(std::move(members[c]));
    }
    std::sort(out.components.begin(), out.components.end());
    return out;
}

// ---------------------------------------------------------------------------
// Bad-marking specs
// ---------------------------------------------------------------------------

BadSpec parse_bad_spec(const PetriNet& net, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid bad-marking spec: ") + e.what());
    }
    BadSpec spec;
    if (!j.contains("bad_markings") || !j["bad_markings"].is_array())
        throw ParseError("bad-marking spec needs a 'bad_markings' array");
    for (const auto& mj : j["bad_markings"])
        spec.bad_markings.push_back(net.marking_of(mj.get<std::vector<std::string>>()));
    std::string mode = j.value("closure", "require");
    if (mode == "require")
        spec.mode = ClosureMode::Require;
    else if (mode == "auto")
        spec.mode = ClosureMode::AutoClose;
    else
        throw ParseError("closure mode must be 'require' or 'auto', got '" + mode + "'");
    return spec;
}

std::string bad_spec_json(const PetriNet& net, const std::vector<Marking>& markings,
                          ClosureMode mode) {
    nlohmann::json j;
    j["bad_markings"] = nlohmann::json::array();
    for (const auto& m : markings) {
        nlohmann::json mj = nlohmann::json::array();
        for (PlaceId p : m.places()) mj.push_back(net.place_name(p));
        j["bad_markings"].push_back(mj);
    }
    j["closure"] = mode == ClosureMode::Require ? "require" : "auto";
    return j.dump();
}

std::set<Marking> validate_bad(const PetriNet& net, const BadSpec& spec, const ReachGraph& g,
                               std::vector<std::string>* warnings) {
    std::set<std::uint32_t> bad;
    for (const auto& m : spec.bad_markings) {
        auto it = g.index.find(m);
        if (it == g.index.end()) {
            if (warnings)
                warnings->push_back("dropping unreachable bad marking " + net.marking_name(m));
            continue;
        }
        bad.insert(it->second);
    }

    if (spec.mode == ClosureMode::AutoClose) {
        std::deque<std::uint32_t> queue(bad.begin(), bad.end());
        while (!queue.empty()) {
            std::uint32_t n = queue.front();
            queue.pop_front();
            for (std::uint32_t ei : g.out[n]) {
                std::uint32_t d = g.edges[ei].dst;
                if (bad.insert(d).second) queue.push_back(d);
            }
        }
    } else {
        for (std::uint32_t n : bad)
            for (std::uint32_t ei : g.out[n]) {
                const auto& e = g.edges[ei];
                if (!bad.count(e.dst))
                    throw ClosureError("bad set is not reachability-closed: " +
                                       net.marking_name(g.nodes[n]) + " --" +
                                       net.transition(e.trans).name + "--> " +
                                       net.marking_name(g.nodes[e.dst]) + " escapes it");
            }
    }

    std::set<Marking> out;
    for (std::uint32_t n : bad) out.insert(g.nodes[n]);
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force doom oracle
// ---------------------------------------------------------------------------

const char* to_string(MarkStatus s) {
    switch (s) {
        case MarkStatus::Bad: return "bad";
        case MarkStatus::Doomed: return "doomed";
        case MarkStatus::Free: return "free";
    }
    return "?";
}

std::map<Marking, MarkStatus> doom_oracle(const PetriNet& net, const ReachGraph& g,
                                          const std::set<Marking>& bad) {
    std::size_t n = g.nodes.size();

    std::vector<bool> is_bad(n, false);
    for (const auto& m : bad) {
        auto it = g.index.find(m);
        if (it != g.index.end()) is_bad[it->second] = true;
    }

    // Subgraph induced by non-bad markings.
    std::vector<std::vector<std::uint32_t>> succ(n);
    std::vector<std::vector<std::uint32_t>> pred(n);
    std::vector<std::vector<TransId>> succ_label(n);
    for (const auto& e : g.edges) {
        if (is_bad[e.src] || is_bad[e.dst]) continue;
        succ[e.src].push_back(e.dst);
        pred[e.dst].push_back(e.src);
        succ_label[e.src].push_back(e.trans);
    }

    std::uint32_t comp_count = 0;
    std::vector<std::uint32_t> comp = tarjan_sccs(n, succ, comp_count);

    // Per non-bad SCC: does it contain a cycle, and which places do its
    // internal transitions consume? A cycle through M1 can be concatenated
    // with any other cycle of the same SCC, so the union over internal edges
    // is exactly what a single long loop can consume.
    std::vector<bool> cyclic(comp_count, false);
    std::vector<std::set<PlaceId>> consumed(comp_count);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (is_bad[v]) continue;
        for (std::size_t k = 0; k < succ[v].size(); ++k) {
            if (comp[v] != comp[succ[v][k]]) continue;
            cyclic[comp[v]] = true;  // internal edge: self-loop or |SCC| > 1
            for (PlaceId p : net.transition(succ_label[v][k]).pre)
                consumed[comp[v]].insert(p);
        }
    }

    // Anchors: non-bad deadlocks of the full graph, plus nodes of cyclic
    // non-bad SCCs whose loop spoils every transition that stays enabled.
    std::vector<bool> anchor(n, false);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (is_bad[v]) continue;
        if (g.is_deadlock(v)) {
            anchor[v] = true;
            continue;
        }
        if (!cyclic[comp[v]]) continue;
        const auto& eaten = consumed[comp[v]];
        std::vector<PlaceId> untouched;
        for (PlaceId p : g.nodes[v].places())
            if (!eaten.count(p)) untouched.push_back(p);
        Marking rest(untouched);
        bool spoiled_all = true;
        for (TransId t = 0; t < net.transition_count(); ++t) {
            if (is_enabled(net, rest, t)) {
                spoiled_all = false;
                break;
            }
        }
        if (spoiled_all) anchor[v] = true;
    }

    // Free = can reach an anchor inside the non-bad subgraph.
    std::vector<bool> free(n, false);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t v = 0; v < n; ++v)
        if (anchor[v]) {
            free[v] = true;
            queue.push_back(v);
        }
    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t u : pred[v])
            if (!free[u]) {
                free[u] = true;
                queue.push_back(u);
            }
    }

    std::map<Marking, MarkStatus> result;
    for (std::uint32_t v = 0; v < n; ++v) {
        MarkStatus s = is_bad[v]   ? MarkStatus::Bad
                       : free[v]   ? MarkStatus::Free
                                   : MarkStatus::Doomed;
        result[g.nodes[v]] = s;
    }
    return result;
}

}  // namespace cliffedge
