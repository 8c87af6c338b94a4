#include "cliffedge/report.hpp"

#include <chrono>
#include <sstream>

#include <json.hpp>

namespace cliffedge {

namespace {

std::vector<std::string> label_list(const Prefix& p, const EventSet& c) {
    std::vector<std::string> out;
    c.for_each([&](std::size_t e) {
        out.push_back(p.net().transition(p.event(e).transition).name);
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> place_list(const PetriNet& net, const Marking& m) {
    std::vector<std::string> out;
    for (PlaceId p : m.places()) out.push_back(net.place_name(p));
    return out;
}

DoomReport::ProtectRow protect_row(const PetriNet& net, const Marking& m,
                                   const std::vector<std::string>& config,
                                   const Protectedness& pr) {
    DoomReport::ProtectRow row;
    row.marking = net.marking_name(m);
    row.config = config;
    row.value = pr.value;
    row.doomed_self = pr.doomed_self;
    if (pr.scope)
        for (const EventSet& w : pr.witnesses) row.witnesses.push_back(label_list(*pr.scope, w));
    return row;
}

}  // namespace

DoomReport run_doom_pipeline(const PetriNet& net, const BadSpec& spec, const RunConfig& cfg,
                             std::string* dot_out) {
    auto started = std::chrono::steady_clock::now();
    DoomReport report;

    ReachGraph g = reach_graph(net);
    std::set<Marking> bad = validate_bad(net, spec, g, &report.warnings);

    Prefix pi0 = build_prefix(net, cfg.order);
    Prefix family = pi0;
    for (std::uint32_t n = 0; n < std::max<std::uint32_t>(cfg.depth, 1); ++n)
        family = extend_family(family);

    DoomAnalyzer an(net, bad, cfg.order, std::max<std::uint32_t>(cfg.depth, 1));

    for (const Marking& m : g.nodes)
        report.markings[net.marking_name(m)] = to_string(an.status(m).value);

    MdcSet mdc = mindoo(an, family);
    for (const MdcEntry& e : mdc.configs)
        report.mindoomed.push_back({label_list(family, e.events),
                                    label_list(family, e.crest_events),
                                    place_list(net, e.mark)});

    for (const Ridge& r : ridge_complete(an, family)) {
        DoomReport::RidgeRow row;
        for (TransId t : r.transitions) row.transitions.push_back(net.transition(t).name);
        row.witnesses = r.witnesses.size();
        report.ridges.push_back(std::move(row));
    }

    // protectedness of the initial marking, plus every free marking on request
    report.protectedness.push_back(protect_row(
        net, net.initial_marking(), {},
        protectedness(an, net.initial_marking(), cfg.height_mode)));
    if (cfg.protect_all) {
        // deterministic representative configuration per marking
        std::map<Marking, std::vector<std::string>> reps;
        for_each_config(family, an.budgets().max_configs,
                        [&](const EventSet& c, const std::vector<std::uint32_t>& cutc, bool) {
                            Marking m = mark_of_cut(family, cutc);
                            if (!reps.count(m)) reps.emplace(m, label_list(family, c));
                            return Visit::Extend;
                        });
        for (const Marking& m : g.nodes) {
            if (m == net.initial_marking()) continue;
            if (an.status(m).value != MarkStatus::Free) continue;
            report.protectedness.push_back(
                protect_row(net, m, reps.count(m) ? reps[m] : std::vector<std::string>{},
                            protectedness(an, m, cfg.height_mode)));
        }
    }

    if (dot_out) {
        EventSet tinted(family.event_count());
        EventSet doubled(family.event_count());
        for (const MdcEntry& e : mdc.configs) {
            tinted.merge_prefix(e.events);
            doubled.merge_prefix(e.crest_events);
        }
        DotStyle style;
        style.tinted = &tinted;
        style.doubled = &doubled;
        *dot_out = to_dot(family, style);
    }

    report.stats.pi0_events = pi0.event_count();
    report.stats.pi1_events = family.event_count();
    for (std::uint32_t e = 0; e < pi0.event_count(); ++e)
        if (pi0.event(e).cutoff) ++report.stats.pi0_cutoffs;
    for (std::uint32_t e = 0; e < family.event_count(); ++e)
        if (family.event(e).cutoff) ++report.stats.pi1_cutoffs;
    report.stats.min_doomed = mdc.configs.size();
    report.stats.doom_checks = an.doom_checks();
    report.stats.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    return report;
}

std::string to_json(const DoomReport& r) {
    nlohmann::json j;
    j["markings"] = nlohmann::json::object();
    for (const auto& [m, s] : r.markings) j["markings"][m] = s;
    j["mindoomed"] = nlohmann::json::array();
    for (const auto& m : r.mindoomed)
        j["mindoomed"].push_back(
            {{"events", m.events}, {"crest", m.crest}, {"mark", m.mark}});
    j["ridges"] = nlohmann::json::array();
    for (const auto& ridge : r.ridges)
        j["ridges"].push_back(
            {{"transitions", ridge.transitions}, {"witnesses", ridge.witnesses}});
    j["protectedness"] = nlohmann::json::array();
    for (const auto& p : r.protectedness) {
        nlohmann::json pj;
        pj["marking"] = p.marking;
        pj["config"] = p.config;
        if (p.value)
            pj["value"] = *p.value;
        else
            pj["value"] = "unbounded";
        pj["doomed"] = p.doomed_self;
        pj["witnesses"] = p.witnesses;
        j["protectedness"].push_back(pj);
    }
    j["stats"] = {{"pi0_events", r.stats.pi0_events},
                  {"pi0_cutoffs", r.stats.pi0_cutoffs},
                  {"pi1_events", r.stats.pi1_events},
                  {"pi1_cutoffs", r.stats.pi1_cutoffs},
                  {"min_doomed", r.stats.min_doomed},
                  {"doom_checks", r.stats.doom_checks},
                  {"time_ms", r.stats.time_ms}};
    j["warnings"] = r.warnings;
    return j.dump(2);
}

std::string to_text(const DoomReport& r) {
    std::ostringstream out;
    out << "markings (" << r.markings.size() << "):\n";
    for (const auto& [m, s] : r.markings) out << "  " << m << " " << s << "\n";
    out << "minimally doomed configurations (" << r.mindoomed.size() << "):\n";
    for (const auto& m : r.mindoomed) {
        out << "  events={";
        for (std::size_t i = 0; i < m.events.size(); ++i)
            out << (i ? "," : "") << m.events[i];
        out << "} crest={";
        for (std::size_t i = 0; i < m.crest.size(); ++i) out << (i ? "," : "") << m.crest[i];
        out << "} mark={";
        for (std::size_t i = 0; i < m.mark.size(); ++i) out << (i ? "," : "") << m.mark[i];
        out << "}\n";
    }
    out << "ridges (" << r.ridges.size() << "):\n";
    for (const auto& ridge : r.ridges) {
        out << "  {";
        for (std::size_t i = 0; i < ridge.transitions.size(); ++i)
            out << (i ? "," : "") << ridge.transitions[i];
        out << "} witnesses=" << ridge.witnesses << "\n";
    }
    out << "protectedness:\n";
    for (const auto& p : r.protectedness) {
        out << "  " << p.marking << " config={";
        for (std::size_t i = 0; i < p.config.size(); ++i) out << (i ? "," : "") << p.config[i];
        out << "} value=";
        if (p.value)
            out << *p.value;
        else
            out << "unbounded";
        if (p.doomed_self) out << " (doomed)";
        out << " witnesses=" << p.witnesses.size() << "\n";
    }
    out << "stats: pi0_events=" << r.stats.pi0_events
        << " pi0_cutoffs=" << r.stats.pi0_cutoffs << " pi1_events=" << r.stats.pi1_events
        << " pi1_cutoffs=" << r.stats.pi1_cutoffs << " min_doomed=" << r.stats.min_doomed
        << " doom_checks=" << r.stats.doom_checks << " time_ms=" << r.stats.time_ms << "\n";
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
    return out.str();
}

OracleCheckResult oracle_check(DoomAnalyzer& an, const ReachGraph& g, const Prefix& family) {
    OracleCheckResult res;
    const PetriNet& net = an.net();
    auto oracle = doom_oracle(net, g, an.bad());

    for (const Marking& m : g.nodes) {
        ++res.markings_checked;
        MarkStatus mine = an.status(m).value;
        MarkStatus truth = oracle.at(m);
        if (mine != truth) {
            res.pass = false;
            res.first_divergence = net.marking_name(m) + ": unfolding says " +
                                   to_string(mine) + ", graph oracle says " +
                                   to_string(truth);
            return res;
        }
    }

    MdcSet mdc = mindoo(an, family);
    res.mindoo_members = mdc.configs.size();
    for (const MdcEntry& e : mdc.configs) {
        if (oracle.at(e.mark) == MarkStatus::Free) {
            res.pass = false;
            res.first_divergence =
                "worklist answer with mark " + net.marking_name(e.mark) + " is free";
            return res;
        }
        bool rubs_free = true;
        e.crest_events.for_each([&](std::size_t ev) {
            EventSet rub = e.events;
            rub.reset(ev);
            if (oracle.at(mark(family, rub)) != MarkStatus::Free) rubs_free = false;
        });
        if (!rubs_free) {
            res.pass = false;
            res.first_divergence = "worklist answer with mark " + net.marking_name(e.mark) +
                                   " has a non-free crest rub";
            return res;
        }
    }
    return res;
}

}  // namespace cliffedge
