#include "cliffedge/petri_net.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cliffedge {

namespace {

std::string with_line(const std::string& msg, int line) {
    if (line < 0) return msg;
    return "line " + std::to_string(line) + ": " + msg;
}

}  // namespace

ParseError::ParseError(const std::string& msg, int line_no)
    : Error(with_line(msg, line_no)), line(line_no) {}

Marking::Marking(std::vector<PlaceId> places) : places_(std::move(places)) {
    std::sort(places_.begin(), places_.end());
    auto dup = std::adjacent_find(places_.begin(), places_.end());
    if (dup != places_.end())
        throw ValidationError("duplicate place in marking");
}

bool Marking::contains(PlaceId p) const {
    return std::binary_search(places_.begin(), places_.end(), p);
}

PetriNet::PetriNet(std::vector<std::string> places, std::vector<Transition> transitions,
                   Marking initial)
    : places_(std::move(places)), transitions_(std::move(transitions)),
      initial_(std::move(initial)) {
    std::set<std::string> seen;
    for (const auto& p : places_) {
        if (p.empty()) throw ValidationError("empty place name");
        if (!seen.insert(p).second)
            throw ValidationError("duplicate identifier '" + p + "'");
    }
    for (const auto& t : transitions_) {
        if (t.name.empty()) throw ValidationError("empty transition name");
        if (!seen.insert(t.name).second)
            throw ValidationError("duplicate identifier '" + t.name + "'");
    }
    for (auto& t : transitions_) {
        if (t.pre.empty() || t.post.empty())
            throw ValidationError("transition '" + t.name +
                                  "' must have non-empty preset and postset");
        for (auto v : {&t.pre, &t.post}) {
            std::sort(v->begin(), v->end());
            if (std::adjacent_find(v->begin(), v->end()) != v->end())
                throw ValidationError("duplicate arc on transition '" + t.name + "'");
            for (PlaceId p : *v)
                if (p >= places_.size())
                    throw ValidationError("arc of '" + t.name + "' to undeclared place");
        }
    }
    for (PlaceId p : initial_.places())
        if (p >= places_.size())
            throw ValidationError("initial marking refers to undeclared place");

    consumers_.resize(places_.size());
    for (TransId t = 0; t < transitions_.size(); ++t)
        for (PlaceId p : transitions_[t].pre) consumers_[p].push_back(t);
}

PlaceId PetriNet::place_id(const std::string& name) const {
    for (PlaceId p = 0; p < places_.size(); ++p)
        if (places_[p] == name) return p;
    throw ValidationError("unknown place '" + name + "'");
}

TransId PetriNet::transition_id(const std::string& name) const {
    for (TransId t = 0; t < transitions_.size(); ++t)
        if (transitions_[t].name == name) return t;
    throw ValidationError("unknown transition '" + name + "'");
}

Marking PetriNet::marking_of(const std::vector<std::string>& names) const {
    std::vector<PlaceId> ids;
    ids.reserve(names.size());
    for (const auto& n : names) ids.push_back(place_id(n));
    return Marking(std::move(ids));
}

std::string PetriNet::marking_name(const Marking& m) const {
    std::string out = "{";
    bool first = true;
    for (PlaceId p : m.places()) {
        if (!first) out += ",";
        out += places_[p];
        first = false;
    }
    out += "}";
    return out;
}

std::vector<TransId> enabled(const PetriNet& net, const Marking& m) {
    std::vector<TransId> out;
    for (TransId t = 0; t < net.transition_count(); ++t)
        if (is_enabled(net, m, t)) out.push_back(t);
    return out;
}

bool is_enabled(const PetriNet& net, const Marking& m, TransId t) {
    for (PlaceId p : net.transition(t).pre)
        if (!m.contains(p)) return false;
    return true;
}

Marking fire(const PetriNet& net, const Marking& m, TransId t) {
    if (!is_enabled(net, m, t))
        throw NotEnabledError("transition '" + net.transition(t).name +
                              "' not enabled at " + net.marking_name(m));
    const Transition& tr = net.transition(t);
    std::vector<PlaceId> next;
    next.reserve(m.size() + tr.post.size());
    for (PlaceId p : m.places())
        if (!std::binary_search(tr.pre.begin(), tr.pre.end(), p)) next.push_back(p);
    for (PlaceId p : tr.post)
        if (!std::binary_search(next.begin(), next.end(), p)) next.push_back(p);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return Marking(std::move(next));
}

// ---------------------------------------------------------------------------
// PEP ll_net parsing
// ---------------------------------------------------------------------------

namespace {

struct LlEntry {
    int id;
    std::string name;
    std::string suffix;  // raw attribute text after the closing quote
};

// Entries look like: 3"p3"M1  or  3"p3"80@40M1k1  — suffix attributes other
// than M<n> are ignored.
LlEntry parse_ll_entry(const std::string& line, int line_no) {
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == 0) throw ParseError("expected numeric id in '" + line + "'", line_no);
    LlEntry e;
    e.id = std::stoi(line.substr(0, i));
    if (i >= line.size() || line[i] != '"')
        throw ParseError("expected quoted name in '" + line + "'", line_no);
    std::size_t close = line.find('"', i + 1);
    if (close == std::string::npos)
        throw ParseError("unterminated name in '" + line + "'", line_no);
    e.name = line.substr(i + 1, close - i - 1);
    e.suffix = line.substr(close + 1);
    return e;
}

int ll_token_count(const std::string& suffix, int line_no) {
    for (std::size_t i = 0; i < suffix.size(); ++i) {
        if (suffix[i] == 'M' && i + 1 < suffix.size() &&
            std::isdigit(static_cast<unsigned char>(suffix[i + 1]))) {
            std::size_t j = i + 1;
            while (j < suffix.size() && std::isdigit(static_cast<unsigned char>(suffix[j]))) ++j;
            int m = std::stoi(suffix.substr(i + 1, j - i - 1));
            if (m > 1)
                throw ParseError("initial token count " + std::to_string(m) +
                                 " exceeds 1 (net must be safe)", line_no);
            return m;
        }
    }
    return 0;
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

PetriNet parse_llnet(std::istream& in) {
    enum Section { None, Pl, Tr, Tp, Pt } section = None;
    bool saw_pep = false;

    std::vector<std::string> place_names;
    std::vector<int> place_tokens;
    std::map<int, PlaceId> place_by_id;
    std::vector<std::string> trans_names;
    std::map<int, TransId> trans_by_id;
    std::vector<std::vector<PlaceId>> pre, post;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trimmed(raw);
        if (line.empty() || line[0] == '%') continue;

        if (line == "PEP") { saw_pep = true; continue; }
        if (line == "PTNet" || line == "FORMAT_N2" || line == "FORMAT_N") continue;
        if (line == "PL") { section = Pl; continue; }
        if (line == "TR") { section = Tr; continue; }
        if (line == "TP") { section = Tp; continue; }
        if (line == "PT") { section = Pt; continue; }
        if (std::isupper(static_cast<unsigned char>(line[0])) &&
            line.find('"') == std::string::npos && line.find('<') == std::string::npos &&
            line.find('>') == std::string::npos)
            throw ParseError("unsupported section '" + line + "'", line_no);

        switch (section) {
            case Pl: {
                LlEntry e = parse_ll_entry(line, line_no);
                if (place_by_id.count(e.id))
                    throw ParseError("duplicate place id " + std::to_string(e.id), line_no);
                place_by_id[e.id] = static_cast<PlaceId>(place_names.size());
                place_names.push_back(e.name);
                place_tokens.push_back(ll_token_count(e.suffix, line_no));
                break;
            }
            case Tr: {
                LlEntry e = parse_ll_entry(line, line_no);
                if (trans_by_id.count(e.id))
                    throw ParseError("duplicate transition id " + std::to_string(e.id), line_no);
                trans_by_id[e.id] = static_cast<TransId>(trans_names.size());
                trans_names.push_back(e.name);
                pre.emplace_back();
                post.emplace_back();
                break;
            }
            case Tp:
            case Pt: {
                char sep = section == Tp ? '<' : '>';
                std::size_t pos = line.find(sep);
                if (pos == std::string::npos)
                    throw ParseError("malformed arc '" + line + "'", line_no);
                int lhs = 0, rhs = 0;
                try {
                    lhs = std::stoi(line.substr(0, pos));
                    std::size_t used = 0;
                    rhs = std::stoi(line.substr(pos + 1), &used);
                } catch (const std::exception&) {
                    throw ParseError("malformed arc '" + line + "'", line_no);
                }
                int tid = section == Tp ? lhs : rhs;
                int pid = section == Tp ? rhs : lhs;
                auto ti = trans_by_id.find(tid);
                if (ti == trans_by_id.end())
                    throw ParseError("arc refers to undeclared transition id " +
                                     std::to_string(tid), line_no);
                auto pi = place_by_id.find(pid);
                if (pi == place_by_id.end())
                    throw ParseError("arc refers to undeclared place id " +
                                     std::to_string(pid), line_no);
                (section == Tp ? post : pre)[ti->second].push_back(pi->second);
                break;
            }
            case None:
                throw ParseError("entry '" + line + "' outside any section", line_no);
        }
    }
    if (!saw_pep) throw ParseError("missing PEP header", 1);

    std::vector<Transition> transitions;
    transitions.reserve(trans_names.size());
    for (std::size_t t = 0; t < trans_names.size(); ++t)
        transitions.push_back({trans_names[t], pre[t], post[t]});

    std::vector<PlaceId> initial;
    for (PlaceId p = 0; p < place_tokens.size(); ++p)
        if (place_tokens[p] == 1) initial.push_back(p);

    return PetriNet(std::move(place_names), std::move(transitions), Marking(std::move(initial)));
}

PetriNet parse_llnet_string(const std::string& text) {
    std::istringstream in(text);
    return parse_llnet(in);
}

// ---------------------------------------------------------------------------
// Native JSON format
// ---------------------------------------------------------------------------

PetriNet parse_native(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("places") || !j.contains("transitions"))
        throw ParseError("net document must contain 'places' and 'transitions'");

    std::vector<std::string> places = j["places"].get<std::vector<std::string>>();
    std::map<std::string, PlaceId> index;
    for (PlaceId p = 0; p < places.size(); ++p) {
        if (!index.emplace(places[p], p).second)
            throw ParseError("duplicate place name '" + places[p] + "'");
    }
    auto lookup = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end())
            throw ParseError("arc refers to undeclared place '" + name + "'");
        return it->second;
    };

    std::vector<Transition> transitions;
    for (const auto& tj : j["transitions"]) {
        Transition t;
        t.name = tj.at("name").get<std::string>();
        for (const auto& n : tj.at("pre")) t.pre.push_back(lookup(n.get<std::string>()));
        for (const auto& n : tj.at("post")) t.post.push_back(lookup(n.get<std::string>()));
        transitions.push_back(std::move(t));
    }

    std::vector<PlaceId> initial;
    if (j.contains("initial"))
        for (const auto& n : j["initial"]) initial.push_back(lookup(n.get<std::string>()));

    return PetriNet(std::move(places), std::move(transitions), Marking(std::move(initial)));
}

PetriNet parse_native_string(const std::string& text) {
    std::istringstream in(text);
    return parse_native(in);
}

std::string to_native_json(const PetriNet& net) {
    nlohmann::json j;
    j["places"] = nlohmann::json::array();
    for (PlaceId p = 0; p < net.place_count(); ++p) j["places"].push_back(net.place_name(p));
    j["transitions"] = nlohmann::json::array();
    for (const auto& t : net.transitions()) {
        nlohmann::json tj;
        tj["name"] = t.name;
        tj["pre"] = nlohmann::json::array();
        for (PlaceId p : t.pre) tj["pre"].push_back(net.place_name(p));
        tj["post"] = nlohmann::json::array();
        for (PlaceId p : t.post) tj["post"].push_back(net.place_name(p));
        j["transitions"].push_back(tj);
    }
    j["initial"] = nlohmann::json::array();
    for (PlaceId p : net.initial_marking().places()) j["initial"].push_back(net.place_name(p));
    return j.dump(2);
}

}  // namespace cliffedge
