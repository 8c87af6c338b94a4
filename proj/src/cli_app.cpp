#include "cliffedge/cli_app.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cliffedge/report.hpp"

namespace cliffedge {

namespace {

struct MissingInput {
    std::string path;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw MissingInput{path};
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

PetriNet load_net(const RunConfig& cfg) {
    std::string text = slurp(cfg.net_path);
    RunConfig::Format f = cfg.format;
    if (f == RunConfig::Format::Auto) {
        if (cfg.net_path.size() >= 7 &&
            cfg.net_path.compare(cfg.net_path.size() - 7, 7, ".ll_net") == 0)
            f = RunConfig::Format::LlNet;
        else if (cfg.net_path.size() >= 6 &&
                 cfg.net_path.compare(cfg.net_path.size() - 6, 6, ".llnet") == 0)
            f = RunConfig::Format::LlNet;
        else if (cfg.net_path.size() >= 5 &&
                 cfg.net_path.compare(cfg.net_path.size() - 5, 5, ".json") == 0)
            f = RunConfig::Format::Native;
        else {
            std::size_t i = text.find_first_not_of(" \t\r\n");
            f = (i != std::string::npos && text[i] == '{') ? RunConfig::Format::Native
                                                           : RunConfig::Format::LlNet;
        }
    }
    return f == RunConfig::Format::LlNet ? parse_llnet_string(text)
                                         : parse_native_string(text);
}

void add_net_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--net", cfg.net_path, "net file (PEP ll_net or native JSON)")
        ->required();
    std::map<std::string, RunConfig::Format> formats{
        {"auto", RunConfig::Format::Auto},
        {"llnet", RunConfig::Format::LlNet},
        {"native", RunConfig::Format::Native}};
    cmd->add_option("--format", cfg.format, "net file format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    std::map<std::string, Order> orders{{"erv", Order::Erv}, {"hfirst", Order::HeightFirst}};
    cmd->add_option("--order", cfg.order, "adequate order for prefix construction")
        ->transform(CLI::CheckedTransformer(orders, CLI::ignore_case));
    cmd->add_option("--seed", cfg.seed, "seed for randomized checks");
}

int write_dot(const std::string& path, const std::string& dot, std::ostream& err) {
    std::ofstream out(path);
    if (!out.good()) {
        err << "cannot write " << path << "\n";
        return 1;
    }
    out << dot;
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"doom analysis for safe Petri nets: unfolding prefixes, minimally "
                 "doomed configurations, cliff-edges/ridges and protectedness"};
    app.require_subcommand(1);

    RunConfig cfg;

    auto* unfold_cmd = app.add_subcommand("unfold", "build a finite prefix and dump it");
    std::uint32_t unfold_depth = 0;
    add_net_options(unfold_cmd, cfg);
    unfold_cmd->add_option("--depth", unfold_depth, "family depth n for the prefix");
    unfold_cmd->add_flag("--json", cfg.json, "emit JSON statistics");
    unfold_cmd->add_option("--dot", cfg.dot_path, "write a DOT rendering to this file");

    auto* attract_cmd =
        app.add_subcommand("attractors", "terminal SCCs of the reachability graph");
    add_net_options(attract_cmd, cfg);
    attract_cmd->add_flag("--json", cfg.json, "emit JSON");
    attract_cmd->add_option("--max-nodes", cfg.max_nodes, "reachability budget");

    auto* doom_cmd = app.add_subcommand("doom", "full doom/ridge/protectedness report");
    add_net_options(doom_cmd, cfg);
    doom_cmd->add_option("--bad", cfg.bad_path, "bad-marking spec (JSON)")->required();
    doom_cmd->add_option("--depth", cfg.depth, "family depth for doom checks (>= 1)");
    std::map<std::string, HeightMode> modes{{"decided", HeightMode::DecidedAgainst},
                                            {"literal", HeightMode::LiteralCount}};
    doom_cmd->add_option("--height", cfg.height_mode, "decisional height mode")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    doom_cmd->add_flag("--json", cfg.json, "emit JSON");
    doom_cmd->add_flag("--protect-all", cfg.protect_all,
                       "protectedness of every free marking");
    doom_cmd->add_option("--dot", cfg.dot_path,
                         "write the family prefix with doom overlay to this file");

    auto* oracle_cmd = app.add_subcommand(
        "oracle-check", "cross-check unfolding verdicts against the graph oracle");
    add_net_options(oracle_cmd, cfg);
    oracle_cmd->add_option("--bad", cfg.bad_path, "bad-marking spec (JSON)")->required();
    oracle_cmd->add_option("--depth", cfg.depth, "family depth for doom checks");
    oracle_cmd->add_option("--max-nodes", cfg.max_nodes,
                           "refuse nets with more reachable markings than this");

    std::vector<const char*> argv;
    argv.push_back("cliffedge");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 1;
    }

    try {
        if (unfold_cmd->parsed()) {
            PetriNet net = load_net(cfg);
            reach_graph(net);  // validates safety before unfolding
            Prefix p = build_prefix(net, cfg.order);
            for (std::uint32_t n = 0; n < unfold_depth; ++n) p = extend_family(p);
            std::size_t cutoffs = 0;
            for (std::uint32_t e = 0; e < p.event_count(); ++e)
                if (p.event(e).cutoff) ++cutoffs;
            if (cfg.json) {
                nlohmann::json j{{"events", p.event_count()},
                                 {"conditions", p.condition_count()},
                                 {"cutoffs", cutoffs},
                                 {"depth", p.depth()},
                                 {"order", to_string(p.order())}};
                out << j.dump(2) << "\n";
            } else {
                out << dump(p);
                out << "events=" << p.event_count() << " conditions=" << p.condition_count()
                    << " cutoffs=" << cutoffs << " depth=" << p.depth() << "\n";
            }
            if (!cfg.dot_path.empty()) return write_dot(cfg.dot_path, to_dot(p), err);
            return 0;
        }

        if (attract_cmd->parsed()) {
            PetriNet net = load_net(cfg);
            ReachGraph g = reach_graph(net, cfg.max_nodes);
            AttractorSet at = attractors(g);
            if (cfg.json) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& comp : at.components) {
                    nlohmann::json cj;
                    cj["markings"] = nlohmann::json::array();
                    std::vector<Marking> ms;
                    for (std::uint32_t v : comp) {
                        cj["markings"].push_back(net.marking_name(g.nodes[v]));
                        ms.push_back(g.nodes[v]);
                    }
                    cj["bad_spec"] =
                        nlohmann::json::parse(bad_spec_json(net, ms, ClosureMode::Require));
                    j.push_back(cj);
                }
                out << j.dump(2) << "\n";
            } else {
                out << at.components.size() << " attractor(s)\n";
                for (const auto& comp : at.components) {
                    out << "attractor:";
                    std::vector<Marking> ms;
                    for (std::uint32_t v : comp) {
                        out << " " << net.marking_name(g.nodes[v]);
                        ms.push_back(g.nodes[v]);
                    }
                    out << "\n  bad spec: " << bad_spec_json(net, ms, ClosureMode::Require)
                        << "\n";
                }
            }
            return 0;
        }

        if (doom_cmd->parsed()) {
            if (cfg.depth < 1) {
                err << "doom checks need --depth >= 1\n";
                return 1;
            }
            PetriNet net = load_net(cfg);
            BadSpec spec = parse_bad_spec(net, slurp(cfg.bad_path));
            std::string dot;
            DoomReport report =
                run_doom_pipeline(net, spec, cfg, cfg.dot_path.empty() ? nullptr : &dot);
            out << (cfg.json ? to_json(report) : to_text(report)) << "\n";
            if (!cfg.dot_path.empty()) return write_dot(cfg.dot_path, dot, err);
            return 0;
        }

        // oracle-check
        if (cfg.depth < 1) {
            err << "doom checks need --depth >= 1\n";
            return 1;
        }
        PetriNet net = load_net(cfg);
        BadSpec spec = parse_bad_spec(net, slurp(cfg.bad_path));
        ReachGraph g;
        try {
            g = reach_graph(net, cfg.max_nodes);
        } catch (const BudgetError& e) {
            err << "refusing: " << e.what() << " (raise --max-nodes)\n";
            return 1;
        }
        std::set<Marking> bad = validate_bad(net, spec, g);
        DoomAnalyzer an(net, bad, cfg.order, cfg.depth);
        Prefix family = build_prefix(net, cfg.order);
        for (std::uint32_t n = 0; n < cfg.depth; ++n) family = extend_family(family);
        OracleCheckResult res = oracle_check(an, g, family);
        if (res.pass) {
            out << "PASS " << res.markings_checked << "/" << res.markings_checked
                << " markings agree, " << res.mindoo_members
                << " minimally doomed configuration(s) certified\n";
            return 0;
        }
        out << "FAIL after " << res.markings_checked << " marking(s): " << res.first_divergence
            << "\n";
        return 1;
    } catch (const MissingInput& m) {
        err << "no such input: " << m.path << "\n";
        return 2;
    } catch (const ScopeError& e) {
        err << "error: " << e.what() << " (increase --depth)\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cliffedge
