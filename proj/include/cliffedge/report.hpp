#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cliffedge/doom.hpp"
#include "cliffedge/protect.hpp"
#include "cliffedge/reach.hpp"

namespace cliffedge {

struct RunConfig {
    std::string net_path;
    enum class Format { Auto, LlNet, Native } format = Format::Auto;
    std::string bad_path;
    Order order = Order::Erv;
    HeightMode height_mode = HeightMode::DecidedAgainst;
    std::uint32_t depth = 1;  // family depth for doom checks; >= 1
    bool json = false;
    std::string dot_path;
    std::uint64_t seed = 0;
    std::size_t max_nodes = 4096;  // reachability budget for the oracle check
    bool protect_all = false;
};

// Statistics columns: event counts of the two prefixes (cutoffs included),
// minimally doomed configuration count, number of doom checks performed,
// wall time.
struct PrefixStats {
    std::size_t pi0_events = 0;
    std::size_t pi0_cutoffs = 0;
    std::size_t pi1_events = 0;
    std::size_t pi1_cutoffs = 0;
    std::size_t min_doomed = 0;
    std::size_t doom_checks = 0;
    double time_ms = 0.0;
};

struct DoomReport {
    std::map<std::string, std::string> markings;  // canonical marking -> status
    struct Mdc {
        std::vector<std::string> events;
        std::vector<std::string> crest;
        std::vector<std::string> mark;
    };
    std::vector<Mdc> mindoomed;
    struct RidgeRow {
        std::vector<std::string> transitions;
        std::size_t witnesses = 0;
    };
    std::vector<RidgeRow> ridges;
    struct ProtectRow {
        std::string marking;
        std::vector<std::string> config;  // representative configuration
        std::optional<std::uint64_t> value;  // empty = unbounded
        bool doomed_self = false;
        std::vector<std::vector<std::string>> witnesses;
    };
    std::vector<ProtectRow> protectedness;
    PrefixStats stats;
    std::vector<std::string> warnings;
};

DoomReport run_doom_pipeline(const PetriNet& net, const BadSpec& spec, const RunConfig& cfg,
                             std::string* dot_out = nullptr);

std::string to_json(const DoomReport& r);
std::string to_text(const DoomReport& r);

struct OracleCheckResult {
    bool pass = true;
    std::size_t markings_checked = 0;
    std::size_t mindoo_members = 0;
    std::string first_divergence;  // empty when pass
};

// Compares the unfolding-based verdict with the graph oracle on every
// reachable marking, then re-checks every worklist answer under the oracle
// (doomed itself, every crest rub free).
OracleCheckResult oracle_check(DoomAnalyzer& an, const ReachGraph& g, const Prefix& family);

}  // namespace cliffedge
