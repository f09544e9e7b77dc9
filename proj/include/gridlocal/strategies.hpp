#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gridlocal/adversary.hpp"
#include "gridlocal/algorithms.hpp"

namespace gridlocal {

// Names understood by strategy_by_name and run_with_provider:
//   log-boost      straight doubling run east, level kappa
//   quasilinear    base run + long guarded row arm
//   slope-boost    parallelogram doubling at the configured slope
//   lpath          guarded row + column arms and the connecting staircase
//   full-det       complete pipeline: L-path, window search, sloped strike
//   full-oblivious the same pipeline from a pre-committed script
const std::vector<std::string>& strategy_names();

// Runs one named pipeline against the state through the given decision
// provider and returns the final certificate (the caller appends it to a
// transcript, normally via run_match). `worlds` pre-resolves the absolute
// placement of every fragment the pipeline creates, in creation order;
// required when the state runs with the coordinate backdoor.
Certificate run_with_provider(GameState& state, const std::string& name,
                              ChoiceProvider& choices,
                              const std::vector<GridCoord>* worlds = nullptr);

// run_match adapter. Adaptive by default; full-oblivious — and any strategy
// facing a backdoor-enabled state — runs from the script seeded here, since
// only a scripted build knows its absolute placements up front.
std::unique_ptr<AdversaryStrategyBase> strategy_by_name(const std::string& name,
                                                        std::uint64_t script_seed);

// Replays the scripted pipeline against a throwaway board (constant-color
// stand-in labeling, no transcript) and reads back the absolute placement
// every fragment ends at, spreading unconnected groups far apart. Scripted
// reveal traces never depend on labels, so the real run creates the same
// fragments in the same order with the same relative placements.
std::vector<GridCoord> discover_worlds(const AdversaryParams& params,
                                       const std::string& name,
                                       std::uint64_t script_seed);

struct MatchConfig {
    AdversaryParams params;
    std::string strategy = "full-det";
    std::string algo = "greedy";
    std::uint64_t algo_seed = 1;
    std::uint64_t script_seed = 1;
    bool backdoor = false;
};

struct MatchResult {
    Certificate cert;
    ParamReport report;
    i64 grid_side = 0;
};

// One complete configured match: validates parameters, writes the transcript
// header (every field needed to reproduce the match), runs it, appends the
// certificate. Throws std::invalid_argument for unknown names or rejected
// parameters.
MatchResult run_configured(const MatchConfig& cfg, Transcript& transcript);

// Reads a MatchConfig back from a transcript's header event.
MatchConfig config_from_header(const nlohmann::json& header);

}  // namespace gridlocal
