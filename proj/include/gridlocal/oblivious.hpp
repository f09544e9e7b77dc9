#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridlocal/strategies.hpp"

namespace gridlocal {

struct TrialOutcome {
    std::uint64_t algo_seed = 0;
    std::uint64_t script_seed = 0;
    Certificate::Kind kind = Certificate::Kind::Survived;
    i64 nodes_spent = 0;
};

struct ObliviousStats {
    int trials = 0;
    int wins = 0;
    std::optional<Certificate> best;   // first winning certificate, if any
    std::string best_transcript;       // full transcript of that trial
    std::vector<TrialOutcome> outcomes;

    double win_rate() const {
        return trials > 0 ? static_cast<double>(wins) / static_cast<double>(trials) : 0.0;
    }
};

// Runs `trials` independent scripted full-pipeline matches against the named
// algorithm. Both per-trial seeds (the algorithm's coin stream and the
// adversary's script) derive deterministically from master_seed, so repeated
// calls reproduce every outcome exactly. trials <= 0 yields empty stats.
ObliviousStats run_oblivious_lb(const AdversaryParams& params, const std::string& algo_name,
                                int trials, std::uint64_t master_seed,
                                bool backdoor = false);

}  // namespace gridlocal
