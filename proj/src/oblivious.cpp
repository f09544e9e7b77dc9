#include "gridlocal/oblivious.hpp"

#include "gridlocal/rng.hpp"

namespace gridlocal {

ObliviousStats run_oblivious_lb(const AdversaryParams& params, const std::string& algo_name,
                                int trials, std::uint64_t master_seed, bool backdoor) {
    ObliviousStats stats;
    if (trials <= 0) return stats;
    stats.trials = trials;
    stats.outcomes.reserve(static_cast<std::size_t>(trials));

    for (int t = 0; t < trials; ++t) {
        MatchConfig cfg;
        cfg.params = params;
        cfg.strategy = "full-oblivious";
        cfg.algo = algo_name;
        cfg.algo_seed = mix64(master_seed ^ (2 * static_cast<std::uint64_t>(t) + 1));
        cfg.script_seed = mix64(master_seed ^ (2 * static_cast<std::uint64_t>(t) + 2));
        cfg.backdoor = backdoor;

        Transcript transcript;
        const MatchResult res = run_configured(cfg, transcript);

        TrialOutcome out;
        out.algo_seed = cfg.algo_seed;
        out.script_seed = cfg.script_seed;
        out.kind = res.cert.kind;
        out.nodes_spent = res.cert.nodes_spent;
        stats.outcomes.push_back(out);

        if (res.cert.is_win()) {
            ++stats.wins;
            if (!stats.best) {
                stats.best = res.cert;
                stats.best_transcript = transcript.text();
            }
        }
    }
    return stats;
}

}  // namespace gridlocal
