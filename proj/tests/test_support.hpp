#pragma once

// Shared helpers for the unit and acceptance test binaries: small scripted
// opponents with controllable drift, used to exercise the adversary
// pipelines deterministically.

#include <cstdint>
#include <vector>

#include "gridlocal/algorithms.hpp"
#include "gridlocal/strategies.hpp"

namespace testsupport {

using gridlocal::AlgorithmHandle;
using gridlocal::Color;
using gridlocal::DecisionStream;
using gridlocal::i64;
using gridlocal::LabelRequest;
using gridlocal::View;

// Period-3 pattern keyed to the board-wide reveal order, optionally flipping
// drift direction once a switch count is reached. The pattern color is
// repaired against visible labeled neighbors, so the opponent never plays an
// improper edge unless it is boxed in (three distinct neighbor colors).
// rising = true climbs the walk potential (+1 per three edges), false falls.
inline AlgorithmHandle patterned_drift(std::uint64_t switch_at, bool flip_from_rising) {
    AlgorithmHandle h;
    h.name = "drift-stub";
    h.fn = [switch_at, flip_from_rising](const LabelRequest& req) -> Color {
        const View& v = req.view;
        const i64 ord = v.reveal_ord(v.pending_component(), v.pending_local());
        static const Color rising[3] = {2, 1, 3};
        static const Color falling[3] = {1, 2, 3};
        const bool late = static_cast<std::uint64_t>(ord) >= switch_at;
        const Color* pat = (late != flip_from_rising) ? rising : falling;
        const Color want = pat[ord % 3];
        const std::vector<Color> nb = gridlocal::visible_neighbor_labels(v);
        auto taken = [&](Color c) {
            for (Color x : nb)
                if (x == c) return true;
            return false;
        };
        if (!taken(want)) return want;
        for (Color c : {Color{1}, Color{2}, Color{3}})
            if (!taken(c)) return c;
        return want;
    };
    return h;
}

// Constant drift, never switching: every decision is already "late".
inline AlgorithmHandle steady_drift(bool rising) {
    return patterned_drift(0, !rising);
}

// The randomized family used against the guarded-arm squeeze: every seed
// picks a switch count in [25, 400] and a direction, which measurably breaks
// any 4T+4 bound between the comparison run and some arm segment.
inline AlgorithmHandle drift_family(std::uint64_t seed) {
    DecisionStream cfg(seed, 0);
    const std::uint64_t sw = 25 + cfg.below(376);
    const bool flip = cfg.coin();
    return patterned_drift(sw, flip);
}

}  // namespace testsupport
