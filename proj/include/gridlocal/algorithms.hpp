#pragma once

#include <string>
#include <vector>

#include "gridlocal/harness.hpp"

namespace gridlocal {

// Labels of the pending node's already-labeled grid neighbors, in the fixed
// east/north/west/south scan order.
std::vector<Color> visible_neighbor_labels(const View& view);

// Smallest color not used by any visible labeled neighbor; 1 when boxed in.
AlgorithmHandle greedy_first_fit();

// 1 or 2 by coordinate parity in the component frame; 3 when that choice
// collides with a visible neighbor (possible only after frame merges).
AlgorithmHandle component_parity();

// Uniform choice among non-colliding colors, drawn from the per-decision
// stream; uniform over all three when everything collides.
AlgorithmHandle seeded_hash();

// Out-of-model cheater: reads the true host-grid coordinates through the
// backdoor and 2-colors by global parity. Exists as a negative control for
// the information-hiding claim; never selectable without the backdoor flag.
AlgorithmHandle backdoor_parity_cheater();

// Registry lookup by CLI name ("greedy", "parity", "hash"); when
// allow_backdoor is set, "cheater" resolves too. Throws on unknown names.
AlgorithmHandle algorithm_by_name(const std::string& name, bool allow_backdoor = false);

}  // namespace gridlocal
