#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridlocal/geometry.hpp"

namespace gridlocal {

// Colors are 1..3. A walk potential treats color 3 as a wildcard: an edge
// contributes c(u) - c(v) only when both endpoints carry color 1 or 2,
// otherwise it contributes nothing.
using Color = std::uint8_t;

inline constexpr Color kNoColor = 0;

bool color_valid(Color c);

// 1 when the color is 3, else 0. Feeds the parity rule below.
int wildcard_indicator(Color c);

// Contribution of the directed edge u -> v.
int edge_potential(Color cu, Color cv);

// Sum of edge potentials along the ordered color sequence.
int walk_potential(const std::vector<Color>& colors);

// Whether any consecutive pair in the sequence repeats a color.
bool walk_has_improper_step(const std::vector<Color>& colors);

struct ClosedWalkVerdict {
    bool holds = false;      // potential is zero, or propriety was violated
    bool improper = false;   // a repeated color on consecutive walk nodes
    int potential = 0;
};

// For a closed walk (first node repeated at the end of `colors` is NOT
// expected; the wrap-around edge is added here). A properly colored closed
// grid walk always has potential zero, so a nonzero potential certifies an
// improper edge somewhere on the walk.
ClosedWalkVerdict check_closed_walk(const std::vector<Color>& colors);

// Parity of the potential of any properly colored path between endpoints of
// colors cu, cv at walk length len:  p = i(u) + i(v) + len (mod 2), where
// i(.) is the wildcard indicator.
int parity_predict(Color cu, Color cv, i64 len);

// Ceiling on |p| over properly colored walks of the given edge count:
// floor(len / 3) + slack.
i64 max_potential_bound(i64 len, i64 slack);

// Exact maximum of |p| over all properly colored paths with `len` edges,
// computed by dynamic programming over (last color, running potential).
// Independent of max_potential_bound; used to pin the smallest valid slack.
i64 max_path_potential_exact(int len);

// Smallest integer s such that max_path_potential_exact(l) <=
// floor(l / 3) + s for all 0 <= l <= max_len.
i64 smallest_potential_slack(int max_len);

// First x with |f(x)| <= k, given |f(x+1) - f(x)| <= k, f(0) >= 0 and
// f(back) <= 0. Throws std::domain_error when a precondition fails.
std::size_t ivt_witness(const std::vector<i64>& f, i64 k);

// First x with |f(x + ell) - f(x)| <= 2k, given the step bound k,
// f(0) == f(back) == 0 and 0 < ell < sqrt(back). Throws std::domain_error
// when a precondition fails.
std::size_t mvt_witness(const std::vector<i64>& f, i64 k, i64 ell);

// Prefix potentials along a unit-step walk, sampled at marked positions
// (one per staircase column). Steps between consecutive samples cover at
// most two walk edges, so the profile moves by at most 2.
struct WalkPotentialProfile {
    std::vector<i64> f;       // f[k] = potential of the walk prefix at column k
    i64 step_bound = 2;
};

WalkPotentialProfile potential_profile(const std::vector<Color>& walk_colors,
                                       const std::vector<std::size_t>& sample_index);

}  // namespace gridlocal
