#include "gridlocal/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace gridlocal {

bool color_valid(Color c) { return c >= 1 && c <= 3; }

int wildcard_indicator(Color c) { return c == 3 ? 1 : 0; }

int edge_potential(Color cu, Color cv) {
    if (cu == 3 || cv == 3) return 0;
    return static_cast<int>(cu) - static_cast<int>(cv);
}

int walk_potential(const std::vector<Color>& colors) {
    int p = 0;
    for (std::size_t i = 1; i < colors.size(); ++i) {
        p += edge_potential(colors[i - 1], colors[i]);
    }
    return p;
}

bool walk_has_improper_step(const std::vector<Color>& colors) {
    for (std::size_t i = 1; i < colors.size(); ++i) {
        if (colors[i - 1] == colors[i]) return true;
    }
    return false;
}

ClosedWalkVerdict check_closed_walk(const std::vector<Color>& colors) {
    ClosedWalkVerdict v;
    if (colors.size() < 2) {
        v.holds = true;
        return v;
    }
    std::vector<Color> closed = colors;
    closed.push_back(colors.front());
    v.potential = walk_potential(closed);
    v.improper = walk_has_improper_step(closed);
    v.holds = (v.potential == 0) || v.improper;
    return v;
}

int parity_predict(Color cu, Color cv, i64 len) {
    i64 s = wildcard_indicator(cu) + wildcard_indicator(cv) + len;
    return static_cast<int>(((s % 2) + 2) % 2);
}

i64 max_potential_bound(i64 len, i64 slack) {
    if (len < 0) throw std::domain_error("max_potential_bound: negative length");
    return len / 3 + slack;
}

i64 max_path_potential_exact(int len) {
    if (len < 0) throw std::domain_error("max_path_potential_exact: negative length");
    // State: (last color, running potential) -> reachable. Walk every proper
    // color sequence of the given edge count and track the extreme potential.
    std::map<std::pair<Color, int>, bool> reach;
    for (Color c = 1; c <= 3; ++c) reach[{c, 0}] = true;
    i64 best = 0;
    for (int step = 0; step < len; ++step) {
        std::map<std::pair<Color, int>, bool> next;
        for (const auto& [state, ok] : reach) {
            if (!ok) continue;
            auto [last, p] = state;
            for (Color c = 1; c <= 3; ++c) {
                if (c == last) continue;
                next[{c, p + edge_potential(last, c)}] = true;
            }
        }
        reach = std::move(next);
        for (const auto& [state, ok] : reach) {
            if (ok) best = std::max(best, static_cast<i64>(std::abs(state.second)));
        }
    }
    return best;
}

i64 smallest_potential_slack(int max_len) {
    i64 slack = 0;
    for (int l = 0; l <= max_len; ++l) {
        const i64 exact = max_path_potential_exact(l);
        slack = std::max(slack, exact - l / 3);
    }
    return slack;
}

std::size_t ivt_witness(const std::vector<i64>& f, i64 k) {
    if (f.empty()) throw std::domain_error("ivt_witness: empty sequence");
    if (k < 0) throw std::domain_error("ivt_witness: negative step bound");
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (std::llabs(f[i] - f[i - 1]) > k) {
            throw std::domain_error("ivt_witness: step bound violated");
        }
    }
    if (f.front() < 0 || f.back() > 0) {
        throw std::domain_error("ivt_witness: endpoints do not bracket zero");
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::llabs(f[i]) <= k) return i;
    }
    // Unreachable when the preconditions hold: the sequence starts >= 0,
    // ends <= 0, and moves by at most k per step, so some value lands in
    // [-k, k].
    throw std::logic_error("ivt_witness: no witness despite valid preconditions");
}

std::size_t mvt_witness(const std::vector<i64>& f, i64 k, i64 ell) {
    if (f.size() < 2) throw std::domain_error("mvt_witness: sequence too short");
    const i64 n = static_cast<i64>(f.size()) - 1;
    if (ell <= 0 || ell >= n) throw std::domain_error("mvt_witness: window out of range");
    if (f.front() != 0 || f.back() != 0) {
        throw std::domain_error("mvt_witness: endpoints must vanish");
    }
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (std::llabs(f[i] - f[i - 1]) > k) {
            throw std::domain_error("mvt_witness: step bound violated");
        }
    }
    if (static_cast<double>(ell) * static_cast<double>(ell) >= static_cast<double>(n)) {
        throw std::domain_error("mvt_witness: window too wide for span");
    }
    for (std::size_t x = 0; x + static_cast<std::size_t>(ell) < f.size(); ++x) {
        if (std::llabs(f[x + static_cast<std::size_t>(ell)] - f[x]) <= 2 * k) return x;
    }
    // With ell^2 < n, tiling [0, n] by disjoint windows of width ell forces
    // some window increment into [-2k, 2k]; otherwise |f(n) - f(0)| would
    // exceed what the step bound allows.
    throw std::logic_error("mvt_witness: no witness despite valid preconditions");
}

WalkPotentialProfile potential_profile(const std::vector<Color>& walk_colors,
                                       const std::vector<std::size_t>& sample_index) {
    WalkPotentialProfile out;
    if (walk_colors.empty()) return out;
    std::vector<i64> prefix(walk_colors.size(), 0);
    for (std::size_t i = 1; i < walk_colors.size(); ++i) {
        prefix[i] = prefix[i - 1] + edge_potential(walk_colors[i - 1], walk_colors[i]);
    }
    out.f.reserve(sample_index.size());
    std::size_t prev = 0;
    bool first = true;
    for (std::size_t idx : sample_index) {
        if (idx >= walk_colors.size()) {
            throw std::out_of_range("potential_profile: sample index past walk end");
        }
        if (!first && idx < prev) {
            throw std::invalid_argument("potential_profile: sample indices must not decrease");
        }
        if (!first && idx - prev > 2) {
            throw std::invalid_argument(
                "potential_profile: samples more than two walk steps apart");
        }
        out.f.push_back(prefix[idx]);
        prev = idx;
        first = false;
    }
    return out;
}

}  // namespace gridlocal
