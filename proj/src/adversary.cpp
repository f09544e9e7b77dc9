#include "gridlocal/adversary.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace gridlocal {

using nlohmann::ordered_json;

// ---------------------------------------------------------------- params

namespace {

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string ParamReport::regime() const {
    if (!accepted) return "rejected";
    return guaranteed ? "guaranteed" : "empirical";
}

ordered_json ParamReport::to_json() const {
    ordered_json checks_j = ordered_json::array();
    for (const ParamCheck& c : checks) {
        checks_j.push_back(ordered_json{{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    }
    return ordered_json{{"accepted", accepted},        {"regime", regime()},
                        {"guaranteed", guaranteed},    {"mvt_ok", mvt_ok},
                        {"feasible", feasible},        {"margin", margin},
                        {"margin_connector", margin_connector},
                        {"width", width},              {"est_cells", est_cells},
                        {"checks", std::move(checks_j)}};
}

ParamReport validate_params(const AdversaryParams& p) {
    ParamReport r;
    auto add = [&](const char* name, bool ok, std::string detail) {
        r.checks.push_back(ParamCheck{name, ok, std::move(detail)});
        return ok;
    };

    const double Td = p.T;
    const double cd = static_cast<double>(p.c_ledger);
    const double kd = p.kappa;
    r.margin = kd - 2.0 - 2.0 * ((12.0 * Td + 7.0) / 3.0 + cd);
    r.margin_connector = kd - 2.0 - 2.0 * ((kd + 2.0 * Td + 7.0) / 3.0 + cd);

    bool ok = true;
    ok &= add("kappa_range", p.kappa >= 1 && p.kappa <= 40,
              "1 <= kappa = " + std::to_string(p.kappa) + " <= 40");
    ok &= add("radius_range", p.T >= 1 && p.T <= 16,
              "1 <= T = " + std::to_string(p.T) + " <= 16");
    ok &= add("budget_positive", p.n_budget >= 1,
              "n = " + std::to_string(p.n_budget) + " >= 1");
    ok &= add("trials_nonnegative", p.trials >= 0,
              "trials = " + std::to_string(p.trials) + " >= 0");
    ok &= add("slack_nonnegative", p.c_ledger >= 0,
              "c = " + std::to_string(p.c_ledger) + " >= 0");
    const bool theta_ok =
        p.theta.den >= 1 && std::llabs(p.theta.num) <= p.theta.den;
    ok &= add("slope_in_range", theta_ok, "|" + to_string(p.theta) + "| <= 1");

    const bool dims_ok = p.kappa >= 1 && p.kappa <= 40 && p.T >= 1 && p.T <= 16;
    const int k0 = (dims_ok && p.L0 >= 1) ? AdversaryDriver::max_line_level(p.L0, p.T) : 0;
    const i64 b0 = dims_ok ? AdversaryDriver::line_length_bound(k0, p.T) : 1;
    ok &= add("base_level", k0 >= 1, "doubling level at L0 = " + std::to_string(p.L0) +
                                         " is " + std::to_string(k0) + " >= 1");
    ok &= add("arm_length", p.L1 >= b0,
              "L1 = " + std::to_string(p.L1) + " >= " + std::to_string(b0));

    if (dims_ok) {
        r.width = boost_width(p.kappa, p.T);
        const i64 unit = 2 * static_cast<i64>(p.T) + 1;
        r.est_cells = unit * (2 * b0 + 4 * p.L1) +
                      (r.width + unit) * (static_cast<i64>(p.kappa) + 2 * p.T + 5) +
                      unit * unit * 8 + 1024;
    }

    r.accepted = ok;
    r.guaranteed = r.margin > 0.0;
    const double wd = static_cast<double>(r.width);
    r.mvt_ok = static_cast<double>(p.L1) > wd * wd;
    r.feasible = r.accepted && r.est_cells <= p.n_budget;

    add("strike_margin", r.guaranteed,
        "kappa - 2 - 2*((12T+7)/3 + c) = " + fmt2(r.margin) + " > 0");
    add("window_scan", r.mvt_ok,
        "L1 = " + std::to_string(p.L1) + " > width^2 = " + fmt2(wd * wd));
    add("budget_estimate", r.feasible,
        "estimated cells " + std::to_string(r.est_cells) +
            " <= n = " + std::to_string(p.n_budget));
    return r;
}

// -------------------------------------------------------------- providers

namespace {

void check_range(const char* tag, i64 v, i64 bound) {
    if (v < 0 || v >= bound) {
        throw std::logic_error(std::string("decision '") + tag + "' out of range: " +
                               std::to_string(v) + " not in [0, " + std::to_string(bound) +
                               ")");
    }
}

std::uint64_t fnv1a(const char* s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ULL;
    return h;
}

}  // namespace

i64 AdaptiveChoices::guess(const char* tag, i64 bound, const std::function<i64()>& compute) {
    i64 v = compute();
    check_range(tag, v, bound);
    return record(v);
}

i64 AdaptiveChoices::plan(const char* tag, i64 bound, i64, const std::function<i64()>& compute) {
    i64 v = compute();
    check_range(tag, v, bound);
    return record(v);
}

i64 AdaptiveChoices::react(const char*, const std::function<i64()>& compute) {
    return record(compute());
}

bool AdaptiveChoices::stop_poll(const char*, i64, i64, const std::function<i64()>& compute) {
    return record(compute() != 0 ? 1 : 0) != 0;
}

ScriptedChoices::ScriptedChoices(std::uint64_t seed) : stream_(seed, 0) {}

i64 ScriptedChoices::guess(const char* tag, i64 bound, const std::function<i64()>&) {
    if (bound < 1) throw std::logic_error(std::string("empty choice range for '") + tag + "'");
    return record(static_cast<i64>(stream_.below(static_cast<std::uint64_t>(bound))));
}

i64 ScriptedChoices::plan(const char* tag, i64 bound, i64 canonical,
                          const std::function<i64()>&) {
    check_range(tag, canonical, bound);
    return record(canonical);
}

i64 ScriptedChoices::react(const char*, const std::function<i64()>&) { return record(0); }

bool ScriptedChoices::stop_poll(const char* tag, i64 index, i64 index_bound,
                                const std::function<i64()>&) {
    auto it = stop_targets_.find(tag);
    if (it == stop_targets_.end()) {
        const i64 target =
            1 + static_cast<i64>((DecisionStream(stream_.next(), fnv1a(tag))
                                      .below(static_cast<std::uint64_t>(std::max<i64>(index_bound, 1)))));
        it = stop_targets_.emplace(tag, target).first;
    }
    return record(index >= it->second ? 1 : 0) != 0;
}

i64 ReplayChoices::next() {
    if (cursor_ >= source_.values.size()) {
        throw std::logic_error("replayed decision log exhausted: the runs diverged");
    }
    return record(source_.values[cursor_++]);
}

i64 ReplayChoices::guess(const char*, i64, const std::function<i64()>&) { return next(); }
i64 ReplayChoices::plan(const char*, i64, i64, const std::function<i64()>&) { return next(); }
i64 ReplayChoices::react(const char*, const std::function<i64()>&) { return next(); }
bool ReplayChoices::stop_poll(const char*, i64, i64, const std::function<i64()>&) {
    return next() != 0;
}

// ---------------------------------------------------------- free helpers

i64 diag_window_index(const std::vector<i64>& f, i64 ell, i64 x_max, bool allow_mvt) {
    const i64 n = static_cast<i64>(f.size());
    if (n == 0 || ell < 0 || x_max < 0 || x_max + ell >= n) {
        throw std::domain_error("window search out of range");
    }
    if (allow_mvt && ell >= 1 && f.front() == 0 && f.back() == 0) {
        bool steps_ok = true;
        for (std::size_t k = 0; k + 1 < f.size() && steps_ok; ++k) {
            if (std::llabs(f[k + 1] - f[k]) > 2) steps_ok = false;
        }
        const i64 b = n - 1;
        if (steps_ok && ell * ell < b) {
            const i64 w = static_cast<i64>(mvt_witness(f, 2, ell));
            if (w <= x_max) return w;
        }
    }
    i64 best = 0;
    i64 best_mag = std::numeric_limits<i64>::max();
    for (i64 x = 0; x <= x_max; ++x) {
        const i64 mag = std::llabs(f[static_cast<std::size_t>(x + ell)] -
                                   f[static_cast<std::size_t>(x)]);
        if (mag < best_mag) {
            best_mag = mag;
            best = x;
        }
    }
    return best;
}

Box host_reservation(const AdversaryParams& p) {
    const int k0 = std::max(0, AdversaryDriver::max_line_level(std::max<i64>(p.L0, 1),
                                                               std::max(p.T, 1)));
    const i64 base = AdversaryDriver::line_length_bound(k0, std::max(p.T, 1));
    const int kw = std::clamp(p.kappa, 0, 40);
    const i64 w = boost_width(kw, std::clamp(p.T, 0, 16));
    const i64 pad = w + base + 16 * (static_cast<i64>(p.T) + 2) + kw + 64;
    const i64 m = p.T + 1;
    return Box{-pad - m, -p.L1 - pad - m, p.L1 + pad + m, p.L1 + pad + m};
}

Certificate alignment_attack(GameState& state, const LabeledWalk& target,
                             const LabeledWalk& threat) {
    const AdversaryParams& P = state.params();
    const i64 g = P.gap();
    if (target.nodes.size() < 2 || target.nodes.size() != threat.nodes.size()) {
        throw std::domain_error("alignment attack needs two equal runs of >= 2 nodes");
    }
    auto run_dir = [](const LabeledWalk& w) {
        const GridCoord d = w.nodes[1] - w.nodes[0];
        if (l1_distance(w.nodes[1], w.nodes[0]) != 1) {
            throw std::domain_error("alignment attack run is not unit-step");
        }
        for (std::size_t k = 1; k + 1 < w.nodes.size(); ++k) {
            if (!(w.nodes[k + 1] - w.nodes[k] == d)) {
                throw std::domain_error("alignment attack run is not straight");
            }
        }
        return d;
    };
    const GridCoord dt = run_dir(target);
    const GridCoord dh = run_dir(threat);
    if (!(dt == dh)) throw std::domain_error("alignment attack runs are not parallel");
    if (state.same_group(target.frag, threat.frag)) {
        throw std::domain_error("alignment attack runs are already placed");
    }

    auto colors_of = [&](const LabeledWalk& w) {
        std::vector<Color> cs;
        cs.reserve(w.nodes.size());
        for (const GridCoord& n : w.nodes) cs.push_back(state.label_in_group(w.frag, n));
        return cs;
    };
    const std::vector<Color> ct = colors_of(target);
    const std::vector<Color> ch = colors_of(threat);
    const i64 pt = walk_potential(ct);
    const i64 ph = walk_potential(ch);
    if (std::llabs(pt - ph) < 4 * static_cast<i64>(P.T) + 5) {
        throw std::domain_error("potential gap " + std::to_string(std::llabs(pt - ph)) +
                                " is below the attack threshold " +
                                std::to_string(4 * P.T + 5));
    }

    // Place the threat beside the target at the minimal legal separation,
    // endpoints on common perpendicular axes.
    const GridCoord perp = (dt.y == 0) ? GridCoord{0, -1} : GridCoord{1, 0};
    const GridCoord off =
        (target.nodes.front() + GridCoord{perp.x * g, perp.y * g}) - threat.nodes.front();
    state.commit(target.frag, threat.frag, off);

    for (const std::size_t end : {std::size_t{0}, target.nodes.size() - 1}) {
        for (i64 t = 1; t < g; ++t) {
            state.reveal_and_label(target.frag,
                                   target.nodes[end] + GridCoord{perp.x * t, perp.y * t});
        }
    }

    // The rectangle: target run, far-end rung, threat run reversed, near rung.
    std::vector<GridCoord> cyc;
    cyc.reserve(2 * target.nodes.size() + 2 * static_cast<std::size_t>(g));
    for (const GridCoord& n : target.nodes) cyc.push_back(n);
    for (i64 t = 1; t < g; ++t) {
        cyc.push_back(target.nodes.back() + GridCoord{perp.x * t, perp.y * t});
    }
    for (std::size_t k = threat.nodes.size(); k-- > 0;) cyc.push_back(threat.nodes[k] + off);
    for (i64 t = g - 1; t >= 1; --t) {
        cyc.push_back(target.nodes.front() + GridCoord{perp.x * t, perp.y * t});
    }

    std::vector<Color> cyc_colors;
    cyc_colors.reserve(cyc.size());
    for (const GridCoord& c : cyc) {
        cyc_colors.push_back(state.label_in_group(target.frag, c));
    }

    if (!state.improper_edges().empty()) return state.make_improper_certificate();
    const ClosedWalkVerdict verdict = check_closed_walk(cyc_colors);
    if (verdict.potential == 0) {
        throw std::logic_error(
            "alignment attack closed with zero potential and no improper edge");
    }

    // The rectangle's potential is pinned nonzero while every face of a fully
    // labeled, properly colored region sums to zero. Flooding the strip
    // between the runs therefore forces an improper edge before it completes.
    for (i64 t = 0; t < static_cast<i64>(target.nodes.size()); ++t) {
        for (i64 s = 1; s < g; ++s) {
            const GridCoord cell =
                target.nodes[static_cast<std::size_t>(t)] + GridCoord{perp.x * s, perp.y * s};
            if (state.is_revealed(target.frag, cell)) continue;
            state.reveal_and_label(target.frag, cell);
            if (!state.improper_edges().empty()) return state.make_improper_certificate();
        }
    }

    // Unreachable when the flood really covered the enclosed faces; kept as a
    // certificate rather than an assertion so a match can still end.
    Certificate c;
    c.kind = Certificate::Kind::PotentialViolation;
    for (const GridCoord& n : cyc) c.walk.push_back(state.node_ref(target.frag, n));
    c.walk_colors = cyc_colors;
    c.p_value = verdict.potential;
    c.nodes_spent = state.spent();
    return c;
}

// ------------------------------------------------------- driver basics

AdversaryDriver::AdversaryDriver(GameState& state, ChoiceProvider& choices,
                                 const std::vector<GridCoord>* worlds)
    : state_(state), choices_(choices), worlds_(worlds), P_(state.params()),
      gap0_(state.params().gap()) {}

i64 AdversaryDriver::line_length_bound(int level, int T) {
    i64 len = 1;
    for (int j = 0; j < level; ++j) len = 2 * len + 2 * static_cast<i64>(T) + 2;
    return len;
}

int AdversaryDriver::max_line_level(i64 max_len, int T) {
    int level = 0;
    while (level < 40 && line_length_bound(level + 1, T) <= max_len) ++level;
    return level;
}

int AdversaryDriver::new_fragment(const Box& reservation) {
    std::optional<GridCoord> world;
    if (worlds_ != nullptr) {
        const std::size_t id = static_cast<std::size_t>(state_.fragment_count());
        if (id >= worlds_->size()) {
            throw std::logic_error("world assignment is shorter than the build");
        }
        world = (*worlds_)[id];
    }
    return state_.make_fragment(reservation, world);
}

int AdversaryDriver::make_host() { return new_fragment(host_reservation(P_)); }

Color AdversaryDriver::label_at(int frag, GridCoord g) const {
    return state_.label_in_group(frag, g);
}

void AdversaryDriver::poll_win(const char* tag) {
    const i64 hit = choices_.react(tag, [&]() -> i64 {
        return state_.improper_edges().empty() ? 0 : 1;
    });
    if (hit != 0) throw MatchDecided{state_.make_improper_certificate()};
}

void AdversaryDriver::host_reveal(int host_frag, GridCoord cell) {
    if (state_.is_revealed(host_frag, cell)) return;
    state_.reveal_and_label(host_frag, cell);
    host_cells_.push_back(cell);
}

// --------------------------------------------------------- line builds

AdversaryDriver::LinePiece AdversaryDriver::line_build(int level, GridCoord dir,
                                                       const Box& leaf_box,
                                                       const char* gap_tag) {
    if (level == 0) {
        const int frag = new_fragment(leaf_box);
        state_.reveal_and_label(frag, {0, 0});
        return LinePiece{frag, 0, 0, 0};
    }
    const LinePiece A = line_build(level - 1, dir, leaf_box, gap_tag);
    const LinePiece B = line_build(level - 1, dir, leaf_box, gap_tag);
    auto pos = [&](i64 t) { return GridCoord{dir.x * t, dir.y * t}; };

    // Gap parity rule: the junction potential q must not have the parity of
    // the children's level, which removes the one value (|q| = level-1) that
    // could stall the growth of the certified pair.
    const i64 bit = choices_.guess(gap_tag, 2, [&]() -> i64 {
        const Color ca = label_at(A.root_frag, pos(A.pb));
        const Color cb = label_at(B.root_frag, pos(B.pa));
        const i64 len = std::llabs((A.hi + gap0_ + B.pa) - A.pb);
        const int par = parity_predict(ca, cb, len);
        return par != ((level - 1) & 1) ? 0 : 1;
    });
    const i64 g = gap0_ + bit;

    state_.commit(A.root_frag, B.root_frag, pos(A.hi + g));
    for (i64 t = A.hi + 1; t < A.hi + g; ++t) {
        state_.reveal_and_label(A.root_frag, pos(t));
    }

    LinePiece out{A.root_frag, A.hi + g + B.hi, A.pa, A.pb};
    poll_win(gap_tag);

    if (choices_.adaptive()) {
        const std::vector<i64> phi = line_phi(out, dir);
        const i64 shift = A.hi + g;
        const std::array<i64, 2> from{A.pa, A.pb};
        const std::array<i64, 2> to{B.pa + shift, B.pb + shift};
        i64 best = -1;
        for (const i64 a : from) {
            for (const i64 b : to) {
                const i64 d = phi[static_cast<std::size_t>(b)] -
                              phi[static_cast<std::size_t>(a)];
                if (std::llabs(d) > best) {
                    best = std::llabs(d);
                    if (d >= 0) {
                        out.pa = a;
                        out.pb = b;
                    } else {
                        out.pa = b;
                        out.pb = a;
                    }
                }
            }
        }
        if (best < level) {
            throw std::logic_error("line merge failed to grow the certified pair");
        }
    }
    return out;
}

std::vector<i64> AdversaryDriver::line_phi(const LinePiece& piece, GridCoord dir) const {
    std::vector<i64> phi(static_cast<std::size_t>(piece.hi) + 1, 0);
    Color prev = label_at(piece.root_frag, {0, 0});
    for (i64 t = 1; t <= piece.hi; ++t) {
        const Color cur = label_at(piece.root_frag, {dir.x * t, dir.y * t});
        phi[static_cast<std::size_t>(t)] =
            phi[static_cast<std::size_t>(t - 1)] + edge_potential(prev, cur);
        prev = cur;
    }
    return phi;
}

namespace {

Box line_leaf_box(GridCoord dir, i64 span, int T) {
    const i64 m = static_cast<i64>(T) + 1;
    if (dir.x != 0) return Box{-m, -m, span + m, m};
    return Box{-m, -m, m, span + m};
}

}  // namespace

RowArtifact AdversaryDriver::boost_line(int level, GridCoord dir) {
    const Box leaf = line_leaf_box(dir, line_length_bound(level, P_.T), P_.T);
    const LinePiece piece = line_build(level, dir, leaf, "line");
    poll_win("line");
    RowArtifact art;
    art.root_frag = piece.root_frag;
    art.dir = dir;
    art.origin = {0, 0};
    art.lo = 0;
    art.hi = piece.hi;
    art.pa = piece.pa;
    art.pb = piece.pb;
    if (choices_.adaptive()) {
        const std::vector<i64> phi = line_phi(piece, dir);
        art.pair_potential = phi[static_cast<std::size_t>(piece.pb)] -
                             phi[static_cast<std::size_t>(piece.pa)];
        art.end_potential = phi.back();
    }
    return art;
}

RowArtifact AdversaryDriver::base_line(int level, GridCoord dir, const char* gap_tag) {
    const Box leaf = line_leaf_box(dir, line_length_bound(level, P_.T), P_.T);
    const LinePiece piece = line_build(level, dir, leaf, gap_tag);
    poll_win(gap_tag);
    const i64 len = piece.hi + 1;

    // Exact-potential window: the shortest sub-run whose endpoint potential
    // difference is exactly +-level. It exists whenever the run is proper,
    // because prefix potentials move in unit steps.
    std::optional<std::pair<i64, i64>> cached;
    auto extract = [&]() -> std::pair<i64, i64> {
        if (cached) return *cached;
        const std::vector<i64> phi = line_phi(piece, dir);
        for (i64 w = 1; w <= piece.hi; ++w) {
            for (i64 lo = 0; lo + w <= piece.hi; ++lo) {
                if (std::llabs(phi[static_cast<std::size_t>(lo + w)] -
                               phi[static_cast<std::size_t>(lo)]) == level) {
                    cached = {lo, w + 1};
                    return *cached;
                }
            }
        }
        throw std::logic_error("no exact-potential window in the base run");
    };

    const std::string t_lo = std::string(gap_tag) + "_lo";
    const std::string t_len = std::string(gap_tag) + "_len";
    const i64 w_lo =
        choices_.plan(t_lo.c_str(), len, 0, [&] { return extract().first; });
    const i64 w_len =
        choices_.plan(t_len.c_str(), len + 1, len, [&] { return extract().second; });

    RowArtifact art;
    art.root_frag = piece.root_frag;
    art.dir = dir;
    art.origin = {0, 0};
    art.lo = 0;
    art.hi = piece.hi;
    art.pa = w_lo;
    art.pb = w_lo + w_len - 1;
    if (choices_.adaptive()) {
        const std::vector<i64> phi = line_phi(piece, dir);
        art.pair_potential = phi[static_cast<std::size_t>(art.pb)] -
                             phi[static_cast<std::size_t>(art.pa)];
        art.end_potential = phi.back();
        if (std::llabs(art.pair_potential) != level) {
            throw std::logic_error("base window potential mismatch");
        }
    }
    return art;
}

// ---------------------------------------------------------- guarded arms

RowArtifact AdversaryDriver::guarded_run(int host_frag, GridCoord arm_origin, GridCoord dir,
                                         i64 max_len, const ArmGuard& guard, bool exact_stop,
                                         i64 p_start, const char* tag_prefix, i64* out_len,
                                         i64* out_p) {
    const std::string band_tag = std::string(tag_prefix) + "_band";
    const std::string stop_tag = std::string(tag_prefix) + "_stop";
    const std::string trim_tag = std::string(tag_prefix) + "_trim";
    const i64 L = guard.seg_len;
    const i64 seg_base = exact_stop ? 1 : 0;   // columns hang off a revealed corner

    bool flip = false;
    if (guard.base_walk.nodes.size() >= 2) {
        const GridCoord bd = guard.base_walk.nodes[1] - guard.base_walk.nodes[0];
        flip = !(bd == dir);
    }

    auto at = [&](i64 t) {
        return GridCoord{arm_origin.x + dir.x * t, arm_origin.y + dir.y * t};
    };

    std::vector<i64> pfx;
    pfx.reserve(static_cast<std::size_t>(max_len) + 1);
    host_reveal(host_frag, at(0));
    Color prev = label_at(host_frag, at(0));
    pfx.push_back(p_start);

    i64 stopped = -1;
    i64 t_end = max_len - 1;
    for (i64 t = 1; t < max_len; ++t) {
        host_reveal(host_frag, at(t));
        const Color cur = label_at(host_frag, at(t));
        pfx.push_back(pfx.back() + edge_potential(prev, cur));
        prev = cur;

        if (exact_stop) {
            const bool stop = choices_.stop_poll(stop_tag.c_str(), t, max_len - 1,
                                                 [&]() -> i64 { return pfx.back() == 0; });
            if (stop) {
                stopped = t;
                t_end = t;
                break;
            }
        }

        const i64 done = t - seg_base + 1;
        if (L > 0 && done > 0 && done % L == 0) {
            const i64 s_first = t - L + 1;
            const i64 p_seg_fwd = pfx[static_cast<std::size_t>(t)] -
                                  pfx[static_cast<std::size_t>(s_first)];
            const i64 p_seg = flip ? -p_seg_fwd : p_seg_fwd;
            const i64 fire = choices_.react(band_tag.c_str(), [&]() -> i64 {
                return std::llabs(p_seg - guard.base_p) >= 4 * static_cast<i64>(P_.T) + 5;
            });
            if (fire != 0) {
                LabeledWalk seg;
                seg.frag = host_frag;
                if (!flip) {
                    for (i64 k = s_first; k <= t; ++k) seg.nodes.push_back(at(k));
                } else {
                    for (i64 k = t; k >= s_first; --k) seg.nodes.push_back(at(k));
                }
                throw MatchDecided{alignment_attack(state_, seg, guard.base_walk)};
            }
            poll_win(band_tag.c_str());
        }
    }

    i64 chosen = exact_stop ? stopped : max_len - 1;
    if (exact_stop && chosen < 0) {
        // Loop cap reached without an exact cancel: keep the prefix with the
        // smallest residual (longest such prefix on ties).
        chosen = choices_.plan(trim_tag.c_str(), max_len, max_len - 1, [&]() -> i64 {
            i64 best_t = 1;
            i64 best_mag = std::numeric_limits<i64>::max();
            for (i64 t = 1; t < max_len; ++t) {
                const i64 mag = std::llabs(pfx[static_cast<std::size_t>(t)]);
                if (mag < best_mag || (mag == best_mag && t > best_t)) {
                    best_mag = mag;
                    best_t = t;
                }
            }
            return best_t;
        });
    }

    if (out_len) *out_len = chosen;
    if (out_p) *out_p = pfx[static_cast<std::size_t>(chosen)];

    RowArtifact art;
    art.root_frag = host_frag;
    art.dir = dir;
    art.origin = arm_origin;
    art.lo = 0;
    art.hi = t_end;
    art.pa = 0;
    art.pb = chosen;
    art.end_potential = pfx[static_cast<std::size_t>(chosen)] - p_start;
    return art;
}

RowArtifact AdversaryDriver::quasilinear_row(int host_frag) {
    const int k0 = max_line_level(P_.L0, P_.T);
    const RowArtifact base = base_line(k0, {1, 0}, "row");
    const i64 L = base.pb - base.pa + 1;
    i64 N = (P_.L1 / L) * L;
    if (N < L) N = L;

    ArmGuard guard;
    guard.base_walk.frag = base.root_frag;
    for (i64 t = base.pa; t <= base.pb; ++t) guard.base_walk.nodes.push_back(base.at(t));
    guard.base_p = base.pair_potential;
    guard.seg_len = L;

    i64 arm_len = 0, arm_p = 0;
    RowArtifact arm = guarded_run(host_frag, {0, 0}, {1, 0}, N, guard, false, 0, "row",
                                  &arm_len, &arm_p);
    return arm;
}

LPathArtifact AdversaryDriver::build_lpath(int host_frag) {
    const RowArtifact arm = quasilinear_row(host_frag);
    const i64 N = arm.length();
    const i64 p_row = arm.end_potential;

    const int k0 = max_line_level(P_.L0, P_.T);
    const RowArtifact cbase = base_line(k0, {0, 1}, "col");
    const i64 Lc = cbase.pb - cbase.pa + 1;

    // Grow the column toward cancellation: pick the vertical direction whose
    // expected per-segment contribution opposes the row potential.
    const i64 bit = choices_.guess("col_dir", 2, [&]() -> i64 {
        const i64 sr = (p_row > 0) - (p_row < 0);
        const i64 sc = (cbase.pair_potential > 0) - (cbase.pair_potential < 0);
        if (sr == 0 || sc == 0) return 0;
        return sc == -sr ? 0 : 1;
    });
    const GridCoord dcol = bit == 0 ? GridCoord{0, 1} : GridCoord{0, -1};

    ArmGuard guard;
    guard.base_walk.frag = cbase.root_frag;
    for (i64 t = cbase.pa; t <= cbase.pb; ++t) guard.base_walk.nodes.push_back(cbase.at(t));
    guard.base_p = cbase.pair_potential;
    guard.seg_len = Lc;

    const i64 cap = N - 1;
    i64 M = 0, pL = p_row;
    guarded_run(host_frag, {N - 1, 0}, dcol, cap + 1, guard, true, p_row, "col", &M, &pL);

    LPathArtifact lp;
    lp.row_len = N;
    lp.col_dir = bit == 0 ? 0 : 1;
    lp.col_len = M;
    lp.p_total = pL;
    lp.u = {0, 0};
    lp.v = {N - 1, dcol.y * M};
    return lp;
}

DiagonalWalk AdversaryDriver::reveal_diagonal(int host_frag, const LPathArtifact& lp) {
    DiagonalWalk walk = diagonal_walk(lp.u, lp.v);
    for (const GridCoord& g : walk.nodes) host_reveal(host_frag, g);
    poll_win("diag");
    return walk;
}

// ---------------------------------------------------------- slope builds

AdversaryDriver::SlopePiece AdversaryDriver::slope_build(int level, const Rat& m,
                                                         const Box& leaf_box) {
    if (level == 0) {
        const int frag = new_fragment(leaf_box);
        state_.reveal_and_label(frag, {0, 0});
        Parallelogram sh;
        sh.level = 0;
        sh.m = m;
        sh.anchor = {0, 0};
        sh.width = 0;
        sh.band_offset = Rat(0);
        return SlopePiece{frag, sh, {0, 0}, {0, 0}};
    }
    const SlopePiece A = slope_build(level - 1, m, leaf_box);
    const SlopePiece B = slope_build(level - 1, m, leaf_box);
    const LevelUp lu = level_up(A.shape, P_.T);

    // Same parity rule as the straight build; the up/down anchor choice
    // flips the junction parity because it moves the copy by one row.
    const i64 bit = choices_.guess("up", 2, [&]() -> i64 {
        const Color ca = label_at(A.root_frag, A.pb);
        const Color cb = label_at(B.root_frag, B.pa);
        const GridCoord placed = B.pa + (lu.down_anchor - B.shape.anchor);
        const int par = (wildcard_indicator(ca) + wildcard_indicator(cb) +
                         static_cast<int>((A.pb.x + A.pb.y + placed.x + placed.y) & 1)) &
                        1;
        return par != ((level - 1) & 1) ? 0 : 1;
    });
    const GridCoord target = bit != 0 ? lu.up_anchor : lu.down_anchor;
    const GridCoord off = target - B.shape.anchor;
    state_.commit(A.root_frag, B.root_frag, off);

    // Fill the enclosing region: east-to-west columns, south-to-north inside
    // a column, skipping nodes that are already revealed.
    const std::vector<GridCoord> cells = lu.next.cells();
    std::vector<std::pair<std::size_t, std::size_t>> columns;
    for (std::size_t s = 0; s < cells.size();) {
        std::size_t e = s;
        while (e < cells.size() && cells[e].x == cells[s].x) ++e;
        columns.emplace_back(s, e);
        s = e;
    }
    for (auto it = columns.rbegin(); it != columns.rend(); ++it) {
        for (std::size_t k = it->first; k < it->second; ++k) {
            if (!state_.is_revealed(A.root_frag, cells[k])) {
                state_.reveal_and_label(A.root_frag, cells[k]);
            }
        }
    }

    SlopePiece out{A.root_frag, lu.next, A.pa, A.pb};
    poll_win("up");

    if (choices_.adaptive()) {
        const auto phi = region_phi(A.root_frag, lu.next);
        const std::array<GridCoord, 2> from{A.pa, A.pb};
        const std::array<GridCoord, 2> to{B.pa + off, B.pb + off};
        i64 best = -1;
        for (const GridCoord& a : from) {
            for (const GridCoord& b : to) {
                const i64 d = phi.at(b) - phi.at(a);
                if (std::llabs(d) > best) {
                    best = std::llabs(d);
                    if (d >= 0) {
                        out.pa = a;
                        out.pb = b;
                    } else {
                        out.pa = b;
                        out.pb = a;
                    }
                }
            }
        }
        if (best < level) {
            throw std::logic_error("slope merge failed to grow the certified pair");
        }
    }
    return out;
}

std::unordered_map<GridCoord, i64, GridCoordHash> AdversaryDriver::region_phi(
    int root_frag, const Parallelogram& shape) const {
    const std::vector<GridCoord> cells = shape.cells();
    std::unordered_set<GridCoord, GridCoordHash> region(cells.begin(), cells.end());
    std::unordered_map<GridCoord, i64, GridCoordHash> phi;
    std::deque<GridCoord> queue;
    phi[shape.anchor] = 0;
    queue.push_back(shape.anchor);
    while (!queue.empty()) {
        const GridCoord u = queue.front();
        queue.pop_front();
        const Color cu = label_at(root_frag, u);
        for (const GridCoord& d : kDirections) {
            const GridCoord v = u + d;
            if (!region.count(v) || phi.count(v)) continue;
            phi[v] = phi[u] + edge_potential(cu, label_at(root_frag, v));
            queue.push_back(v);
        }
    }
    return phi;
}

SlopeArtifact AdversaryDriver::slope_boost(int level, const Rat& m) {
    const i64 w = boost_width(level, P_.T);
    const i64 margin = static_cast<i64>(P_.T) + 1;
    const i64 ypad = w + level + P_.T + 3;
    const Box leaf{-margin, -ypad, w + margin, ypad};
    const SlopePiece piece = slope_build(level, m, leaf);
    poll_win("slope");

    const Parallelogram& sh = piece.shape;
    auto col_bottom = [&](i64 x) -> i64 {
        const Rat y = Rat(sh.anchor.y) + sh.m * Rat(x - sh.anchor.x) + sh.band_offset;
        return y.ceil();
    };

    // Exact-kappa pair extraction: prefer horizontally separated pairs with
    // the smallest span; encode the pair relative to the column bottoms so a
    // scripted run can name the canonical corners without observing labels.
    std::optional<std::array<GridCoord, 2>> cached;
    auto extract = [&]() -> std::array<GridCoord, 2> {
        if (cached) return *cached;
        const auto phi = region_phi(piece.root_frag, sh);
        const std::vector<GridCoord> cells = sh.cells();
        bool found = false;
        GridCoord bw, be;
        i64 best_span = std::numeric_limits<i64>::max();
        for (const GridCoord& a : cells) {
            for (const GridCoord& b : cells) {
                if (b.x < a.x || (b.x == a.x && !(a < b))) continue;
                if (std::llabs(phi.at(b) - phi.at(a)) !=
                    static_cast<i64>(level)) {
                    continue;
                }
                const i64 span = b.x - a.x;
                const i64 rank_span = span >= 1 ? span : std::numeric_limits<i64>::max() / 2;
                if (!found || rank_span < best_span ||
                    (rank_span == best_span &&
                     (a < bw || (a == bw && b < be)))) {
                    found = true;
                    best_span = rank_span;
                    bw = a;
                    be = b;
                }
            }
        }
        if (!found) throw std::logic_error("no exact-potential pair in the region");
        cached = {bw, be};
        return *cached;
    };

    const i64 hspan = sh.width + 1;
    const i64 vspan = sh.height() + 2;
    const i64 dxw = choices_.plan("pw_x", hspan, 0, [&] {
        return extract()[0].x - sh.anchor.x;
    });
    const i64 dyw = choices_.plan("pw_y", vspan, 0, [&] {
        const GridCoord p = extract()[0];
        return p.y - col_bottom(p.x);
    });
    const i64 dxe = choices_.plan("pe_x", hspan, sh.width, [&] {
        return extract()[1].x - sh.anchor.x;
    });
    const i64 dye = choices_.plan("pe_y", vspan, 0, [&] {
        const GridCoord p = extract()[1];
        return p.y - col_bottom(p.x);
    });

    SlopeArtifact art;
    art.root_frag = piece.root_frag;
    art.shape = sh;
    art.pair_west = {sh.anchor.x + dxw, col_bottom(sh.anchor.x + dxw) + dyw};
    art.pair_east = {sh.anchor.x + dxe, col_bottom(sh.anchor.x + dxe) + dye};

    // Witness path between the pair nodes, fully inside the region.
    const std::vector<GridCoord> cells = sh.cells();
    std::unordered_set<GridCoord, GridCoordHash> region(cells.begin(), cells.end());
    std::unordered_map<GridCoord, GridCoord, GridCoordHash> parent;
    std::deque<GridCoord> queue;
    parent[art.pair_west] = art.pair_west;
    queue.push_back(art.pair_west);
    while (!queue.empty() && !parent.count(art.pair_east)) {
        const GridCoord u = queue.front();
        queue.pop_front();
        for (const GridCoord& d : kDirections) {
            const GridCoord v = u + d;
            if (!region.count(v) || parent.count(v)) continue;
            parent[v] = u;
            queue.push_back(v);
        }
    }
    if (!parent.count(art.pair_east)) {
        throw std::logic_error("pair nodes are not connected inside the region");
    }
    std::vector<GridCoord> rev;
    for (GridCoord c = art.pair_east; !(c == art.pair_west); c = parent.at(c)) {
        rev.push_back(c);
    }
    rev.push_back(art.pair_west);
    art.path.assign(rev.rbegin(), rev.rend());

    if (choices_.adaptive()) {
        const auto phi = region_phi(piece.root_frag, sh);
        art.pair_potential = phi.at(art.pair_east) - phi.at(art.pair_west);
        if (std::llabs(art.pair_potential) != static_cast<i64>(level)) {
            throw std::logic_error("extracted pair potential mismatch");
        }
    }
    return art;
}

// -------------------------------------------------------------- strike

AdversaryDriver::StrikeOutcome AdversaryDriver::strike(int host_frag, const DiagonalWalk& walk,
                                                       const std::vector<i64>& profile,
                                                       const LPathArtifact& lp, int attempt,
                                                       std::vector<i64>* used_windows) {
    StrikeOutcome out;
    const i64 B = lp.row_len - 1;
    const int sgn = lp.col_dir == 0 ? 1 : -1;   // strike from the column's side
    const Rat mdiag{lp.v.y - lp.u.y, lp.v.x - lp.u.x};

    SlopeArtifact R = slope_boost(P_.kappa, mdiag);
    const i64 ell = R.pair_east.x - R.pair_west.x;
    const i64 oh_w = R.pair_west.x - R.shape.anchor.x;
    const i64 oh_e = (R.shape.anchor.x + R.shape.width) - R.pair_east.x;
    const i64 xmin = oh_w;
    const i64 xmax = B - 1 - ell - oh_e;
    if (ell < 1 || xmax < xmin) return out;   // no aligned window fits

    const i64 wbound = xmax - xmin + 1;
    const i64 wx = xmin + choices_.guess("win", wbound, [&]() -> i64 {
        if (attempt == 0 && xmin == 0 && (used_windows == nullptr || used_windows->empty())) {
            return diag_window_index(profile, ell, xmax, true);
        }
        i64 bx = -1;
        i64 bmag = std::numeric_limits<i64>::max();
        for (i64 x = xmin; x <= xmax; ++x) {
            if (used_windows != nullptr &&
                std::find(used_windows->begin(), used_windows->end(), x) !=
                    used_windows->end()) {
                continue;
            }
            const i64 mag = std::llabs(profile[static_cast<std::size_t>(x + ell)] -
                                       profile[static_cast<std::size_t>(x)]);
            if (mag < bmag) {
                bmag = mag;
                bx = x;
            }
        }
        return (bx < 0 ? xmin : bx) - xmin;
    });
    if (used_windows) used_windows->push_back(wx);

    // Drop the region toward the diagonal: tightest column ends exactly one
    // separation gap away from the nearest revealed host cell, where
    // "nearest" pads neighboring columns by their horizontal distance.
    const i64 sx = wx - R.pair_west.x;
    std::unordered_map<i64, i64> host_extreme;
    for (const GridCoord& c : host_cells_) {
        auto it = host_extreme.find(c.x);
        if (it == host_extreme.end()) {
            host_extreme[c.x] = c.y;
        } else {
            it->second = sgn > 0 ? std::max(it->second, c.y) : std::min(it->second, c.y);
        }
    }
    std::unordered_map<i64, std::pair<i64, i64>> rcol;   // region column -> y range
    for (const GridCoord& c : R.shape.cells()) {
        auto it = rcol.find(c.x);
        if (it == rcol.end()) {
            rcol[c.x] = {c.y, c.y};
        } else {
            it->second.first = std::min(it->second.first, c.y);
            it->second.second = std::max(it->second.second, c.y);
        }
    }
    bool any = false;
    i64 sy = 0;
    for (const auto& [cx0, range] : rcol) {
        const i64 cx = cx0 + sx;
        bool col_any = false;
        i64 padded = 0;
        for (i64 h = cx - gap0_ + 1; h <= cx + gap0_ - 1; ++h) {
            auto it = host_extreme.find(h);
            if (it == host_extreme.end()) continue;
            const i64 v = it->second - sgn * std::llabs(h - cx);
            if (!col_any || (sgn > 0 ? v > padded : v < padded)) {
                padded = v;
                col_any = true;
            }
        }
        if (!col_any) continue;
        const i64 need = sgn > 0 ? padded + gap0_ - range.first
                                 : padded - gap0_ - range.second;
        if (!any || (sgn > 0 ? need > sy : need < sy)) {
            sy = need;
            any = true;
        }
    }
    if (!any) sy = sgn * (gap0_ + 1);   // detached host: place at a plain gap

    state_.commit(host_frag, R.root_frag, {sx, sy});
    const GridCoord shift{sx, sy};
    for (const GridCoord& c : R.shape.cells()) host_cells_.push_back(c + shift);

    // Closed walk: window stretch of the diagonal, rung up to the east pair
    // node, witness path back to the west pair node, rung down.
    const GridCoord u1 = walk.nodes.at(walk.column_index.at(static_cast<std::size_t>(wx)));
    const GridCoord v1 =
        walk.nodes.at(walk.column_index.at(static_cast<std::size_t>(wx + ell)));
    const GridCoord pwh = R.pair_west + shift;
    const GridCoord peh = R.pair_east + shift;

    std::vector<GridCoord> cyc;
    for (std::size_t k = walk.column_index.at(static_cast<std::size_t>(wx));
         k <= walk.column_index.at(static_cast<std::size_t>(wx + ell)); ++k) {
        cyc.push_back(walk.nodes[k]);
    }
    for (i64 y = v1.y + sgn; sgn > 0 ? y <= peh.y : y >= peh.y; y += sgn) {
        const GridCoord c{v1.x, y};
        host_reveal(host_frag, c);
        cyc.push_back(c);
    }
    for (auto it = R.path.rbegin() + 1; it != R.path.rend(); ++it) {
        cyc.push_back(*it + shift);
    }
    for (i64 y = pwh.y - sgn; sgn > 0 ? y > u1.y : y < u1.y; y -= sgn) {
        const GridCoord c{u1.x, y};
        host_reveal(host_frag, c);
        cyc.push_back(c);
    }
    for (std::size_t k = 0; k < cyc.size(); ++k) {
        const GridCoord& a = cyc[k];
        const GridCoord& b = cyc[(k + 1) % cyc.size()];
        if (!adjacent(a, b)) {
            throw std::logic_error("strike walk is not grid-adjacent at step " +
                                   std::to_string(k));
        }
    }

    poll_win("strike");
    out.struck = true;
    out.walk.reserve(cyc.size());
    out.colors.reserve(cyc.size());
    for (const GridCoord& c : cyc) {
        out.walk.push_back(state_.node_ref(host_frag, c));
        out.colors.push_back(label_at(host_frag, c));
    }
    out.p = check_closed_walk(out.colors).potential;
    return out;
}

Certificate AdversaryDriver::run_deterministic(int host_frag) {
    try {
        const LPathArtifact lp = build_lpath(host_frag);
        const DiagonalWalk walk = reveal_diagonal(host_frag, lp);
        std::vector<Color> walk_colors;
        walk_colors.reserve(walk.nodes.size());
        for (const GridCoord& g : walk.nodes) walk_colors.push_back(label_at(host_frag, g));
        const std::vector<i64> profile =
            potential_profile(walk_colors, walk.column_index).f;

        std::vector<i64> used;
        StrikeOutcome last;
        for (int attempt = 0;; ++attempt) {
            const i64 need =
                (boost_width(P_.kappa, P_.T) + 2 * P_.T + 2) *
                (static_cast<i64>(P_.kappa) + 2 * P_.T + 6);
            if (state_.budget_left() < need) break;
            StrikeOutcome so = strike(host_frag, walk, profile, lp, attempt, &used);
            if (so.struck) last = std::move(so);
            const i64 more = choices_.react("more", [&]() -> i64 {
                if (!state_.improper_edges().empty()) return 0;
                if (last.struck && last.p != 0) return 0;
                if (!last.struck) return 0;
                return attempt + 1 < 8 ? 1 : 0;
            });
            if (more == 0) break;
        }

        if (!state_.improper_edges().empty()) return state_.make_improper_certificate();
        if (last.struck && last.p != 0) {
            Certificate c;
            c.kind = Certificate::Kind::PotentialViolation;
            c.walk = last.walk;
            c.walk_colors = last.colors;
            c.p_value = last.p;
            c.nodes_spent = state_.spent();
            return c;
        }
        return state_.make_survived_certificate();
    } catch (const MatchDecided& d) {
        return d.cert;
    }
}

}  // namespace gridlocal
