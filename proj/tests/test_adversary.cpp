#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "gridlocal/adversary.hpp"
#include "gridlocal/algorithms.hpp"
#include "gridlocal/strategies.hpp"
#include "test_support.hpp"

using namespace gridlocal;
using testsupport::steady_drift;

namespace {

AdversaryParams bench(int kappa = 3, i64 L1 = 64) {
    AdversaryParams p;
    p.T = 1;
    p.kappa = kappa;
    p.L0 = 64;
    p.L1 = L1;
    p.n_budget = 200000;
    return p;
}

}  // namespace

TEST_CASE("parameter report for the reference configuration") {
    const ParamReport r = validate_params(AdversaryParams{});
    CHECK(r.accepted);
    CHECK_FALSE(r.guaranteed);
    CHECK(r.regime() == "empirical");
    CHECK(r.mvt_ok == false);  // the desk window is too wide for the mean-value scan
    CHECK(r.feasible);
    CHECK(r.margin == doctest::Approx(-32.0 / 3));
    CHECK(r.margin_connector == doctest::Approx(-8.0));
    CHECK(r.width == 252);
    CHECK_FALSE(r.checks.empty());
    const auto j = r.to_json();
    CHECK(j.at("regime") == "empirical");
    CHECK(j.at("accepted") == true);
}

TEST_CASE("parameter report flips to guaranteed only at infeasible scale") {
    AdversaryParams p;
    p.kappa = 17;
    const ParamReport r = validate_params(p);
    CHECK(r.accepted);
    CHECK(r.guaranteed);
    CHECK(r.regime() == "guaranteed");
    CHECK(r.margin == doctest::Approx(1.0 / 3));
    CHECK_FALSE(r.feasible);  // the doubled construction no longer fits the budget
}

TEST_CASE("degenerate parameters are rejected") {
    AdversaryParams p;
    p.kappa = 0;
    const ParamReport r = validate_params(p);
    CHECK_FALSE(r.accepted);
    CHECK(r.regime() == "rejected");
}

TEST_CASE("line length bounds and the deepest level fitting a cap") {
    CHECK(AdversaryDriver::line_length_bound(0, 1) == 1);
    CHECK(AdversaryDriver::line_length_bound(1, 1) == 6);
    CHECK(AdversaryDriver::line_length_bound(2, 1) == 16);
    CHECK(AdversaryDriver::line_length_bound(3, 1) == 36);
    CHECK(AdversaryDriver::line_length_bound(4, 1) == 76);
    for (int t = 1; t <= 3; ++t)
        for (int k = 0; k < 6; ++k)
            CHECK(AdversaryDriver::line_length_bound(k + 1, t) ==
                  2 * AdversaryDriver::line_length_bound(k, t) + 2 * t + 2);
    CHECK(AdversaryDriver::max_line_level(64, 1) == 3);
    CHECK(AdversaryDriver::max_line_level(36, 1) == 3);
    CHECK(AdversaryDriver::max_line_level(35, 1) == 2);
    CHECK(AdversaryDriver::max_line_level(1, 1) == 0);
}

TEST_CASE("scripted decisions never consult the board") {
    ScriptedChoices s(5);
    bool touched = false;
    const auto thunk = [&touched]() -> i64 {
        touched = true;
        return 99;
    };
    for (int i = 0; i < 20; ++i) {
        const i64 g = s.guess("g", 7, thunk);
        CHECK(g >= 0);
        CHECK(g < 7);
    }
    CHECK(s.plan("p", 10, 4, thunk) == 4);
    CHECK(s.react("r", thunk) == 0);
    bool stopped = false;
    for (i64 i = 1; i <= 12; ++i) {
        const bool now = s.stop_poll("sp", i, 12, thunk);
        if (stopped) CHECK(now);  // once asked to stop, stays stopped
        stopped = stopped || now;
    }
    CHECK(stopped);  // the pre-drawn stop index lies within the bound
    CHECK_FALSE(touched);
    CHECK_THROWS_AS(s.guess("empty", 0, thunk), std::logic_error);
}

TEST_CASE("identical scripts replay identically") {
    auto trace = [](std::uint64_t seed) {
        ScriptedChoices s(seed);
        std::vector<i64> out;
        const auto zero = []() -> i64 { return 0; };
        for (int i = 0; i < 10; ++i) out.push_back(s.guess("a", 100, zero));
        for (i64 i = 1; i <= 6; ++i) out.push_back(s.stop_poll("b", i, 6, zero) ? 1 : 0);
        for (int i = 0; i < 5; ++i) out.push_back(s.guess("c", 3, zero));
        return out;
    };
    CHECK(trace(5) == trace(5));
    CHECK(trace(5) != trace(6));
}

TEST_CASE("adaptive decisions evaluate the board and are replayable") {
    AdaptiveChoices a;
    int calls = 0;
    const auto counting = [&calls]() -> i64 { return ++calls; };
    CHECK(a.guess("g", 10, counting) == 1);
    CHECK(a.plan("p", 10, 7, counting) == 2);  // canonical is ignored
    CHECK(a.react("r", counting) == 3);
    CHECK(a.stop_poll("s", 1, 4, []() -> i64 { return 0; }) == false);
    CHECK(a.stop_poll("s", 2, 4, []() -> i64 { return 1; }) == true);
    CHECK_THROWS_AS(a.guess("g", 3, counting), std::logic_error);  // 4 out of range

    ReplayChoices rep(a.log());
    const auto boom = []() -> i64 { return 77; };
    CHECK(rep.guess("g", 10, boom) == 1);
    CHECK(rep.plan("p", 10, 7, boom) == 2);
    CHECK(rep.react("r", boom) == 3);
    CHECK(rep.stop_poll("s", 1, 4, boom) == false);
    CHECK(rep.stop_poll("s", 2, 4, boom) == true);
    // the failed range check was not recorded; the log is exhausted now
    CHECK_THROWS_AS(rep.react("r", boom), std::logic_error);
}

TEST_CASE("window start selection matches an exhaustive scan") {
    DecisionStream rng(77, 0);
    for (int iter = 0; iter < 300; ++iter) {
        const i64 n = 10 + static_cast<i64>(rng.below(60));
        std::vector<i64> f(static_cast<std::size_t>(n));
        for (auto& v : f) v = static_cast<i64>(rng.below(21)) - 10;
        const i64 ell = 1 + static_cast<i64>(rng.below(5));
        if (ell >= n) continue;
        const i64 x_max = n - 1 - ell;
        const i64 got = diag_window_index(f, ell, x_max, false);
        i64 best_x = 0, best = std::llabs(f[static_cast<std::size_t>(ell)] - f[0]);
        for (i64 x = 1; x <= x_max; ++x) {
            const i64 d = std::llabs(f[static_cast<std::size_t>(x + ell)] -
                                     f[static_cast<std::size_t>(x)]);
            if (d < best) {
                best = d;
                best_x = x;
            }
        }
        CHECK(got == best_x);
    }
}

TEST_CASE("window start uses the mean-value scan when its preconditions hold") {
    // a legal bridge profile: steps of at most 2, endpoints at zero
    std::vector<i64> f{0, 2, 4, 4, 2, 0, -2, -2, 0, 2, 2, 0, 0, 0, 0, 0, 0};
    const i64 b = static_cast<i64>(f.size()) - 1;
    const i64 ell = 3;
    REQUIRE(ell * ell < b);
    const i64 via_scan = diag_window_index(f, ell, b - ell, true);
    CHECK(via_scan == static_cast<i64>(mvt_witness(f, 2, ell)));
    // with the scan disallowed, the argmin fallback may pick another x but
    // never a worse window
    const i64 via_argmin = diag_window_index(f, ell, b - ell, false);
    const auto width = [&](i64 x) {
        return std::llabs(f[static_cast<std::size_t>(x + ell)] - f[static_cast<std::size_t>(x)]);
    };
    CHECK(width(via_argmin) <= width(via_scan));
}

namespace {

struct AttackBoard {
    GameState state;
    int a, b;
    LabeledWalk target, threat;

    AttackBoard(const std::vector<Color>& ct, const std::vector<Color>& ch,
                AlgorithmHandle algo)
        : state(bench(), std::move(algo), 3, nullptr) {
        const i64 n = static_cast<i64>(ct.size());
        a = state.make_fragment(Box{-1, -3, n, 1});
        b = state.make_fragment(Box{-1, -1, n, 1});
        target.frag = a;
        threat.frag = b;
        for (i64 t = 0; t < n; ++t) {
            state.reveal(a, {t, 0});
            state.submit_label({t, 0}, ct[static_cast<std::size_t>(t)]);
            target.nodes.push_back({t, 0});
        }
        for (i64 t = 0; t < static_cast<i64>(ch.size()); ++t) {
            state.reveal(b, {t, 0});
            state.submit_label({t, 0}, ch[static_cast<std::size_t>(t)]);
            threat.nodes.push_back({t, 0});
        }
    }
};

std::vector<Color> repeat3(Color c0, Color c1, Color c2, i64 nodes) {
    const Color p[3] = {c0, c1, c2};
    std::vector<Color> out;
    for (i64 i = 0; i < nodes; ++i) out.push_back(p[i % 3]);
    return out;
}

}  // namespace

TEST_CASE("the alignment attack turns a wide potential gap into a loss") {
    const auto up = repeat3(2, 1, 3, 28);    // +1 per three edges: p = +9
    const auto down = repeat3(1, 2, 3, 28);  // -1 per three edges: p = -9
    REQUIRE(walk_potential(up) == 9);
    REQUIRE(walk_potential(down) == -9);
    AttackBoard board(up, down, steady_drift(true));
    const Certificate cert = alignment_attack(board.state, board.target, board.threat);
    CHECK(cert.kind == Certificate::Kind::ImproperEdge);
    CHECK(cert.is_win());
    CHECK(cert.cu == cert.cv);
    CHECK(board.state.same_group(board.a, board.b));
    // the two endpoints really are adjacent equal-colored revealed cells
    const auto improper = board.state.scan_improper();
    REQUIRE_FALSE(improper.empty());
    CHECK(improper.front().cu == improper.front().cv);
}

TEST_CASE("the attack also works along vertical runs") {
    const auto up = repeat3(2, 1, 3, 28);
    const auto down = repeat3(1, 2, 3, 28);
    AdversaryParams p = bench();
    GameState st(p, steady_drift(false), 3, nullptr);
    const int a = st.make_fragment(Box{-1, -1, 3, 28});
    const int b = st.make_fragment(Box{-1, -1, 1, 28});
    LabeledWalk target{a, {}}, threat{b, {}};
    for (i64 t = 0; t < 28; ++t) {
        st.reveal(a, {0, t});
        st.submit_label({0, t}, up[static_cast<std::size_t>(t)]);
        target.nodes.push_back({0, t});
        st.reveal(b, {0, t});
        st.submit_label({0, t}, down[static_cast<std::size_t>(t)]);
        threat.nodes.push_back({0, t});
    }
    const Certificate cert = alignment_attack(st, target, threat);
    CHECK(cert.kind == Certificate::Kind::ImproperEdge);
}

TEST_CASE("the attack refuses structurally unusable inputs") {
    const auto up = repeat3(2, 1, 3, 28);
    const auto down = repeat3(1, 2, 3, 28);
    SUBCASE("gap below the threshold") {
        // an alternating run drifts +1 over 27 edges: gap 8 < 9
        std::vector<Color> alt;
        for (i64 i = 0; i < 28; ++i) alt.push_back(i % 2 == 0 ? 2 : 1);
        REQUIRE(walk_potential(alt) == 1);
        AttackBoard board(up, alt, steady_drift(true));
        CHECK_THROWS_AS(alignment_attack(board.state, board.target, board.threat),
                        std::domain_error);
        CHECK_FALSE(board.state.same_group(board.a, board.b));  // nothing committed
    }
    SUBCASE("unequal lengths") {
        AttackBoard board(up, down, steady_drift(true));
        LabeledWalk shorter = board.threat;
        shorter.nodes.pop_back();
        CHECK_THROWS_AS(alignment_attack(board.state, board.target, shorter),
                        std::domain_error);
    }
    SUBCASE("runs already placed together") {
        AttackBoard board(up, down, steady_drift(true));
        LabeledWalk self = board.target;
        CHECK_THROWS_AS(alignment_attack(board.state, board.target, self),
                        std::domain_error);
    }
    SUBCASE("bent run") {
        AttackBoard board(up, down, steady_drift(true));
        LabeledWalk bent = board.target;
        bent.nodes.back() = bent.nodes[bent.nodes.size() - 2] + GridCoord{0, 1};
        CHECK_THROWS_AS(alignment_attack(board.state, bent, board.threat),
                        std::domain_error);
    }
}

TEST_CASE("doubled straight runs certify a growing potential pair") {
    for (int level : {1, 2, 3}) {
        GameState st(bench(), steady_drift(true), 3, nullptr);
        AdaptiveChoices ch;
        AdversaryDriver drv(st, ch);
        const RowArtifact art = drv.boost_line(level, {1, 0});
        CHECK(art.length() <= AdversaryDriver::line_length_bound(level, 1));
        CHECK(art.lo <= art.pa);
        CHECK(art.pa <= art.pb);
        CHECK(art.pb <= art.hi);
        // recompute the certified pair from the labels on the board
        std::vector<Color> cs;
        for (i64 t = art.pa; t <= art.pb; ++t) {
            const Color c = st.label_in_group(art.root_frag, art.at(t));
            REQUIRE(c != kNoColor);
            cs.push_back(c);
        }
        CHECK(walk_potential(cs) == art.pair_potential);
        CHECK(std::llabs(art.pair_potential) >= level);
        // every cell of the run is labeled
        for (i64 t = art.lo; t <= art.hi; ++t)
            CHECK(st.label_in_group(art.root_frag, art.at(t)) != kNoColor);
        CHECK(st.improper_edges().empty());
    }
}

TEST_CASE("the comparison run extraction pins the pair exactly") {
    for (const bool rising : {true, false}) {
        GameState st(bench(), steady_drift(rising), 3, nullptr);
        AdaptiveChoices ch;
        AdversaryDriver drv(st, ch);
        const RowArtifact art = drv.base_line(2, {1, 0}, "t");
        std::vector<Color> cs;
        for (i64 t = art.pa; t <= art.pb; ++t)
            cs.push_back(st.label_in_group(art.root_frag, art.at(t)));
        CHECK(std::llabs(walk_potential(cs)) == 2);
        CHECK(walk_potential(cs) == art.pair_potential);
    }
}

TEST_CASE("an opponent that instantly repeats colors loses during the build") {
    AlgorithmHandle always1;
    always1.name = "const";
    always1.fn = [](const LabelRequest&) -> Color { return 1; };
    GameState st(bench(), always1, 3, nullptr);
    AdaptiveChoices ch;
    AdversaryDriver drv(st, ch);
    try {
        (void)drv.boost_line(1, {1, 0});
        FAIL("the build should have ended with a win");
    } catch (const MatchDecided& d) {
        CHECK(d.cert.kind == Certificate::Kind::ImproperEdge);
        CHECK(d.cert.is_win());
    }
}

TEST_CASE("sloped doubling certifies a pair with an internal witness path") {
    GameState st(bench(4), steady_drift(true), 3, nullptr);
    AdaptiveChoices ch;
    AdversaryDriver drv(st, ch);
    const SlopeArtifact art = drv.slope_boost(3, Rat(1, 2));
    CHECK(art.shape.level == 3);
    CHECK(art.shape.width == boost_width(3, 1));
    CHECK(art.shape.height() == 4);
    CHECK(art.shape.contains(art.pair_west));
    CHECK(art.shape.contains(art.pair_east));
    REQUIRE_FALSE(art.path.empty());
    CHECK(art.path.front() == art.pair_west);
    CHECK(art.path.back() == art.pair_east);
    std::vector<Color> cs;
    for (std::size_t i = 0; i < art.path.size(); ++i) {
        if (i > 0) CHECK(adjacent(art.path[i - 1], art.path[i]));
        CHECK(art.shape.contains(art.path[i]));
        const Color c = st.label_in_group(art.root_frag, art.path[i]);
        REQUIRE(c != kNoColor);
        cs.push_back(c);
    }
    CHECK(walk_potential(cs) == art.pair_potential);
    CHECK(std::llabs(art.pair_potential) >= 3);
}

TEST_CASE("the guarded arm completes at full length against a quiet opponent") {
    AdversaryParams p = bench(3, 60);
    GameState st(p, greedy_first_fit(), 3, nullptr);
    AdaptiveChoices ch;
    AdversaryDriver drv(st, ch);
    const int host = drv.make_host();
    const RowArtifact arm = drv.quasilinear_row(host);
    CHECK(arm.dir == GridCoord{1, 0});
    CHECK(arm.length() == 60);
    for (i64 t = arm.lo; t <= arm.hi; ++t)
        CHECK(st.label_in_group(arm.root_frag, arm.at(t)) != kNoColor);
    CHECK(st.improper_edges().empty());
}

TEST_CASE("the L build balances its two arms") {
    AdversaryParams p = bench(3, 48);
    GameState st(p, greedy_first_fit(), 3, nullptr);
    AdaptiveChoices ch;
    AdversaryDriver drv(st, ch);
    const int host = drv.make_host();
    const LPathArtifact lp = drv.build_lpath(host);
    // the row arm holds a whole number of comparison segments, so it may
    // stop short of the configured length by less than one segment
    CHECK(lp.row_len <= 48);
    CHECK(lp.row_len > 48 - AdversaryDriver::line_length_bound(3, 1));
    CHECK(lp.col_len <= lp.row_len);
    CHECK(lp.col_len >= 1);
    CHECK(lp.u == GridCoord{0, 0});
    CHECK(lp.v.x == lp.row_len - 1);
    CHECK(std::llabs(lp.v.y) == lp.col_len);
    CHECK(lp.p_total == 0);

    const DiagonalWalk dw = drv.reveal_diagonal(host, lp);
    CHECK(dw.nodes.front() == lp.u);
    CHECK(dw.nodes.back() == lp.v);
    for (const GridCoord& n : dw.nodes)
        CHECK(st.label_in_group(host, n) != kNoColor);
}

TEST_CASE("the host reservation covers the long arm") {
    const AdversaryParams p = bench(3, 64);
    const Box b = host_reservation(p);
    CHECK(b.valid());
    CHECK(b.contains({0, 0}));
    CHECK(b.contains({p.L1 - 1, 0}));
    CHECK(b.width() >= p.L1);
    CHECK(b.height() > 1);
}

TEST_CASE("placement discovery is deterministic and covers every fragment") {
    const AdversaryParams p = bench(3, 48);
    const auto w1 = discover_worlds(p, "full-oblivious", 11);
    const auto w2 = discover_worlds(p, "full-oblivious", 11);
    CHECK(w1 == w2);
    CHECK_FALSE(w1.empty());
    const auto w3 = discover_worlds(p, "full-oblivious", 12);
    CHECK_FALSE(w3.empty());
}

TEST_CASE("strategy registry") {
    const auto& names = strategy_names();
    CHECK(names.size() == 6);
    for (const auto& n : names) CHECK(strategy_by_name(n, 1) != nullptr);
    CHECK_THROWS_AS(strategy_by_name("nope", 1), std::invalid_argument);
}

TEST_CASE("an adaptive run can be retraced decision for decision") {
    const AdversaryParams p = bench(3, 40);
    auto play = [&](ChoiceProvider& ch) {
        Transcript tr;
        GameState st(p, steady_drift(true), 9, &tr);
        AdversaryDriver drv(st, ch);
        const int host = drv.make_host();
        (void)drv.quasilinear_row(host);
        return tr.text();
    };
    AdaptiveChoices live;
    const std::string first = play(live);
    ReplayChoices replay(live.log());
    const std::string second = play(replay);
    CHECK(first == second);
}
