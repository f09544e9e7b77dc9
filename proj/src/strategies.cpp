#include "gridlocal/strategies.hpp"

#include <stdexcept>

namespace gridlocal {

using nlohmann::ordered_json;

const std::vector<std::string>& strategy_names() {
    static const std::vector<std::string> k = {"log-boost",  "quasilinear",
                                               "slope-boost", "lpath",
                                               "full-det",    "full-oblivious"};
    return k;
}

namespace {

const std::string& pipeline_body(const std::string& name) {
    static const std::string full = "full-det";
    return name == "full-oblivious" ? full : name;
}

Certificate end_claim(GameState& state) {
    return state.improper_edges().empty() ? state.make_survived_certificate()
                                          : state.make_improper_certificate();
}

ordered_json row_json(const RowArtifact& a) {
    return ordered_json{{"dir", {a.dir.x, a.dir.y}},
                        {"origin", {a.origin.x, a.origin.y}},
                        {"lo", a.lo},
                        {"hi", a.hi},
                        {"pa", a.pa},
                        {"pb", a.pb},
                        {"pair_potential", a.pair_potential},
                        {"end_potential", a.end_potential}};
}

}  // namespace

Certificate run_with_provider(GameState& state, const std::string& name,
                              ChoiceProvider& choices,
                              const std::vector<GridCoord>* worlds) {
    const std::string& body = pipeline_body(name);
    Transcript* tr = state.transcript();
    if (tr) tr->note("params", validate_params(state.params()).to_json());
    AdversaryDriver drv(state, choices, worlds);
    const AdversaryParams& P = state.params();

    try {
        if (body == "log-boost") {
            const RowArtifact a = drv.boost_line(P.kappa, {1, 0});
            if (tr) {
                tr->note("line", row_json(a));
            }
            return end_claim(state);
        }
        if (body == "quasilinear") {
            const int host = drv.make_host();
            const RowArtifact arm = drv.quasilinear_row(host);
            if (tr) tr->note("arm", row_json(arm));
            return end_claim(state);
        }
        if (body == "slope-boost") {
            const SlopeArtifact s = drv.slope_boost(P.kappa, P.theta);
            if (tr) {
                tr->note("region",
                         ordered_json{{"anchor", {s.shape.anchor.x, s.shape.anchor.y}},
                                      {"width", s.shape.width},
                                      {"height", s.shape.height()},
                                      {"slope", to_string(s.shape.m)},
                                      {"pair_west", {s.pair_west.x, s.pair_west.y}},
                                      {"pair_east", {s.pair_east.x, s.pair_east.y}},
                                      {"pair_potential", s.pair_potential}});
            }
            return end_claim(state);
        }
        if (body == "lpath") {
            const int host = drv.make_host();
            const LPathArtifact lp = drv.build_lpath(host);
            drv.reveal_diagonal(host, lp);
            if (tr) {
                tr->note("lpath", ordered_json{{"row_len", lp.row_len},
                                               {"col_dir", lp.col_dir},
                                               {"col_len", lp.col_len},
                                               {"p_total", lp.p_total}});
            }
            return end_claim(state);
        }
        if (body == "full-det") {
            const int host = drv.make_host();
            return drv.run_deterministic(host);
        }
    } catch (const MatchDecided& d) {
        return d.cert;
    }
    throw std::invalid_argument("unknown strategy: " + name);
}

namespace {

class NamedStrategy final : public AdversaryStrategyBase {
  public:
    NamedStrategy(std::string name, std::uint64_t script_seed)
        : name_(std::move(name)), script_seed_(script_seed) {}

    std::string name() const override { return name_; }

    Certificate run(GameState& state) override {
        const bool scripted = name_ == "full-oblivious" || state.backdoor();
        if (!scripted) {
            AdaptiveChoices choices;
            return run_with_provider(state, name_, choices);
        }
        std::vector<GridCoord> worlds;
        const std::vector<GridCoord>* wp = nullptr;
        if (state.backdoor()) {
            worlds = discover_worlds(state.params(), name_, script_seed_);
            wp = &worlds;
        }
        ScriptedChoices choices(script_seed_);
        return run_with_provider(state, name_, choices, wp);
    }

  private:
    std::string name_;
    std::uint64_t script_seed_;
};

}  // namespace

std::unique_ptr<AdversaryStrategyBase> strategy_by_name(const std::string& name,
                                                        std::uint64_t script_seed) {
    for (const std::string& s : strategy_names()) {
        if (s == name) return std::make_unique<NamedStrategy>(name, script_seed);
    }
    throw std::invalid_argument("unknown strategy: " + name);
}

std::vector<GridCoord> discover_worlds(const AdversaryParams& params,
                                       const std::string& name,
                                       std::uint64_t script_seed) {
    AlgorithmHandle stub{"stand-in", false, [](const LabelRequest&) { return Color{1}; }};
    GameState probe(params, std::move(stub), 0, nullptr, false);
    ScriptedChoices choices(script_seed);
    try {
        run_with_provider(probe, name, choices);
    } catch (const BudgetExhaustedError&) {
        // The real run will stop at the same point; placements up to here
        // are still complete for every fragment that exists.
    }

    // Spread unconnected groups along the x axis so distinct groups can
    // never collide in absolute coordinates.
    constexpr i64 kPitch = 100'000'000;
    const int n = probe.fragment_count();
    std::vector<int> cluster(static_cast<std::size_t>(n), -1);
    int next_cluster = 0;
    for (int f = 0; f < n; ++f) {
        for (int g = 0; g < f; ++g) {
            if (probe.same_group(f, g)) {
                cluster[static_cast<std::size_t>(f)] = cluster[static_cast<std::size_t>(g)];
                break;
            }
        }
        if (cluster[static_cast<std::size_t>(f)] < 0) {
            cluster[static_cast<std::size_t>(f)] = next_cluster++;
        }
    }
    std::vector<GridCoord> worlds(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) {
        const GridCoord origin = probe.to_group_frame(f, {0, 0});
        worlds[static_cast<std::size_t>(f)] =
            GridCoord{cluster[static_cast<std::size_t>(f)] * kPitch, 0} + origin;
    }
    return worlds;
}

MatchResult run_configured(const MatchConfig& cfg, Transcript& transcript) {
    const ParamReport report = validate_params(cfg.params);
    if (!report.accepted) {
        std::string why = "parameters rejected:";
        for (const ParamCheck& c : report.checks) {
            if (!c.ok) why += " [" + c.name + ": " + c.detail + "]";
        }
        throw std::invalid_argument(why);
    }
    auto strat = strategy_by_name(cfg.strategy, cfg.script_seed);
    AlgorithmHandle algo = algorithm_by_name(cfg.algo, cfg.backdoor);

    const AdversaryParams& p = cfg.params;
    transcript.header(ordered_json{{"strategy", cfg.strategy},
                                   {"algo", cfg.algo},
                                   {"algo_seed", cfg.algo_seed},
                                   {"script_seed", cfg.script_seed},
                                   {"backdoor", cfg.backdoor},
                                   {"T", p.T},
                                   {"n_budget", p.n_budget},
                                   {"kappa", p.kappa},
                                   {"L0", p.L0},
                                   {"L1", p.L1},
                                   {"c_ledger", p.c_ledger},
                                   {"trials", p.trials},
                                   {"theta_num", p.theta.num},
                                   {"theta_den", p.theta.den}});
    GameState state(p, std::move(algo), cfg.algo_seed, &transcript, cfg.backdoor);
    MatchResult out;
    out.report = report;
    out.cert = run_match(state, *strat);
    out.grid_side = state.required_grid_side();
    return out;
}

MatchConfig config_from_header(const nlohmann::json& h) {
    MatchConfig cfg;
    cfg.strategy = h.at("strategy").get<std::string>();
    cfg.algo = h.at("algo").get<std::string>();
    cfg.algo_seed = h.at("algo_seed").get<std::uint64_t>();
    cfg.script_seed = h.at("script_seed").get<std::uint64_t>();
    cfg.backdoor = h.at("backdoor").get<bool>();
    cfg.params.T = h.at("T").get<int>();
    cfg.params.n_budget = h.at("n_budget").get<i64>();
    cfg.params.kappa = h.at("kappa").get<int>();
    cfg.params.L0 = h.at("L0").get<i64>();
    cfg.params.L1 = h.at("L1").get<i64>();
    cfg.params.c_ledger = h.at("c_ledger").get<i64>();
    cfg.params.trials = h.at("trials").get<int>();
    cfg.params.theta = Rat(h.at("theta_num").get<i64>(), h.at("theta_den").get<i64>());
    return cfg;
}

}  // namespace gridlocal
