#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridlocal/oblivious.hpp"
#include "gridlocal/strategies.hpp"
#include "gridlocal/verify.hpp"

namespace gl = gridlocal;

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitVerifyFailed = 4;

gl::Rat parse_theta(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return gl::Rat(std::stoll(s));
    return gl::Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

bool backdoor_enabled() {
    const char* v = std::getenv("GRIDLOCAL_BACKDOOR");
    return v != nullptr && std::string(v) == "1";
}

// Largest certified |p| visible in the match: the certificate's walk
// potential, or the pair potential a partial build recorded in its notes.
gl::i64 peak_potential(const std::string& transcript_text, const gl::Certificate& cert) {
    gl::i64 peak = std::llabs(static_cast<gl::i64>(cert.p_value));
    try {
        for (const auto& ev : gl::Transcript::parse(transcript_text)) {
            if (ev.value("ev", "") != "note") continue;
            const std::string key = ev.value("key", "");
            if (key == "line" || key == "arm" || key == "region") {
                peak = std::max<gl::i64>(
                    peak, std::llabs(ev.at("val").value("pair_potential", gl::i64{0})));
                peak = std::max<gl::i64>(
                    peak, std::llabs(ev.at("val").value("end_potential", gl::i64{0})));
            } else if (key == "lpath") {
                peak = std::max<gl::i64>(
                    peak, std::llabs(ev.at("val").value("p_total", gl::i64{0})));
            }
        }
    } catch (const std::exception&) {
        // a partial or foreign transcript still yields the certificate value
    }
    return peak;
}

struct RunFlags {
    gl::MatchConfig cfg;
    std::string theta = "1/2";
    int trials = 1;
    std::string out;
    bool verify_after = false;
};

void add_param_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--strategy", f.cfg.strategy, "adversary pipeline")->capture_default_str();
    cmd->add_option("--algo", f.cfg.algo, "labeling algorithm")->capture_default_str();
    cmd->add_option("--T", f.cfg.params.T, "view radius")->capture_default_str();
    cmd->add_option("--kappa", f.cfg.params.kappa, "target potential level")
        ->capture_default_str();
    cmd->add_option("--L0", f.cfg.params.L0, "base-run length cap")->capture_default_str();
    cmd->add_option("--L1", f.cfg.params.L1, "long-arm length")->capture_default_str();
    cmd->add_option("--budget", f.cfg.params.n_budget, "cell budget")->capture_default_str();
    cmd->add_option("--theta", f.theta, "slope dy/dx of the boosted build")
        ->capture_default_str();
    cmd->add_option("--trials", f.trials, "randomized-mode repetitions")
        ->capture_default_str();
    cmd->add_option("--seed", f.cfg.algo_seed, "algorithm seed")->capture_default_str();
    cmd->add_option("--script-seed", f.cfg.script_seed, "adversary script seed")
        ->capture_default_str();
    cmd->add_option("--out", f.out, "write the transcript (JSONL) here");
}

int finish_config(RunFlags& f) {
    f.cfg.params.theta = parse_theta(f.theta);
    f.cfg.params.trials = f.trials;
    if (f.cfg.algo == "cheater") {
        if (!backdoor_enabled()) {
            std::cerr << "the cheater algorithm needs GRIDLOCAL_BACKDOOR=1\n";
            return kExitInvalidConfig;
        }
        f.cfg.backdoor = true;
    }
    return 0;
}

int write_out(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "cannot write " << path << "\n";
        return kExitInvalidConfig;
    }
    os << text;
    return 0;
}

int cmd_run(RunFlags& f) {
    if (int rc = finish_config(f); rc != 0) return rc;
    if (f.trials > 1 && f.cfg.strategy != "full-oblivious") {
        std::cerr << "--trials > 1 needs --strategy full-oblivious\n";
        return kExitInvalidConfig;
    }

    if (f.trials > 1) {
        const gl::ObliviousStats stats = gl::run_oblivious_lb(
            f.cfg.params, f.cfg.algo, f.trials, f.cfg.algo_seed, f.cfg.backdoor);
        const gl::Certificate* best = stats.best ? &*stats.best : nullptr;
        std::cout << "trials=" << stats.trials << " wins=" << stats.wins
                  << " win_rate=" << stats.win_rate() << " best="
                  << (best ? gl::Certificate::kind_name(best->kind) : "none") << "\n";
        if (!f.out.empty() && best) {
            if (int rc = write_out(f.out, stats.best_transcript); rc != 0) return rc;
        }
        if (f.verify_after && best) {
            const gl::VerifyReport rep = gl::verify_transcript(stats.best_transcript);
            std::cout << "verify: " << rep.summary() << "\n";
            if (!rep.ok) return kExitVerifyFailed;
        }
        return 0;
    }

    gl::Transcript transcript;
    gl::MatchResult res;
    try {
        res = gl::run_configured(f.cfg, transcript);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitInvalidConfig;
    }
    std::cout << gl::Certificate::kind_name(res.cert.kind)
              << " nodes_spent=" << res.cert.nodes_spent
              << " peak_p=" << peak_potential(transcript.text(), res.cert)
              << " grid_side=" << res.grid_side << " regime=" << res.report.regime()
              << "\n";
    if (!f.out.empty()) {
        if (int rc = write_out(f.out, transcript.text()); rc != 0) return rc;
    }
    if (f.verify_after) {
        const gl::VerifyReport rep = gl::verify_transcript(transcript.text());
        std::cout << "verify: " << rep.summary() << "\n";
        if (!rep.ok) return kExitVerifyFailed;
    }
    return res.cert.kind == gl::Certificate::Kind::BudgetExhausted ? kExitBudget : 0;
}

int cmd_verify(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        std::cerr << "cannot read " << path << "\n";
        return kExitInvalidConfig;
    }
    std::stringstream buf;
    buf << is.rdbuf();
    const gl::VerifyReport rep = gl::verify_transcript(buf.str());
    std::cout << rep.summary() << "\n";
    if (!rep.ok) {
        for (const gl::VerifyIssue& i : rep.issues) {
            std::cout << "  event " << i.event_index << ": " << i.what << "\n";
        }
        return 1;
    }
    return 0;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

int cmd_sweep(RunFlags& base, std::vector<std::string> strategies,
              std::vector<std::string> algos, const std::string& out_path) {
    if (int rc = finish_config(base); rc != 0) return rc;
    if (strategies.empty()) strategies = gl::strategy_names();
    if (algos.empty()) algos = {"greedy", "parity", "hash"};

    std::ostringstream csv;
    csv << "strategy,algo,T,kappa,L0,L1,budget,theta,seed,trials,kind,nodes_spent,"
           "achieved_potential,win_rate,wallclock_ms,error\n";
    for (const std::string& strat : strategies) {
        for (const std::string& algo : algos) {
            gl::MatchConfig cfg = base.cfg;
            cfg.strategy = strat;
            cfg.algo = algo;
            csv << strat << ',' << algo << ',' << cfg.params.T << ',' << cfg.params.kappa
                << ',' << cfg.params.L0 << ',' << cfg.params.L1 << ','
                << cfg.params.n_budget << ',' << gl::to_string(cfg.params.theta) << ','
                << cfg.algo_seed << ',' << base.trials << ',';
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (base.trials > 1 && strat == "full-oblivious") {
                    const gl::ObliviousStats stats = gl::run_oblivious_lb(
                        cfg.params, algo, base.trials, cfg.algo_seed, cfg.backdoor);
                    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count();
                    const gl::i64 peak =
                        stats.best ? std::llabs(static_cast<gl::i64>(stats.best->p_value))
                                   : 0;
                    csv << (stats.best ? gl::Certificate::kind_name(stats.best->kind)
                                       : "survived")
                        << ',' << (stats.best ? stats.best->nodes_spent : 0) << ',' << peak
                        << ',' << stats.win_rate() << ',' << ms << ",\n";
                } else {
                    gl::Transcript transcript;
                    const gl::MatchResult res = gl::run_configured(cfg, transcript);
                    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count();
                    csv << gl::Certificate::kind_name(res.cert.kind) << ','
                        << res.cert.nodes_spent << ','
                        << peak_potential(transcript.text(), res.cert) << ','
                        << (res.cert.is_win() ? 1 : 0) << ',' << ms << ",\n";
                }
            } catch (const std::exception& e) {
                const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                csv << ",,,," << ms << ',' << csv_escape(e.what()) << "\n";
            }
        }
    }
    if (!out_path.empty()) return write_out(out_path, csv.str());
    std::cout << csv.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarial grid-coloring laboratory"};
    app.require_subcommand(1);

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "play one match and print the outcome");
    add_param_flags(run, run_flags);
    run->add_flag("--verify", run_flags.verify_after,
                  "re-validate the transcript before exiting");

    std::string verify_path;
    CLI::App* verify = app.add_subcommand("verify", "re-validate a transcript file");
    verify->add_option("file", verify_path, "transcript in JSONL form")->required();

    RunFlags sweep_flags;
    std::vector<std::string> sweep_strategies, sweep_algos;
    std::string sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "grid of matches, CSV report");
    add_param_flags(sweep, sweep_flags);
    sweep->add_option("--strategies", sweep_strategies, "subset of pipelines (default all)")
        ->delimiter(',');
    sweep->add_option("--algos", sweep_algos, "subset of algorithms")->delimiter(',');
    sweep->add_option("--csv", sweep_out, "write the CSV here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (verify->parsed()) return cmd_verify(verify_path);
        if (sweep->parsed()) {
            return cmd_sweep(sweep_flags, sweep_strategies, sweep_algos, sweep_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
    return kExitInvalidConfig;
}
