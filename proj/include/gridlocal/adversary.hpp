#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridlocal/geometry.hpp"
#include "gridlocal/harness.hpp"
#include "gridlocal/potential.hpp"
#include "gridlocal/rng.hpp"

namespace gridlocal {

// ---------------------------------------------------------------------------
// Parameter validation
// ---------------------------------------------------------------------------

struct ParamCheck {
    std::string name;
    bool ok = false;
    std::string detail;   // the inequality with both sides evaluated
};

// Classifies a parameter set before any match runs. "guaranteed" means the
// closing-walk margin is positive, so a completed strike cannot be survived;
// "empirical" means the mechanism runs but the final inequality has no slack
// at this scale, so wins must be observed rather than forced.
struct ParamReport {
    bool accepted = false;     // parameters are structurally usable
    bool guaranteed = false;   // strike margin positive
    bool mvt_ok = false;       // window search may use the mean-value scan
    bool feasible = false;     // estimated cell usage fits the budget
    double margin = 0.0;            // kappa - 2 - 2*((12T+7)/3 + c)
    double margin_connector = 0.0;  // kappa - 2 - 2*((kappa+2T+7)/3 + c)
    i64 width = 0;                  // boosted-construction width at level kappa
    i64 est_cells = 0;              // conservative materialized-cell estimate
    std::vector<ParamCheck> checks;

    std::string regime() const;   // "rejected" | "guaranteed" | "empirical"
    nlohmann::ordered_json to_json() const;
};

ParamReport validate_params(const AdversaryParams& p);

// ---------------------------------------------------------------------------
// Decision providers
// ---------------------------------------------------------------------------
//
// Every label-dependent decision a strategy makes is routed through a
// provider. The adaptive provider evaluates the supplied thunk, which may
// inspect the game state, and records the outcome. The scripted provider
// answers from a pre-committed pseudo-random script and never invokes the
// thunk, so a scripted run is structurally unable to react to the algorithm.
// The replay provider answers from a recorded log, which lets the scripted
// code path retrace an adaptive run decision for decision.

struct ChoiceLog {
    std::vector<i64> values;   // one entry per provider call, in call order
};

class ChoiceProvider {
  public:
    virtual ~ChoiceProvider() = default;

    virtual bool adaptive() const = 0;

    // A construction choice with `bound` alternatives (0..bound-1). Scripted
    // runs draw it uniformly: this is the class of decisions the randomized
    // mode turns into blind guesses.
    virtual i64 guess(const char* tag, i64 bound, const std::function<i64()>& compute) = 0;

    // A derived quantity with a deterministic stand-in: scripted runs return
    // `canonical` instead of guessing, keeping the script well-formed where
    // the adaptive value only sharpens the construction.
    virtual i64 plan(const char* tag, i64 bound, i64 canonical,
                     const std::function<i64()>& compute) = 0;

    // An observation of the board (attack trigger, win check, retry check).
    // Scripted runs answer 0: they never react.
    virtual i64 react(const char* tag, const std::function<i64()>& compute) = 0;

    // Termination poll inside a loop running index = 1..index_bound. Scripted
    // runs stop at a uniformly pre-drawn index.
    virtual bool stop_poll(const char* tag, i64 index, i64 index_bound,
                           const std::function<i64()>& compute) = 0;

    const ChoiceLog& log() const { return log_; }

  protected:
    i64 record(i64 v) {
        log_.values.push_back(v);
        return v;
    }

  private:
    ChoiceLog log_;
};

class AdaptiveChoices final : public ChoiceProvider {
  public:
    bool adaptive() const override { return true; }
    i64 guess(const char* tag, i64 bound, const std::function<i64()>& compute) override;
    i64 plan(const char* tag, i64 bound, i64 canonical,
             const std::function<i64()>& compute) override;
    i64 react(const char* tag, const std::function<i64()>& compute) override;
    bool stop_poll(const char* tag, i64 index, i64 index_bound,
                   const std::function<i64()>& compute) override;
};

// Pre-committed script: every answer comes from a deterministic stream keyed
// by the script seed and the call sequence, fixed before the algorithm draws
// any randomness. Identical instances replay identical scripts, which is how
// placement discovery runs (see discover_worlds) stay consistent with the
// real run.
class ScriptedChoices final : public ChoiceProvider {
  public:
    explicit ScriptedChoices(std::uint64_t seed);

    bool adaptive() const override { return false; }
    i64 guess(const char* tag, i64 bound, const std::function<i64()>& compute) override;
    i64 plan(const char* tag, i64 bound, i64 canonical,
             const std::function<i64()>& compute) override;
    i64 react(const char* tag, const std::function<i64()>& compute) override;
    bool stop_poll(const char* tag, i64 index, i64 index_bound,
                   const std::function<i64()>& compute) override;

  private:
    DecisionStream stream_;
    std::map<std::string, i64> stop_targets_;
};

// Replays a recorded decision log; throws std::logic_error when the pipeline
// asks for more decisions than were recorded (a structural divergence).
class ReplayChoices final : public ChoiceProvider {
  public:
    explicit ReplayChoices(ChoiceLog source) : source_(std::move(source)) {}

    bool adaptive() const override { return false; }
    i64 guess(const char* tag, i64 bound, const std::function<i64()>& compute) override;
    i64 plan(const char* tag, i64 bound, i64 canonical,
             const std::function<i64()>& compute) override;
    i64 react(const char* tag, const std::function<i64()>& compute) override;
    bool stop_poll(const char* tag, i64 index, i64 index_bound,
                   const std::function<i64()>& compute) override;

  private:
    i64 next();
    ChoiceLog source_;
    std::size_t cursor_ = 0;
};

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

// A fully labeled straight run of cells origin + t*dir for t in [lo, hi]
// (group-frame coordinates of root_frag's group). pa <= pb mark a certified
// window: |phi(pb) - phi(pa)| is the potential the builder achieved
// (pair_potential carries the sign, east/north end minus west/south end).
struct RowArtifact {
    int root_frag = -1;
    GridCoord dir{1, 0};        // (1,0) rows, (0,1) columns
    GridCoord origin;           // group-frame position of t = 0
    i64 lo = 0, hi = 0;
    i64 pa = 0, pb = 0;
    i64 pair_potential = 0;     // adaptive runs only; 0 in scripted runs
    i64 end_potential = 0;      // potential across [lo, hi], adaptive only

    i64 length() const { return hi - lo + 1; }
    GridCoord at(i64 t) const { return {origin.x + dir.x * t, origin.y + dir.y * t}; }
};

// A fully labeled parallelogram region with a certified pair and an internal
// witness path between the pair cells (west pair cell first).
struct SlopeArtifact {
    int root_frag = -1;
    Parallelogram shape;              // group-frame
    GridCoord pair_west, pair_east;
    i64 pair_potential = 0;           // phi(east) - phi(west), adaptive only
    std::vector<GridCoord> path;      // unit-step walk, pair_west .. pair_east
};

// A window of the long diagonal with near-flat potential.
struct DiagWindow {
    i64 x = 0;          // staircase column of the west end
    i64 ell = 0;        // horizontal span
    GridCoord u1, v1;   // staircase nodes at columns x and x + ell
    i64 p = 0;          // profile difference over the window, adaptive only
};

struct LPathArtifact {
    i64 row_len = 0;     // nodes in the row arm (y = 0, x in [0, row_len))
    int col_dir = 0;     // 0 north, 1 south
    i64 col_len = 0;     // nodes beyond the corner
    i64 p_total = 0;     // potential of the whole L walk, adaptive only
    GridCoord u, v;      // endpoints: (0,0) and the column tip
};

// Two equal-length, identically oriented straight walks in groups not yet
// placed relative to each other. Callers pass group-root fragments and
// group-frame node lists.
struct LabeledWalk {
    int frag = -1;
    std::vector<GridCoord> nodes;
};

// Commits `threat` beside `target` at separation exactly 2T+2 with endpoints
// aligned, reveals the two connecting runs, and converts a potential gap of
// at least 4T+5 into a win certificate. Throws std::domain_error when the
// walks are unequal, not parallel straight runs, already placed relative to
// each other, or the gap is below the threshold.
Certificate alignment_attack(GameState& state, const LabeledWalk& target,
                             const LabeledWalk& threat);

// Window start for the strike: the mean-value scan when allow_mvt is set and
// its preconditions hold (f(0) = f(back) = 0, steps <= 2, 0 < ell < sqrt(b)),
// otherwise the smallest x in [0, x_max] minimizing |f(x+ell) - f(x)|.
i64 diag_window_index(const std::vector<i64>& f, i64 ell, i64 x_max, bool allow_mvt);

// Reservation large enough for every reveal a full pipeline run makes
// through the host fragment (arms, diagonal, connectors, strike region).
Box host_reservation(const AdversaryParams& p);

// ---------------------------------------------------------------------------
// The construction driver
// ---------------------------------------------------------------------------

// Thrown by builders when the match ends mid-construction (early win);
// carries the certificate upward. Budget exhaustion travels separately as
// BudgetExhaustedError.
struct MatchDecided {
    Certificate cert;
};

class AdversaryDriver {
  public:
    // `worlds` (optional) pre-resolves absolute placements: entry k is the
    // scripted world position of fragment k, indexed by creation order.
    // Required when the state runs with the coordinate backdoor.
    AdversaryDriver(GameState& state, ChoiceProvider& choices,
                    const std::vector<GridCoord>* worlds = nullptr);

    // Fragment with the host_reservation box; the frame every arm, diagonal
    // and strike lives in. Create it before any other fragment so its frame
    // survives every merge.
    int make_host();

    // Self-similar straight-line build: doubles a run `level` times, choosing
    // each junction gap from {2T+2, 2T+3} so the certified pair's potential
    // difference grows by at least one per level. dir is (1,0) or (0,1).
    RowArtifact boost_line(int level, GridCoord dir);

    // boost_line followed by extraction of an exact-potential sub-walk
    // (|potential| equals the level), which becomes the guarded arm's
    // comparison segment.
    RowArtifact base_line(int level, GridCoord dir, const char* gap_tag);

    // Base run + long guarded arm: reveals the arm cell by cell inside the
    // host group, checking every base-length segment against the base run's
    // potential band and firing alignment_attack on a violation.
    RowArtifact quasilinear_row(int host_frag);

    // Full L build: guarded row arm east, then a guarded column arm extended
    // until the total potential cancels (or the best near-zero prefix when
    // the loop cap is reached).
    LPathArtifact build_lpath(int host_frag);

    // Parallelogram doubling at slope m up to `level`.
    SlopeArtifact slope_boost(int level, const Rat& m);

    // L-path, diagonal, flat window, sloped construction, strike; retries
    // with a fresh construction while the adaptive retry check asks for it.
    Certificate run_deterministic(int host_frag);

    // Reveals the staircase walk between the L endpoints (skipping already
    // revealed cells) and returns it; exposed for the lpath strategy.
    DiagonalWalk reveal_diagonal(int host_frag, const LPathArtifact& lp);

    static int max_line_level(i64 max_len, int T);
    static i64 line_length_bound(int level, int T);

    GameState& state() { return state_; }
    ChoiceProvider& choices() { return choices_; }

  private:
    struct LinePiece {
        int root_frag = -1;
        i64 hi = 0;         // cells at t in [0, hi]
        i64 pa = 0, pb = 0; // certified pair positions
    };
    struct SlopePiece {
        int root_frag = -1;
        Parallelogram shape;
        GridCoord pa, pb;   // certified pair cells, phi(pb) - phi(pa) >= level
    };
    struct ArmGuard {
        LabeledWalk base_walk;   // comparison run, group frame of its tower
        i64 base_p = 0;          // potential across the comparison run
        i64 seg_len = 0;         // arm segment length = comparison run length
    };

    int new_fragment(const Box& reservation);
    Color label_at(int frag, GridCoord g) const;
    void poll_win(const char* tag);
    void host_reveal(int host_frag, GridCoord cell);

    LinePiece line_build(int level, GridCoord dir, const Box& leaf_box, const char* gap_tag);
    std::vector<i64> line_phi(const LinePiece& piece, GridCoord dir) const;

    SlopePiece slope_build(int level, const Rat& m, const Box& leaf_box);
    std::unordered_map<GridCoord, i64, GridCoordHash> region_phi(
        int root_frag, const Parallelogram& shape) const;

    RowArtifact guarded_run(int host_frag, GridCoord arm_origin, GridCoord dir,
                            i64 max_len, const ArmGuard& guard, bool exact_stop,
                            i64 p_start, const char* tag_prefix, i64* out_len,
                            i64* out_p);

    struct StrikeOutcome {
        bool struck = false;
        std::vector<NodeRef> walk;
        std::vector<Color> colors;
        int p = 0;
    };
    StrikeOutcome strike(int host_frag, const DiagonalWalk& walk,
                         const std::vector<i64>& profile, const LPathArtifact& lp,
                         int attempt, std::vector<i64>* used_windows);

    GameState& state_;
    ChoiceProvider& choices_;
    const std::vector<GridCoord>* worlds_ = nullptr;
    const AdversaryParams& P_;
    i64 gap0_ = 0;   // 2T+2
    std::vector<GridCoord> host_cells_;   // every cell revealed via the host
};

}  // namespace gridlocal
