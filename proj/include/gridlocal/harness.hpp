#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridlocal/geometry.hpp"
#include "gridlocal/potential.hpp"
#include "gridlocal/rng.hpp"
#include "gridlocal/transcript.hpp"

namespace gridlocal {

// Match-level configuration shared by the referee and the strategies.
struct AdversaryParams {
    int T = 1;                 // view radius
    i64 n_budget = 500'000;    // max distinct cells that may become visible
    int kappa = 6;             // target potential of the boosted construction
    i64 L0 = 64;               // cap on the base-row length
    i64 L1 = 4096;             // length of the long row arm
    i64 c_ledger = 1;          // slack constant of the potential upper bound
    int trials = 1;            // repetitions in randomized mode
    Rat theta{1, 2};           // slope of the boosted construction, dy/dx

    i64 gap() const { return 2 * static_cast<i64>(T) + 2; }
};

class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class BudgetExhaustedError : public std::runtime_error {
  public:
    explicit BudgetExhaustedError(i64 spent)
        : std::runtime_error("cell budget exhausted"), spent_(spent) {}
    i64 spent() const { return spent_; }

  private:
    i64 spent_ = 0;
};

struct ImproperEdge {
    NodeRef u, v;   // u was revealed first
    Color cu = kNoColor, cv = kNoColor;
    friend bool operator==(const ImproperEdge&, const ImproperEdge&) = default;
};

class GameState;

// What the labeling algorithm is allowed to see: the revealed region as
// per-component induced subgraphs in private frames. Absolute placement and
// inter-component offsets are not derivable from any of these queries.
// Valid only until the next mutation of the owning GameState.
class View {
  public:
    int component_count() const;
    i64 component_size(int comp) const;
    bool has_cell(int comp, GridCoord local) const;
    Color label(int comp, GridCoord local) const;      // kNoColor when absent/unlabeled
    i64 reveal_ord(int comp, GridCoord local) const;   // -1 when not a revealed node
    int pending_component() const { return pending_comp_; }
    GridCoord pending_local() const { return pending_local_; }
    std::vector<GridCoord> component_cells(int comp) const;  // lex sorted

    nlohmann::ordered_json serialize() const;

  private:
    friend class GameState;
    const GameState* state_ = nullptr;
    std::vector<int> comps_;   // internal component ids, creation order
    int pending_comp_ = -1;    // index into comps_
    GridCoord pending_local_;
};

struct LabelRequest {
    const View& view;
    DecisionStream* stream = nullptr;  // present only for randomized algorithms
    // Set only when the out-of-model backdoor is enabled AND the strategy
    // pre-resolved its placements: the node's true host-grid position.
    std::optional<GridCoord> backdoor_absolute;
};

struct AlgorithmHandle {
    std::string name;
    bool randomized = false;
    std::function<Color(const LabelRequest&)> fn;
};

// The referee. Tracks hidden placement (fragments + commits), materializes
// radius-T balls, maintains per-component private frames, enforces the
// turn order, budget, and commit-time separation, and logs every event.
class GameState {
  public:
    GameState(const AdversaryParams& params, AlgorithmHandle algo, std::uint64_t seed,
              Transcript* transcript, bool backdoor = false);

    GameState(const GameState&) = delete;
    GameState& operator=(const GameState&) = delete;

    const AdversaryParams& params() const { return params_; }
    const AlgorithmHandle& algorithm() const { return algo_; }
    std::uint64_t seed() const { return seed_; }
    bool backdoor() const { return backdoor_; }
    Transcript* transcript() { return transcript_; }

    // `reservation` bounds everything this fragment will ever reveal plus
    // radius-T margins; balls are clipped to the owning group's reservation
    // union. `scripted_world` pre-resolves the fragment's absolute placement
    // (used by scripted strategies and required for the backdoor).
    int make_fragment(const Box& reservation,
                      std::optional<GridCoord> scripted_world = std::nullopt);
    int fragment_count() const { return static_cast<int>(frags_.size()); }

    const View& reveal(int frag, GridCoord node);
    void submit_label(GridCoord node, Color c);
    Color reveal_and_label(int frag, GridCoord node);
    bool has_pending() const { return pending_.has_value(); }

    void commit(int a, int b, GridCoord offset);
    bool same_group(int a, int b) const;

    // Group-frame helpers for the adversary side (never shown to algorithms).
    GridCoord to_group_frame(int frag, GridCoord private_coord) const;
    bool materialized(int frag, GridCoord group_coord) const;
    bool is_revealed(int frag, GridCoord group_coord) const;
    Color label_in_group(int frag, GridCoord group_coord) const;
    NodeRef node_ref(int frag, GridCoord group_coord) const;

    i64 spent() const { return spent_; }
    i64 budget_left() const { return params_.n_budget - spent_; }
    i64 reveal_count() const { return static_cast<i64>(reveals_.size()); }

    // Improper edges in discovery order (maintained incrementally at label
    // time); scan_improper recomputes the same list from scratch.
    const std::vector<ImproperEdge>& improper_edges() const { return improper_; }
    std::vector<ImproperEdge> scan_improper() const;

    // Host-grid side length that would accommodate every group laid out with
    // separation margins; reported with certificates.
    i64 required_grid_side() const;

    Certificate make_improper_certificate() const;  // from the first improper edge
    Certificate make_survived_certificate() const;
    Certificate make_budget_certificate() const;

  private:
    friend class View;

    struct Cell {
        Color label = kNoColor;
        i64 reveal_ord = -1;
        int comp = -1;
        int frag = -1;  // fragment the node was revealed through
    };

    struct FragmentRec {
        int id = -1;
        Box box;
        int parent = -1;            // union-find parent fragment id
        GridCoord off_to_parent;    // parent coords = private coords + off
        std::optional<GridCoord> scripted_world;
    };

    struct GroupData {
        std::vector<std::pair<int, Box>> region;  // (frag, box in root frame)
        std::unordered_map<GridCoord, Cell, GridCoordHash> cells;
        std::vector<GridCoord> revealed;          // root-frame coords, reveal order
    };

    struct ComponentRec {
        bool alive = false;
        int group_root = -1;
        GridCoord origin;                   // root-frame coord of the frame origin
        std::vector<GridCoord> cells;       // root-frame coords
    };

    struct RevealRec {
        int frag = -1;
        GridCoord private_at;
        std::vector<GridCoord> ball_private;  // immutable: private-frame ball
    };

    struct Pending {
        int frag;
        GridCoord private_at;
        GridCoord root_at;
        int root;
    };

    int find_root(int frag, GridCoord* off_to_root) const;
    GroupData& group_of(int root) { return groups_.at(root); }
    const GroupData& group_of(int root) const { return groups_.at(root); }
    std::vector<GridCoord> clipped_ball(const GroupData& g, GridCoord center) const;
    void merge_components_after_reveal(int root, const std::vector<GridCoord>& fresh);
    void record_improper_at(int root, GridCoord root_at);
    void rebuild_view(int root, GridCoord root_at);
    NodeRef node_ref_internal(int root, GridCoord root_at) const;
    const Cell* view_cell(int comp_id, GridCoord local) const;
    const std::vector<GridCoord>& component_cells_internal(int comp_id) const;
    GridCoord component_origin_internal(int comp_id) const;

    AdversaryParams params_;
    AlgorithmHandle algo_;
    std::uint64_t seed_ = 0;
    Transcript* transcript_ = nullptr;
    bool backdoor_ = false;

    std::vector<FragmentRec> frags_;
    std::unordered_map<int, GroupData> groups_;   // keyed by root fragment id
    std::vector<ComponentRec> comps_;
    std::vector<RevealRec> reveals_;
    std::vector<ImproperEdge> improper_;
    std::optional<Pending> pending_;
    i64 spent_ = 0;
    View view_;
};

class AdversaryStrategyBase {
  public:
    virtual ~AdversaryStrategyBase() = default;
    virtual std::string name() const = 0;
    virtual Certificate run(GameState& state) = 0;
};

// Drives one complete match: strategy vs the state's algorithm. Budget
// exhaustion is converted into its distinguished certificate; the final
// certificate is appended to the transcript.
Certificate run_match(GameState& state, AdversaryStrategyBase& strategy);

}  // namespace gridlocal
