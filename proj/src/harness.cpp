#include "gridlocal/harness.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace gridlocal {

using nlohmann::ordered_json;

// ---------------------------------------------------------------- View

int View::component_count() const { return static_cast<int>(comps_.size()); }

// ----------------------------------------------------------- GameState

GameState::GameState(const AdversaryParams& params, AlgorithmHandle algo,
                     std::uint64_t seed, Transcript* transcript, bool backdoor)
    : params_(params), algo_(std::move(algo)), seed_(seed), transcript_(transcript),
      backdoor_(backdoor) {
    if (params_.T < 0) throw std::domain_error("view radius must be nonnegative");
    if (params_.n_budget <= 0) throw std::domain_error("cell budget must be positive");
}

int GameState::find_root(int frag, GridCoord* off_to_root) const {
    if (frag < 0 || frag >= static_cast<int>(frags_.size())) {
        throw std::domain_error("unknown fragment id");
    }
    GridCoord off{0, 0};
    int cur = frag;
    while (frags_[cur].parent != cur) {
        off = off + frags_[cur].off_to_parent;
        cur = frags_[cur].parent;
    }
    if (off_to_root) *off_to_root = off;
    return cur;
}

int GameState::make_fragment(const Box& reservation,
                             std::optional<GridCoord> scripted_world) {
    if (!reservation.valid()) throw std::domain_error("fragment reservation is empty");
    FragmentRec rec;
    rec.id = static_cast<int>(frags_.size());
    rec.box = reservation;
    rec.parent = rec.id;
    rec.scripted_world = scripted_world;
    frags_.push_back(rec);
    GroupData g;
    g.region.emplace_back(rec.id, reservation);
    groups_.emplace(rec.id, std::move(g));
    if (transcript_) transcript_->frag(rec.id, reservation);
    return rec.id;
}

std::vector<GridCoord> GameState::clipped_ball(const GroupData& g,
                                               GridCoord center) const {
    const int T = params_.T;
    std::vector<GridCoord> out;
    out.reserve(static_cast<std::size_t>(2 * T * T + 2 * T + 1));
    for (i64 dx = -T; dx <= T; ++dx) {
        const i64 rest = T - (dx < 0 ? -dx : dx);
        for (i64 dy = -rest; dy <= rest; ++dy) {
            const GridCoord c{center.x + dx, center.y + dy};
            for (const auto& [fid, box] : g.region) {
                if (box.contains(c)) {
                    out.push_back(c);
                    break;
                }
            }
        }
    }
    return out;
}

void GameState::merge_components_after_reveal(int root,
                                              const std::vector<GridCoord>& fresh) {
    if (fresh.empty()) return;
    GroupData& g = group_of(root);
    std::unordered_set<GridCoord, GridCoordHash> fresh_set(fresh.begin(), fresh.end());
    std::unordered_set<GridCoord, GridCoordHash> seen;
    for (const GridCoord& start : fresh) {
        if (seen.count(start)) continue;
        // Flood one cluster of fresh cells.
        std::vector<GridCoord> cluster;
        std::deque<GridCoord> queue{start};
        seen.insert(start);
        std::vector<int> touched;
        while (!queue.empty()) {
            GridCoord cur = queue.front();
            queue.pop_front();
            cluster.push_back(cur);
            for (const GridCoord& d : kDirections) {
                GridCoord nb = cur + d;
                if (fresh_set.count(nb)) {
                    if (!seen.count(nb)) {
                        seen.insert(nb);
                        queue.push_back(nb);
                    }
                    continue;
                }
                auto it = g.cells.find(nb);
                if (it != g.cells.end() && it->second.comp >= 0) {
                    if (std::find(touched.begin(), touched.end(), it->second.comp) ==
                        touched.end()) {
                        touched.push_back(it->second.comp);
                    }
                }
            }
        }
        int winner;
        if (touched.empty()) {
            winner = static_cast<int>(comps_.size());
            ComponentRec rec;
            rec.alive = true;
            rec.group_root = root;
            rec.origin = *std::min_element(cluster.begin(), cluster.end());
            comps_.push_back(std::move(rec));
        } else {
            winner = *std::min_element(touched.begin(), touched.end());
            for (int c : touched) {
                if (c == winner) continue;
                // The oldest component's frame survives a merge; absorbed
                // cells keep their group coordinates and simply re-key.
                for (const GridCoord& cc : comps_[c].cells) {
                    g.cells.at(cc).comp = winner;
                    comps_[winner].cells.push_back(cc);
                }
                comps_[c].cells.clear();
                comps_[c].alive = false;
            }
        }
        for (const GridCoord& cc : cluster) {
            g.cells.at(cc).comp = winner;
            comps_[winner].cells.push_back(cc);
        }
    }
}

const View& GameState::reveal(int frag, GridCoord node) {
    if (pending_) throw ProtocolError("previous node is still unlabeled");
    GridCoord off;
    const int root = find_root(frag, &off);
    if (!frags_[frag].box.contains(node)) {
        throw std::domain_error("reveal outside the fragment reservation");
    }
    GroupData& g = group_of(root);
    const GridCoord root_at = node + off;
    if (auto it = g.cells.find(root_at);
        it != g.cells.end() && it->second.reveal_ord >= 0) {
        throw ProtocolError("node already revealed");
    }
    std::vector<GridCoord> ball_cells = clipped_ball(g, root_at);
    std::vector<GridCoord> fresh;
    for (const GridCoord& c : ball_cells) {
        if (!g.cells.count(c)) fresh.push_back(c);
    }
    if (spent_ + static_cast<i64>(fresh.size()) > params_.n_budget) {
        throw BudgetExhaustedError(spent_);
    }
    spent_ += static_cast<i64>(fresh.size());
    for (const GridCoord& c : fresh) g.cells.emplace(c, Cell{});
    Cell& cell = g.cells.at(root_at);
    cell.reveal_ord = static_cast<i64>(reveals_.size());
    cell.frag = frag;

    RevealRec rec;
    rec.frag = frag;
    rec.private_at = node;
    rec.ball_private.reserve(ball_cells.size());
    for (const GridCoord& c : ball_cells) rec.ball_private.push_back(c - off);
    reveals_.push_back(std::move(rec));
    g.revealed.push_back(root_at);

    merge_components_after_reveal(root, fresh);
    pending_ = Pending{frag, node, root_at, root};
    rebuild_view(root, root_at);

    if (transcript_) {
        std::uint64_t d = mix64(static_cast<std::uint64_t>(fresh.size()) * 0x9e3779b9ULL ^
                                static_cast<std::uint64_t>(spent_));
        d ^= mix64(static_cast<std::uint64_t>(view_.pending_component()) * 131 +
                   static_cast<std::uint64_t>(view_.component_count()));
        d ^= mix64(static_cast<std::uint64_t>(view_.pending_local().x) * 0x100000001b3ULL ^
                   static_cast<std::uint64_t>(view_.pending_local().y));
        transcript_->reveal(frag, node, d);
    }
    return view_;
}

void GameState::rebuild_view(int root, GridCoord root_at) {
    view_.state_ = this;
    view_.comps_.clear();
    for (int i = 0; i < static_cast<int>(comps_.size()); ++i) {
        if (comps_[i].alive) view_.comps_.push_back(i);
    }
    const GroupData& g = group_of(root);
    const int comp = g.cells.at(root_at).comp;
    view_.pending_comp_ = -1;
    for (int i = 0; i < static_cast<int>(view_.comps_.size()); ++i) {
        if (view_.comps_[i] == comp) {
            view_.pending_comp_ = i;
            break;
        }
    }
    view_.pending_local_ = root_at - comps_[comp].origin;
}

void GameState::record_improper_at(int root, GridCoord root_at) {
    const GroupData& g = group_of(root);
    const Cell& cell = g.cells.at(root_at);
    for (const GridCoord& d : kDirections) {
        auto it = g.cells.find(root_at + d);
        if (it == g.cells.end()) continue;
        const Cell& nb = it->second;
        if (nb.label == kNoColor || nb.label != cell.label) continue;
        ImproperEdge e;
        e.u = node_ref_internal(root, root_at + d);
        e.v = node_ref_internal(root, root_at);
        e.cu = nb.label;
        e.cv = cell.label;
        improper_.push_back(e);
    }
}

NodeRef GameState::node_ref_internal(int root, GridCoord root_at) const {
    const GroupData& g = group_of(root);
    const Cell& cell = g.cells.at(root_at);
    if (cell.reveal_ord < 0) throw std::logic_error("node reference to unrevealed cell");
    GridCoord off;
    find_root(cell.frag, &off);
    return NodeRef{cell.frag, root_at - off};
}

void GameState::submit_label(GridCoord node, Color c) {
    if (!pending_) throw ProtocolError("no node awaits a label");
    if (node != pending_->private_at) throw ProtocolError("label for a non-pending node");
    if (!color_valid(c)) throw std::domain_error("color out of range");
    GroupData& g = group_of(pending_->root);
    Cell& cell = g.cells.at(pending_->root_at);
    if (cell.label != kNoColor) throw ProtocolError("node already labeled");
    cell.label = c;
    record_improper_at(pending_->root, pending_->root_at);
    if (transcript_) transcript_->label(node, c);
    pending_.reset();
}

Color GameState::reveal_and_label(int frag, GridCoord node) {
    const View& v = reveal(frag, node);
    LabelRequest req{v, nullptr, std::nullopt};
    DecisionStream stream(seed_, static_cast<std::uint64_t>(reveals_.size() - 1));
    if (algo_.randomized) req.stream = &stream;
    if (backdoor_ && frags_[frag].scripted_world) {
        req.backdoor_absolute = *frags_[frag].scripted_world + node;
    }
    const Color c = algo_.fn(req);
    if (!color_valid(c)) throw ProtocolError("algorithm returned an invalid color");
    submit_label(node, c);
    return c;
}

namespace {
Box revealed_bbox(const std::vector<GridCoord>& pts, GridCoord shift) {
    Box b;
    bool first = true;
    for (const GridCoord& p : pts) {
        const GridCoord q = p + shift;
        if (first) {
            b = Box{q.x, q.y, q.x, q.y};
            first = false;
        } else {
            b.x0 = std::min(b.x0, q.x);
            b.y0 = std::min(b.y0, q.y);
            b.x1 = std::max(b.x1, q.x);
            b.y1 = std::max(b.y1, q.y);
        }
    }
    return b;
}

i64 box_l1_gap(const Box& a, const Box& b) {
    const i64 dx = std::max<i64>({a.x0 - b.x1, b.x0 - a.x1, 0});
    const i64 dy = std::max<i64>({a.y0 - b.y1, b.y0 - a.y1, 0});
    return dx + dy;
}
}  // namespace

void GameState::commit(int a, int b, GridCoord offset) {
    if (pending_) throw ProtocolError("cannot commit while a node awaits a label");
    GridCoord oa, ob;
    const int ra = find_root(a, &oa);
    const int rb = find_root(b, &ob);
    if (ra == rb) throw ProtocolError("fragments already placed relative to each other");
    if (backdoor_) {
        const auto& wa = frags_[a].scripted_world;
        const auto& wb = frags_[b].scripted_world;
        if (wa && wb && !(*wb == *wa + offset)) {
            throw ProtocolError("commit contradicts the scripted placement");
        }
    }
    GroupData& ga = group_of(ra);
    GroupData& gb = group_of(rb);
    const GridCoord delta = offset + oa - ob;  // root_b frame -> root_a frame

    // Separation: all revealed nodes of the two groups must be >= 2T+2 apart
    // under the new placement, otherwise earlier views would have been wrong.
    const i64 min_sep = params_.gap();
    if (!ga.revealed.empty() && !gb.revealed.empty()) {
        const Box bba = revealed_bbox(ga.revealed, {0, 0});
        const Box bbb = revealed_bbox(gb.revealed, delta);
        if (box_l1_gap(bba, bbb) < min_sep) {
            for (const GridCoord& p : ga.revealed) {
                for (const GridCoord& q : gb.revealed) {
                    if (l1_distance(p, q + delta) < min_sep) {
                        throw ProtocolError(
                            "commit would place revealed nodes closer than the "
                            "separation rule allows");
                    }
                }
            }
        }
    }

    // Retroactive view consistency: every recorded ball must equal the ball
    // recomputed in the merged region.
    GroupData merged_probe;
    merged_probe.region = ga.region;
    for (const auto& [fid, box] : gb.region) {
        merged_probe.region.emplace_back(fid, box.shifted(delta));
    }
    auto check_balls = [&](const GroupData& g, GridCoord shift) {
        for (const GridCoord& p : g.revealed) {
            const Cell& cell = g.cells.at(p);
            const RevealRec& rec = reveals_.at(static_cast<std::size_t>(cell.reveal_ord));
            GridCoord off;
            find_root(rec.frag, &off);
            std::vector<GridCoord> recorded;
            recorded.reserve(rec.ball_private.size());
            for (const GridCoord& c : rec.ball_private) recorded.push_back(c + off + shift);
            std::sort(recorded.begin(), recorded.end());
            std::vector<GridCoord> fresh = clipped_ball(merged_probe, p + shift);
            if (fresh != recorded) {
                throw ProtocolError("commit would retroactively change a recorded view");
            }
        }
    };
    check_balls(ga, {0, 0});
    check_balls(gb, delta);

    // Union by oldest fragment: the surviving root is the smaller id.
    const int keep = std::min(ra, rb);
    const int gone = keep == ra ? rb : ra;
    const GridCoord shift = keep == ra ? delta : GridCoord{-delta.x, -delta.y};
    frags_[gone].parent = keep;
    frags_[gone].off_to_parent = shift;

    GroupData& dst = group_of(keep);
    GroupData& src = group_of(gone);
    for (auto& [coord, cell] : src.cells) {
        const GridCoord moved = coord + shift;
        if (dst.cells.count(moved)) {
            throw ProtocolError("commit overlaps materialized regions");
        }
        dst.cells.emplace(moved, cell);
    }
    for (const GridCoord& p : src.revealed) dst.revealed.push_back(p + shift);
    for (const auto& [fid, box] : src.region) {
        dst.region.emplace_back(fid, box.shifted(shift));
    }
    for (auto& comp : comps_) {
        if (comp.alive && comp.group_root == gone) {
            comp.group_root = keep;
            comp.origin = comp.origin + shift;
            for (GridCoord& c : comp.cells) c = c + shift;
        }
    }
    groups_.erase(gone);
    if (transcript_) transcript_->commit(a, b, offset);
}

bool GameState::same_group(int a, int b) const {
    return find_root(a, nullptr) == find_root(b, nullptr);
}

GridCoord GameState::to_group_frame(int frag, GridCoord private_coord) const {
    GridCoord off;
    find_root(frag, &off);
    return private_coord + off;
}

bool GameState::materialized(int frag, GridCoord group_coord) const {
    const int root = find_root(frag, nullptr);
    return group_of(root).cells.count(group_coord) > 0;
}

bool GameState::is_revealed(int frag, GridCoord group_coord) const {
    const int root = find_root(frag, nullptr);
    const auto& cells = group_of(root).cells;
    auto it = cells.find(group_coord);
    return it != cells.end() && it->second.reveal_ord >= 0;
}

Color GameState::label_in_group(int frag, GridCoord group_coord) const {
    const int root = find_root(frag, nullptr);
    const auto& cells = group_of(root).cells;
    auto it = cells.find(group_coord);
    return it == cells.end() ? kNoColor : it->second.label;
}

NodeRef GameState::node_ref(int frag, GridCoord group_coord) const {
    return node_ref_internal(find_root(frag, nullptr), group_coord);
}

std::vector<ImproperEdge> GameState::scan_improper() const {
    std::vector<ImproperEdge> out;
    for (std::size_t i = 0; i < reveals_.size(); ++i) {
        const RevealRec& rec = reveals_[i];
        GridCoord off;
        const int root = find_root(rec.frag, &off);
        const GroupData& g = group_of(root);
        const GridCoord at = rec.private_at + off;
        const Cell& cell = g.cells.at(at);
        if (cell.label == kNoColor) continue;
        for (const GridCoord& d : kDirections) {
            auto it = g.cells.find(at + d);
            if (it == g.cells.end()) continue;
            const Cell& nb = it->second;
            if (nb.label == kNoColor || nb.label != cell.label) continue;
            if (nb.reveal_ord >= static_cast<i64>(i)) continue;
            ImproperEdge e;
            e.u = node_ref_internal(root, at + d);
            e.v = node_ref_internal(root, at);
            e.cu = nb.label;
            e.cv = cell.label;
            out.push_back(e);
        }
    }
    return out;
}

i64 GameState::required_grid_side() const {
    i64 total_w = 0;
    i64 max_h = 0;
    const i64 margin = params_.gap();
    for (const auto& [root, g] : groups_) {
        if (g.cells.empty()) continue;
        Box b;
        bool first = true;
        for (const auto& [coord, cell] : g.cells) {
            if (first) {
                b = Box{coord.x, coord.y, coord.x, coord.y};
                first = false;
            } else {
                b.x0 = std::min(b.x0, coord.x);
                b.y0 = std::min(b.y0, coord.y);
                b.x1 = std::max(b.x1, coord.x);
                b.y1 = std::max(b.y1, coord.y);
            }
        }
        total_w += b.width() + margin;
        max_h = std::max(max_h, b.height());
    }
    return std::max(total_w, max_h + margin);
}

Certificate GameState::make_improper_certificate() const {
    if (improper_.empty()) throw std::logic_error("no improper edge recorded");
    Certificate c;
    c.kind = Certificate::Kind::ImproperEdge;
    c.u = improper_.front().u;
    c.v = improper_.front().v;
    c.cu = improper_.front().cu;
    c.cv = improper_.front().cv;
    c.nodes_spent = spent_;
    return c;
}

Certificate GameState::make_survived_certificate() const {
    Certificate c;
    c.kind = Certificate::Kind::Survived;
    c.nodes_spent = spent_;
    return c;
}

Certificate GameState::make_budget_certificate() const {
    Certificate c;
    c.kind = Certificate::Kind::BudgetExhausted;
    c.nodes_spent = spent_;
    return c;
}

// ------------------------------------------------------- View methods

// View lookups translate component-local coordinates back into the owning
// group's frame; everything else about the group stays hidden.

i64 View::component_size(int comp) const {
    return static_cast<i64>(state_->component_cells_internal(comps_.at(comp)).size());
}

bool View::has_cell(int comp, GridCoord local) const {
    return state_->view_cell(comps_.at(comp), local) != nullptr;
}

Color View::label(int comp, GridCoord local) const {
    auto* cell = state_->view_cell(comps_.at(comp), local);
    return cell ? cell->label : kNoColor;
}

i64 View::reveal_ord(int comp, GridCoord local) const {
    auto* cell = state_->view_cell(comps_.at(comp), local);
    return cell ? cell->reveal_ord : -1;
}

std::vector<GridCoord> View::component_cells(int comp) const {
    std::vector<GridCoord> out;
    const int id = comps_.at(comp);
    const auto& cells = state_->component_cells_internal(id);
    const GridCoord origin = state_->component_origin_internal(id);
    out.reserve(cells.size());
    for (const GridCoord& c : cells) out.push_back(c - origin);
    std::sort(out.begin(), out.end());
    return out;
}

ordered_json View::serialize() const {
    ordered_json comps = ordered_json::array();
    for (int i = 0; i < component_count(); ++i) {
        ordered_json cells = ordered_json::array();
        for (const GridCoord& c : component_cells(i)) {
            cells.push_back({c.x, c.y, static_cast<int>(label(i, c)), reveal_ord(i, c)});
        }
        comps.push_back(ordered_json{{"cells", std::move(cells)}});
    }
    ordered_json out;
    out["components"] = std::move(comps);
    out["pending"] = {pending_comp_, pending_local_.x, pending_local_.y};
    return out;
}

// ----------------------------------------------------- view plumbing

const GameState::Cell* GameState::view_cell(int comp_id, GridCoord local) const {
    const ComponentRec& rec = comps_.at(comp_id);
    if (!rec.alive) return nullptr;
    const GroupData& g = group_of(rec.group_root);
    auto it = g.cells.find(local + rec.origin);
    if (it == g.cells.end() || it->second.comp != comp_id) return nullptr;
    return &it->second;
}

const std::vector<GridCoord>& GameState::component_cells_internal(int comp_id) const {
    return comps_.at(comp_id).cells;
}

GridCoord GameState::component_origin_internal(int comp_id) const {
    return comps_.at(comp_id).origin;
}

// ------------------------------------------------------- run_match

Certificate run_match(GameState& state, AdversaryStrategyBase& strategy) {
    Certificate cert;
    try {
        cert = strategy.run(state);
    } catch (const BudgetExhaustedError&) {
        cert = state.make_budget_certificate();
    }
    cert.nodes_spent = state.spent();
    if (Transcript* t = state.transcript()) {
        t->note("grid_side", state.required_grid_side());
        t->cert(cert);
    }
    return cert;
}

}  // namespace gridlocal
