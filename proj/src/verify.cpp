#include "gridlocal/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "gridlocal/geometry.hpp"
#include "gridlocal/potential.hpp"

namespace gridlocal {

namespace {

struct VCell {
    Color label = kNoColor;
    bool revealed = false;
};

struct VReveal {
    GridCoord center;                // root frame of the owning group
    std::vector<GridCoord> ball;     // sorted, root frame
};

struct VGroup {
    std::vector<std::pair<int, Box>> region;   // fragment boxes in root frame
    std::unordered_map<GridCoord, VCell, GridCoordHash> cells;
    std::vector<GridCoord> revealed;
    std::vector<VReveal> balls;
};

Box bbox_of(const std::vector<GridCoord>& pts, GridCoord shift) {
    Box b{0, 0, -1, 0};
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

class Checker {
  public:
    VerifyReport run(const std::string& jsonl) {
        std::vector<nlohmann::json> events;
        try {
            events = Transcript::parse(jsonl);
        } catch (const std::exception& e) {
            issue(0, e.what());
            return finish();
        }
        for (std::size_t i = 0; i < events.size(); ++i) {
            const std::size_t idx = i + 1;
            try {
                handle(idx, events[i]);
            } catch (const std::exception& e) {
                issue(idx, std::string("malformed event: ") + e.what());
            }
        }
        if (!have_params_) issue(0, "no header event");
        if (pending_) issue(0, "transcript ends with an unlabeled reveal");
        if (!report_.has_cert) issue(0, "transcript ends without a certificate");
        return finish();
    }

  private:
    VerifyReport finish() {
        report_.spent_recomputed = spent_;
        report_.ok = report_.issues.empty();
        return std::move(report_);
    }

    void issue(std::size_t idx, std::string what) {
        report_.issues.push_back(VerifyIssue{idx, std::move(what)});
    }

    int find(int frag, GridCoord* off_to_root) const {
        GridCoord off{0, 0};
        int cur = frag;
        while (parent_[static_cast<std::size_t>(cur)] != cur) {
            off = off + off_[static_cast<std::size_t>(cur)];
            cur = parent_[static_cast<std::size_t>(cur)];
        }
        if (off_to_root) *off_to_root = off;
        return cur;
    }

    std::vector<GridCoord> clipped_ball(const VGroup& g, GridCoord center) const {
        const int T = params_.T;
        std::vector<GridCoord> out;
        for (i64 dx = -T; dx <= T; ++dx) {
            const i64 rest = T - std::llabs(dx);
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

    void handle(std::size_t idx, const nlohmann::json& ev) {
        const std::string kind = ev.at("ev").get<std::string>();
        if (done_) {
            issue(idx, "event after the certificate");
            return;
        }
        if (kind == "header") {
            handle_header(idx, ev);
        } else if (kind == "frag") {
            handle_frag(idx, ev);
        } else if (kind == "reveal") {
            handle_reveal(idx, ev);
        } else if (kind == "label") {
            handle_label(idx, ev);
        } else if (kind == "commit") {
            handle_commit(idx, ev);
        } else if (kind == "cert") {
            handle_cert(idx, ev);
        } else if (kind == "note") {
            // informational only
        } else {
            issue(idx, "unknown event type: " + kind);
        }
    }

    void handle_header(std::size_t idx, const nlohmann::json& ev) {
        if (have_params_) {
            issue(idx, "duplicate header");
            return;
        }
        if (idx != 1) issue(idx, "header is not the first event");
        params_.T = ev.at("T").get<int>();
        params_.n_budget = ev.at("n_budget").get<i64>();
        params_.kappa = ev.at("kappa").get<int>();
        params_.L0 = ev.at("L0").get<i64>();
        params_.L1 = ev.at("L1").get<i64>();
        params_.c_ledger = ev.at("c_ledger").get<i64>();
        params_.trials = ev.at("trials").get<int>();
        params_.theta = Rat(ev.at("theta_num").get<i64>(), ev.at("theta_den").get<i64>());
        if (params_.T < 1 || params_.n_budget < 1) {
            issue(idx, "header parameters out of range");
            return;
        }
        have_params_ = true;
    }

    void handle_frag(std::size_t idx, const nlohmann::json& ev) {
        const int id = ev.at("id").get<int>();
        const auto& bj = ev.at("box");
        const Box box{bj.at(0).get<i64>(), bj.at(1).get<i64>(), bj.at(2).get<i64>(),
                      bj.at(3).get<i64>()};
        if (id != static_cast<int>(boxes_.size())) {
            issue(idx, "fragment ids must be sequential");
            return;
        }
        if (!box.valid()) {
            issue(idx, "empty fragment reservation");
            return;
        }
        boxes_.push_back(box);
        parent_.push_back(id);
        off_.push_back({0, 0});
        VGroup g;
        g.region.emplace_back(id, box);
        groups_.emplace(id, std::move(g));
    }

    bool frag_ok(std::size_t idx, int frag) {
        if (frag < 0 || frag >= static_cast<int>(boxes_.size())) {
            issue(idx, "unknown fragment " + std::to_string(frag));
            return false;
        }
        return true;
    }

    void handle_reveal(std::size_t idx, const nlohmann::json& ev) {
        if (!have_params_) {
            issue(idx, "reveal before the header");
            return;
        }
        if (pending_) {
            issue(idx, "reveal while a node awaits a label");
            return;
        }
        const int frag = ev.at("frag").get<int>();
        if (!frag_ok(idx, frag)) return;
        const GridCoord xy{ev.at("xy").at(0).get<i64>(), ev.at("xy").at(1).get<i64>()};
        if (!boxes_[static_cast<std::size_t>(frag)].contains(xy)) {
            issue(idx, "reveal outside the fragment reservation");
            return;
        }
        GridCoord off;
        const int root = find(frag, &off);
        VGroup& g = groups_.at(root);
        const GridCoord at = xy + off;
        auto it = g.cells.find(at);
        if (it != g.cells.end() && it->second.revealed) {
            issue(idx, "node revealed twice");
            return;
        }
        std::vector<GridCoord> ball = clipped_ball(g, at);
        i64 fresh = 0;
        for (const GridCoord& c : ball) {
            if (g.cells.emplace(c, VCell{}).second) ++fresh;
        }
        spent_ += fresh;
        if (spent_ > params_.n_budget) {
            issue(idx, "reveal exceeds the cell budget");
        }
        g.cells.at(at).revealed = true;
        g.revealed.push_back(at);
        std::sort(ball.begin(), ball.end());
        g.balls.push_back(VReveal{at, std::move(ball)});
        pending_ = true;
        pending_xy_ = xy;
        pending_at_ = at;
        pending_root_ = root;
    }

    void handle_label(std::size_t idx, const nlohmann::json& ev) {
        if (!pending_) {
            issue(idx, "label without a pending reveal");
            return;
        }
        const GridCoord xy{ev.at("xy").at(0).get<i64>(), ev.at("xy").at(1).get<i64>()};
        const int c = ev.at("c").get<int>();
        pending_ = false;
        if (!(xy == pending_xy_)) {
            issue(idx, "label coordinates do not match the pending reveal");
            return;
        }
        if (c < 1 || c > 3) {
            issue(idx, "label color out of range");
            return;
        }
        groups_.at(pending_root_).cells.at(pending_at_).label = static_cast<Color>(c);
    }

    void check_separation(std::size_t idx, const VGroup& ga, const VGroup& gb,
                          GridCoord delta) {
        if (ga.revealed.empty() || gb.revealed.empty()) return;
        const i64 min_sep = params_.gap();
        const Box bba = bbox_of(ga.revealed, {0, 0});
        const Box bbb = bbox_of(gb.revealed, delta);
        if (box_l1_gap(bba, bbb) >= min_sep) return;
        // Column buckets over the larger side, band scan from the smaller.
        const bool a_large = ga.revealed.size() >= gb.revealed.size();
        const std::vector<GridCoord>& large = a_large ? ga.revealed : gb.revealed;
        const std::vector<GridCoord>& small = a_large ? gb.revealed : ga.revealed;
        const GridCoord ls = a_large ? GridCoord{0, 0} : delta;
        const GridCoord ss = a_large ? delta : GridCoord{0, 0};
        std::map<i64, std::vector<i64>> cols;
        for (const GridCoord& p : large) cols[p.x + ls.x].push_back(p.y + ls.y);
        for (auto& [x, ys] : cols) std::sort(ys.begin(), ys.end());
        for (const GridCoord& p0 : small) {
            const GridCoord q{p0.x + ss.x, p0.y + ss.y};
            auto lo = cols.lower_bound(q.x - min_sep + 1);
            auto hi = cols.upper_bound(q.x + min_sep - 1);
            for (auto it = lo; it != hi; ++it) {
                const i64 room = min_sep - std::llabs(it->first - q.x);
                const auto& ys = it->second;
                auto y0 = std::lower_bound(ys.begin(), ys.end(), q.y - room + 1);
                if (y0 != ys.end() && *y0 <= q.y + room - 1) {
                    issue(idx, "commit violates the separation rule at (" +
                                   std::to_string(it->first) + "," + std::to_string(*y0) +
                                   ")");
                    return;
                }
            }
        }
    }

    void check_ball_stability(std::size_t idx, const VGroup& merged, const VGroup& side,
                              GridCoord shift, const Box& other_rb) {
        // A recorded view can only change when the merge brings new region
        // territory within visibility range of its center.
        for (const VReveal& r : side.balls) {
            const GridCoord c = r.center + shift;
            const Box pt{c.x, c.y, c.x, c.y};
            if (box_l1_gap(pt, other_rb) > params_.T) continue;
            std::vector<GridCoord> now = clipped_ball(merged, c);
            std::sort(now.begin(), now.end());
            std::vector<GridCoord> rec;
            rec.reserve(r.ball.size());
            for (const GridCoord& b : r.ball) rec.push_back(b + shift);
            std::sort(rec.begin(), rec.end());
            if (now != rec) {
                issue(idx, "commit retroactively changes a recorded view at (" +
                               std::to_string(c.x) + "," + std::to_string(c.y) + ")");
                return;
            }
        }
    }

    void handle_commit(std::size_t idx, const nlohmann::json& ev) {
        if (pending_) {
            issue(idx, "commit while a node awaits a label");
            return;
        }
        const int a = ev.at("a").get<int>();
        const int b = ev.at("b").get<int>();
        if (!frag_ok(idx, a) || !frag_ok(idx, b)) return;
        const GridCoord offset{ev.at("off").at(0).get<i64>(), ev.at("off").at(1).get<i64>()};
        GridCoord oa, ob;
        const int ra = find(a, &oa);
        const int rb = find(b, &ob);
        if (ra == rb) {
            issue(idx, "fragments already placed relative to each other");
            return;
        }
        const GridCoord delta = offset + oa - ob;
        VGroup& ga = groups_.at(ra);
        VGroup& gb = groups_.at(rb);
        check_separation(idx, ga, gb, delta);

        const int keep = std::min(ra, rb);
        const int gone = keep == ra ? rb : ra;
        const GridCoord shift = keep == ra ? delta : GridCoord{-delta.x, -delta.y};
        VGroup& dst = groups_.at(keep);
        VGroup& src = groups_.at(gone);

        const Box dst_rb = region_bbox(dst);
        const Box src_rb = region_bbox(src).shifted(shift);

        for (auto& [coord, cell] : src.cells) {
            const GridCoord moved = coord + shift;
            if (!dst.cells.emplace(moved, cell).second) {
                issue(idx, "commit overlaps materialized regions");
                return;
            }
        }
        for (const GridCoord& p : src.revealed) dst.revealed.push_back(p + shift);
        for (const auto& [fid, box] : src.region) {
            dst.region.emplace_back(fid, box.shifted(shift));
        }
        parent_[static_cast<std::size_t>(gone)] = keep;
        off_[static_cast<std::size_t>(gone)] = shift;

        check_ball_stability(idx, dst, src, shift, dst_rb);
        check_ball_stability(idx, dst, dst, {0, 0}, src_rb);
        for (VReveal& r : src.balls) {
            r.center = r.center + shift;
            for (GridCoord& c : r.ball) c = c + shift;
            dst.balls.push_back(std::move(r));
        }
        groups_.erase(gone);
    }

    static Box region_bbox(const VGroup& g) {
        Box b{0, 0, -1, 0};
        bool first = true;
        for (const auto& [fid, box] : g.region) {
            if (first) {
                b = box;
                first = false;
            } else {
                b.x0 = std::min(b.x0, box.x0);
                b.y0 = std::min(b.y0, box.y0);
                b.x1 = std::max(b.x1, box.x1);
                b.y1 = std::max(b.y1, box.y1);
            }
        }
        return b;
    }

    // Resolves a node reference and returns whether it denotes a revealed,
    // labeled cell; fills the root id, root-frame position, and label.
    bool resolve(std::size_t idx, const NodeRef& n, int* root, GridCoord* at, Color* label) {
        if (!frag_ok(idx, n.frag)) return false;
        GridCoord off;
        const int r = find(n.frag, &off);
        const GridCoord p = n.at + off;
        const VGroup& g = groups_.at(r);
        auto it = g.cells.find(p);
        if (it == g.cells.end() || !it->second.revealed) {
            issue(idx, "certificate references an unrevealed node");
            return false;
        }
        if (it->second.label == kNoColor) {
            issue(idx, "certificate references an unlabeled node");
            return false;
        }
        *root = r;
        *at = p;
        *label = it->second.label;
        return true;
    }

    void handle_cert(std::size_t idx, const nlohmann::json& ev) {
        done_ = true;
        report_.has_cert = true;
        Certificate c;
        try {
            c = Transcript::cert_from_json(ev);
        } catch (const std::exception& e) {
            issue(idx, std::string("unreadable certificate: ") + e.what());
            return;
        }
        report_.kind = c.kind;
        if (c.nodes_spent != spent_) {
            issue(idx, "certificate node count " + std::to_string(c.nodes_spent) +
                           " does not match the recomputed " + std::to_string(spent_));
        }
        switch (c.kind) {
            case Certificate::Kind::Survived:
            case Certificate::Kind::BudgetExhausted:
                break;
            case Certificate::Kind::ImproperEdge: {
                int ru = -1, rv = -1;
                GridCoord pu, pv;
                Color lu = kNoColor, lv = kNoColor;
                if (!resolve(idx, c.u, &ru, &pu, &lu) || !resolve(idx, c.v, &rv, &pv, &lv)) {
                    return;
                }
                if (ru != rv) {
                    issue(idx, "improper-edge endpoints are not placed together");
                    return;
                }
                if (!adjacent(pu, pv)) {
                    issue(idx, "improper-edge endpoints are not grid neighbors");
                    return;
                }
                if (lu != c.cu || lv != c.cv) {
                    issue(idx, "improper-edge colors do not match the recorded labels");
                    return;
                }
                if (c.cu != c.cv) {
                    issue(idx, "improper-edge colors differ; the edge is proper");
                }
                break;
            }
            case Certificate::Kind::PotentialViolation: {
                const std::size_t n = c.walk.size();
                if (n < 4 || c.walk_colors.size() != n) {
                    issue(idx, "potential walk is too short or mislabeled");
                    return;
                }
                int root0 = -1;
                std::vector<GridCoord> pts(n);
                for (std::size_t k = 0; k < n; ++k) {
                    int r = -1;
                    Color l = kNoColor;
                    if (!resolve(idx, c.walk[k], &r, &pts[k], &l)) return;
                    if (k == 0) {
                        root0 = r;
                    } else if (r != root0) {
                        issue(idx, "potential walk spans unplaced fragments");
                        return;
                    }
                    if (l != c.walk_colors[k]) {
                        issue(idx, "walk colors do not match the recorded labels");
                        return;
                    }
                }
                for (std::size_t k = 0; k < n; ++k) {
                    if (!adjacent(pts[k], pts[(k + 1) % n])) {
                        issue(idx, "potential walk is not closed under grid adjacency");
                        return;
                    }
                }
                const ClosedWalkVerdict v = check_closed_walk(c.walk_colors);
                if (v.improper) {
                    issue(idx, "potential walk has an improper step");
                    return;
                }
                if (v.potential != c.p_value || c.p_value == 0) {
                    issue(idx, "recomputed walk potential " + std::to_string(v.potential) +
                                   " does not support the claim " +
                                   std::to_string(c.p_value));
                }
                break;
            }
        }
    }

    VerifyReport report_;
    AdversaryParams params_;
    bool have_params_ = false;
    std::vector<Box> boxes_;
    std::vector<int> parent_;
    std::vector<GridCoord> off_;
    std::unordered_map<int, VGroup> groups_;
    i64 spent_ = 0;
    bool pending_ = false;
    GridCoord pending_xy_, pending_at_;
    int pending_root_ = -1;
    bool done_ = false;
};

}  // namespace

std::string VerifyReport::summary() const {
    if (ok) {
        return std::string("OK: ") +
               (has_cert ? Certificate::kind_name(kind) : "(no certificate)") +
               ", spent=" + std::to_string(spent_recomputed);
    }
    std::string s = "INVALID (" + std::to_string(issues.size()) + " issue" +
                    (issues.size() == 1 ? "" : "s") + ")";
    if (!issues.empty()) {
        s += ": event " + std::to_string(issues.front().event_index) + ": " +
             issues.front().what;
    }
    return s;
}

VerifyReport verify_transcript(const std::string& jsonl) { return Checker{}.run(jsonl); }

}  // namespace gridlocal
