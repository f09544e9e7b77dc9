#include "gridlocal/algorithms.hpp"

#include <algorithm>

namespace gridlocal {

std::vector<Color> visible_neighbor_labels(const View& view) {
    std::vector<Color> out;
    const int comp = view.pending_component();
    const GridCoord at = view.pending_local();
    for (const GridCoord& d : kDirections) {
        const Color c = view.label(comp, at + d);
        if (c != kNoColor) out.push_back(c);
    }
    return out;
}

AlgorithmHandle greedy_first_fit() {
    AlgorithmHandle h;
    h.name = "greedy";
    h.fn = [](const LabelRequest& req) -> Color {
        const std::vector<Color> nbr = visible_neighbor_labels(req.view);
        for (Color c = 1; c <= 3; ++c) {
            if (std::find(nbr.begin(), nbr.end(), c) == nbr.end()) return c;
        }
        return 1;
    };
    return h;
}

AlgorithmHandle component_parity() {
    AlgorithmHandle h;
    h.name = "parity";
    h.fn = [](const LabelRequest& req) -> Color {
        const GridCoord at = req.view.pending_local();
        const bool even = ((at.x + at.y) % 2 + 2) % 2 == 0;
        const Color choice = even ? 1 : 2;
        const std::vector<Color> nbr = visible_neighbor_labels(req.view);
        if (std::find(nbr.begin(), nbr.end(), choice) != nbr.end()) return 3;
        return choice;
    };
    return h;
}

AlgorithmHandle seeded_hash() {
    AlgorithmHandle h;
    h.name = "hash";
    h.randomized = true;
    h.fn = [](const LabelRequest& req) -> Color {
        const std::vector<Color> nbr = visible_neighbor_labels(req.view);
        std::vector<Color> open;
        for (Color c = 1; c <= 3; ++c) {
            if (std::find(nbr.begin(), nbr.end(), c) == nbr.end()) open.push_back(c);
        }
        if (open.empty()) open = {1, 2, 3};
        return open[req.stream->below(open.size())];
    };
    return h;
}

AlgorithmHandle backdoor_parity_cheater() {
    AlgorithmHandle h;
    h.name = "cheater";
    h.fn = [](const LabelRequest& req) -> Color {
        if (!req.backdoor_absolute) {
            throw ProtocolError("cheater needs the coordinate backdoor enabled");
        }
        const GridCoord at = *req.backdoor_absolute;
        return ((at.x + at.y) % 2 + 2) % 2 == 0 ? 1 : 2;
    };
    return h;
}

AlgorithmHandle algorithm_by_name(const std::string& name, bool allow_backdoor) {
    if (name == "greedy") return greedy_first_fit();
    if (name == "parity") return component_parity();
    if (name == "hash") return seeded_hash();
    if (allow_backdoor && name == "cheater") return backdoor_parity_cheater();
    throw std::invalid_argument("unknown algorithm: " + name);
}

}  // namespace gridlocal
