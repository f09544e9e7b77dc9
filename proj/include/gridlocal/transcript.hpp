#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridlocal/geometry.hpp"
#include "gridlocal/potential.hpp"
#include "gridlocal/rng.hpp"

#include "json.hpp"

namespace gridlocal {

// A node reference that stays meaningful without absolute coordinates:
// the fragment it was revealed through plus its position in that
// fragment's private frame.
struct NodeRef {
    int frag = -1;
    GridCoord at;

    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct Certificate {
    enum class Kind { Survived, ImproperEdge, PotentialViolation, BudgetExhausted };

    Kind kind = Kind::Survived;

    // ImproperEdge: two adjacent revealed nodes with equal colors.
    NodeRef u, v;
    Color cu = kNoColor, cv = kNoColor;

    // PotentialViolation: a closed walk, properly colored step-by-step,
    // whose potential is nonzero.
    std::vector<NodeRef> walk;
    std::vector<Color> walk_colors;
    int p_value = 0;

    i64 nodes_spent = 0;

    bool is_win() const {
        return kind == Kind::ImproperEdge || kind == Kind::PotentialViolation;
    }

    static const char* kind_name(Kind k);
};

// Append-only JSONL event log with a rolling digest. Every run writes the
// same schema; replaying a run must reproduce the file byte for byte.
class Transcript {
  public:
    void header(const nlohmann::ordered_json& fields);
    void frag(int id, const Box& reservation);
    // `digest_input` folds whatever the caller wants covered by the chain
    // (view deltas, pending position); the current chain value is embedded
    // in the event as "vd".
    void reveal(int frag, GridCoord at, std::uint64_t digest_input);
    void label(GridCoord at, Color c);
    void commit(int a, int b, GridCoord offset);
    void cert(const Certificate& c);
    void note(const std::string& key, const nlohmann::ordered_json& value);

    const std::string& text() const { return text_; }
    std::uint64_t digest() const { return chain_; }
    std::size_t event_count() const { return events_; }

    static nlohmann::ordered_json cert_json(const Certificate& c);
    static Certificate cert_from_json(const nlohmann::json& j);

    // Splits JSONL text into parsed events; throws on malformed lines.
    static std::vector<nlohmann::json> parse(const std::string& text);

  private:
    void push(const nlohmann::ordered_json& event);
    void mix(std::uint64_t v) { chain_ = mix64(chain_ ^ v); }

    std::string text_;
    std::uint64_t chain_ = 0x243f6a8885a308d3ULL;
    std::size_t events_ = 0;
};

}  // namespace gridlocal
