#include "gridlocal/transcript.hpp"

#include <sstream>
#include <stdexcept>

namespace gridlocal {

using nlohmann::json;
using nlohmann::ordered_json;

const char* Certificate::kind_name(Kind k) {
    switch (k) {
        case Kind::Survived: return "survived";
        case Kind::ImproperEdge: return "improper_edge";
        case Kind::PotentialViolation: return "potential_violation";
        case Kind::BudgetExhausted: return "budget_exhausted";
    }
    return "unknown";
}

static ordered_json noderef_json(const NodeRef& n) {
    return ordered_json{{"frag", n.frag}, {"xy", {n.at.x, n.at.y}}};
}

static NodeRef noderef_from_json(const json& j) {
    NodeRef n;
    n.frag = j.at("frag").get<int>();
    n.at = GridCoord{j.at("xy").at(0).get<i64>(), j.at("xy").at(1).get<i64>()};
    return n;
}

ordered_json Transcript::cert_json(const Certificate& c) {
    ordered_json ev;
    ev["ev"] = "cert";
    ev["kind"] = Certificate::kind_name(c.kind);
    switch (c.kind) {
        case Certificate::Kind::ImproperEdge:
            ev["u"] = noderef_json(c.u);
            ev["v"] = noderef_json(c.v);
            ev["cu"] = static_cast<int>(c.cu);
            ev["cv"] = static_cast<int>(c.cv);
            break;
        case Certificate::Kind::PotentialViolation: {
            ordered_json walk = ordered_json::array();
            for (const auto& n : c.walk) walk.push_back(noderef_json(n));
            ordered_json colors = ordered_json::array();
            for (Color col : c.walk_colors) colors.push_back(static_cast<int>(col));
            ev["walk"] = std::move(walk);
            ev["colors"] = std::move(colors);
            ev["p"] = c.p_value;
            break;
        }
        default:
            break;
    }
    ev["spent"] = c.nodes_spent;
    return ev;
}

Certificate Transcript::cert_from_json(const json& j) {
    Certificate c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "survived") {
        c.kind = Certificate::Kind::Survived;
    } else if (kind == "improper_edge") {
        c.kind = Certificate::Kind::ImproperEdge;
        c.u = noderef_from_json(j.at("u"));
        c.v = noderef_from_json(j.at("v"));
        c.cu = static_cast<Color>(j.at("cu").get<int>());
        c.cv = static_cast<Color>(j.at("cv").get<int>());
    } else if (kind == "potential_violation") {
        c.kind = Certificate::Kind::PotentialViolation;
        for (const auto& n : j.at("walk")) c.walk.push_back(noderef_from_json(n));
        for (const auto& col : j.at("colors")) {
            c.walk_colors.push_back(static_cast<Color>(col.get<int>()));
        }
        c.p_value = j.at("p").get<int>();
    } else if (kind == "budget_exhausted") {
        c.kind = Certificate::Kind::BudgetExhausted;
    } else {
        throw std::invalid_argument("unknown certificate kind: " + kind);
    }
    if (j.contains("spent")) c.nodes_spent = j.at("spent").get<i64>();
    return c;
}

void Transcript::push(const ordered_json& event) {
    text_ += event.dump();
    text_ += '\n';
    ++events_;
}

void Transcript::header(const ordered_json& fields) {
    ordered_json ev;
    ev["ev"] = "header";
    for (const auto& [k, v] : fields.items()) ev[k] = v;
    mix(std::hash<std::string>{}(ev.dump()));
    push(ev);
}

void Transcript::frag(int id, const Box& reservation) {
    ordered_json ev;
    ev["ev"] = "frag";
    ev["id"] = id;
    ev["box"] = {reservation.x0, reservation.y0, reservation.x1, reservation.y1};
    mix(0xf1a9 ^ static_cast<std::uint64_t>(id));
    mix(static_cast<std::uint64_t>(reservation.x0) * 31 +
        static_cast<std::uint64_t>(reservation.y0));
    push(ev);
}

void Transcript::reveal(int frag, GridCoord at, std::uint64_t digest_input) {
    mix(0x5eea ^ static_cast<std::uint64_t>(frag));
    mix(static_cast<std::uint64_t>(at.x) * 0x1000193 ^ static_cast<std::uint64_t>(at.y));
    mix(digest_input);
    ordered_json ev;
    ev["ev"] = "reveal";
    ev["frag"] = frag;
    ev["xy"] = {at.x, at.y};
    {
        std::ostringstream os;
        os << std::hex << chain_;
        ev["vd"] = os.str();
    }
    push(ev);
}

void Transcript::label(GridCoord at, Color c) {
    mix(0x1abe ^ static_cast<std::uint64_t>(c));
    mix(static_cast<std::uint64_t>(at.x) * 0x1000193 ^ static_cast<std::uint64_t>(at.y));
    ordered_json ev;
    ev["ev"] = "label";
    ev["xy"] = {at.x, at.y};
    ev["c"] = static_cast<int>(c);
    push(ev);
}

void Transcript::commit(int a, int b, GridCoord offset) {
    mix(0xc033 ^ (static_cast<std::uint64_t>(a) << 20) ^ static_cast<std::uint64_t>(b));
    mix(static_cast<std::uint64_t>(offset.x) * 0x1000193 ^
        static_cast<std::uint64_t>(offset.y));
    ordered_json ev;
    ev["ev"] = "commit";
    ev["a"] = a;
    ev["b"] = b;
    ev["off"] = {offset.x, offset.y};
    push(ev);
}

void Transcript::cert(const Certificate& c) {
    ordered_json ev = cert_json(c);
    mix(std::hash<std::string>{}(ev.dump()));
    push(ev);
}

void Transcript::note(const std::string& key, const ordered_json& value) {
    ordered_json ev;
    ev["ev"] = "note";
    ev["key"] = key;
    ev["val"] = value;
    mix(std::hash<std::string>{}(ev.dump()));
    push(ev);
}

std::vector<json> Transcript::parse(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw std::invalid_argument("transcript line " + std::to_string(lineno) +
                                        " is not valid JSON");
        }
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace gridlocal
