#include "gridlocal/geometry.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace gridlocal {

i64 l1_distance(const GridCoord& a, const GridCoord& b) {
    return std::llabs(a.x - b.x) + std::llabs(a.y - b.y);
}

bool adjacent(const GridCoord& a, const GridCoord& b) {
    return l1_distance(a, b) == 1;
}

std::string to_string(const GridCoord& c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

Box bounding_union(const Box& a, const Box& b) {
    if (!a.valid()) return b;
    if (!b.valid()) return a;
    return {std::min(a.x0, b.x0), std::min(a.y0, b.y0),
            std::max(a.x1, b.x1), std::max(a.y1, b.y1)};
}

std::vector<GridCoord> ball(const Box& region, const GridCoord& center, int radius) {
    if (radius < 0) throw std::domain_error("ball: negative radius");
    std::vector<GridCoord> out;
    for (i64 dx = -radius; dx <= radius; ++dx) {
        const i64 rest = radius - std::llabs(dx);
        for (i64 dy = -rest; dy <= rest; ++dy) {
            GridCoord c{center.x + dx, center.y + dy};
            if (region.contains(c)) out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Rat::Rat(i64 n) : num(n), den(1) {}

Rat::Rat(i64 n, i64 d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    const i64 g = std::gcd(std::llabs(n), d);
    num = g ? n / g : n;
    den = g ? d / g : d;
}

i64 Rat::floor() const {
    i64 q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
}

i64 Rat::ceil() const { return -(-*this).floor(); }

Rat Rat::frac() const { return *this - Rat(floor()); }

Rat Rat::operator+(const Rat& o) const { return {num * o.den + o.num * den, den * o.den}; }
Rat Rat::operator-(const Rat& o) const { return {num * o.den - o.num * den, den * o.den}; }
Rat Rat::operator*(const Rat& o) const { return {num * o.num, den * o.den}; }

std::strong_ordering Rat::operator<=>(const Rat& o) const {
    const __int128 lhs = __int128(num) * o.den;
    const __int128 rhs = __int128(o.num) * den;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string to_string(const Rat& r) {
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

LineRounding line_rounding(const GridCoord& anchor, const Rat& slope, i64 i) {
    LineRounding lr;
    lr.ordinate = Rat(anchor.y) + slope * Rat(i);
    lr.down = {anchor.x + i, lr.ordinate.floor()};
    lr.up = {lr.down.x, lr.down.y + 1};
    return lr;
}

std::vector<GridCoord> diagonal_path(const GridCoord& u, const GridCoord& v) {
    if (u.x >= v.x) throw std::domain_error("diagonal_path: needs u.x < v.x");
    const i64 dx = v.x - u.x;
    const i64 dy = v.y - u.y;
    if (std::llabs(dy) > dx) throw std::domain_error("diagonal_path: |slope| must be <= 1");
    const Rat m(dy, dx);
    std::vector<GridCoord> out;
    out.reserve(std::size_t(dx) + 1);
    for (i64 x = u.x; x <= v.x; ++x) {
        out.push_back({x, u.y + (m * Rat(x - u.x)).floor()});
    }
    return out;
}

DiagonalWalk diagonal_walk(const GridCoord& u, const GridCoord& v) {
    const auto stair = diagonal_path(u, v);
    DiagonalWalk w;
    w.column_index.reserve(stair.size());
    w.nodes.push_back(stair.front());
    w.column_index.push_back(0);
    for (std::size_t k = 1; k < stair.size(); ++k) {
        const GridCoord prev = stair[k - 1];
        const GridCoord cur = stair[k];
        if (cur.y != prev.y) {
            // Diagonal hop: route through the east neighbour of prev.
            w.nodes.push_back({cur.x, prev.y});
        }
        w.nodes.push_back(cur);
        w.column_index.push_back(w.nodes.size() - 1);
    }
    return w;
}

bool Parallelogram::contains(const GridCoord& p) const {
    const i64 dx = p.x - anchor.x;
    if (dx < 0 || dx > width) return false;
    const Rat off = Rat(p.y - anchor.y) - m * Rat(dx);
    return off >= band_offset && off <= band_offset + Rat(height());
}

std::vector<GridCoord> Parallelogram::cells() const {
    std::vector<GridCoord> out;
    for (i64 dx = 0; dx <= width; ++dx) {
        const Rat base = Rat(anchor.y) + m * Rat(dx);
        const i64 lo = (base + band_offset).ceil();
        const i64 hi = (base + band_offset + Rat(height())).floor();
        for (i64 y = lo; y <= hi; ++y) out.push_back({anchor.x + dx, y});
    }
    return out;
}

LevelUp level_up(const Parallelogram& base, int t_radius) {
    if (t_radius < 1) throw std::domain_error("level_up: visibility radius must be >= 1");
    LevelUp r;
    r.step = base.width + 2 * t_radius + 2;
    const auto lr = line_rounding(base.anchor, base.m, r.step);
    r.down_anchor = lr.down;
    r.up_anchor = lr.up;

    // Both anchor choices shift the second copy's band by -frac(d) or
    // 1 - frac(d) relative to the ideal line, so the union of the first copy
    // and both placements fits in a band one unit taller, possibly dipping
    // below the old anchor line by frac(d).
    const Rat frac = (base.m * Rat(r.step)).frac();
    Rat raw = base.band_offset - frac;   // in (-2, 0]
    GridCoord anchor = base.anchor;
    if (raw <= Rat(-1)) {
        raw = raw + Rat(1);
        anchor.y -= 1;
    }
    r.next.level = base.level + 1;
    r.next.m = base.m;
    r.next.anchor = anchor;
    r.next.width = 2 * base.width + 2 * t_radius + 2;
    r.next.band_offset = raw;
    return r;
}

i64 boost_width(int level, int t_radius) {
    return 2 * ((i64(1) << level) - 1) * (t_radius + 1);
}

Dihedral Dihedral::inverse() const {
    // Orthogonal integer matrix: inverse is the transpose.
    return {a, c, b, d};
}

Dihedral Dihedral::from_axes(const GridCoord& east, const GridCoord& north) {
    if (std::llabs(east.x) + std::llabs(east.y) != 1 ||
        std::llabs(north.x) + std::llabs(north.y) != 1 ||
        east.x * north.x + east.y * north.y != 0) {
        throw std::domain_error("Dihedral: axes must be perpendicular unit vectors");
    }
    return {int(east.x), int(north.x), int(east.y), int(north.y)};
}

const std::vector<Dihedral>& Dihedral::all() {
    static const std::vector<Dihedral> k = [] {
        std::vector<Dihedral> v;
        const GridCoord dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        for (const auto& e : dirs) {
            for (int s : {1, -1}) {
                GridCoord n{-e.y * s, e.x * s};
                v.push_back(from_axes(e, n));
            }
        }
        return v;
    }();
    return k;
}

}  // namespace gridlocal
