#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridlocal {

using i64 = std::int64_t;

// A lattice point. x grows east, y grows north. Edges of the host grid run
// between points at L1 distance 1; the oriented edge labels (east/north) are
// implied by the coordinate convention and never stored per edge.
struct GridCoord {
    i64 x = 0;
    i64 y = 0;

    friend bool operator==(const GridCoord&, const GridCoord&) = default;
    // Lexicographic: x first, then y. Used for every "smallest node" tie-break.
    friend auto operator<=>(const GridCoord&, const GridCoord&) = default;

    GridCoord operator+(const GridCoord& o) const { return {x + o.x, y + o.y}; }
    GridCoord operator-(const GridCoord& o) const { return {x - o.x, y - o.y}; }
};

i64 l1_distance(const GridCoord& a, const GridCoord& b);
bool adjacent(const GridCoord& a, const GridCoord& b);

std::string to_string(const GridCoord& c);

struct GridCoordHash {
    std::size_t operator()(const GridCoord& c) const {
        std::uint64_t v = static_cast<std::uint64_t>(c.x) * 0x9e3779b97f4a7c15ULL ^
                          (static_cast<std::uint64_t>(c.y) + 0x7f4a7c15ULL);
        v ^= v >> 29;
        v *= 0xbf58476d1ce4e5b9ULL;
        v ^= v >> 32;
        return static_cast<std::size_t>(v);
    }
};

// The four grid directions in the fixed scan order used everywhere a
// deterministic neighbor sweep is needed: east, north, west, south.
inline constexpr GridCoord kDirections[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// Closed axis-aligned box [x0,x1] x [y0,y1], both bounds inclusive.
struct Box {
    i64 x0 = 0, y0 = 0, x1 = -1, y1 = -1;

    bool valid() const { return x0 <= x1 && y0 <= y1; }
    bool contains(const GridCoord& c) const {
        return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1;
    }
    i64 width() const { return x1 - x0 + 1; }
    i64 height() const { return y1 - y0 + 1; }
    Box shifted(const GridCoord& off) const {
        return {x0 + off.x, y0 + off.y, x1 + off.x, y1 + off.y};
    }
    friend bool operator==(const Box&, const Box&) = default;
};

// Union of the two boxes' bounding boxes.
Box bounding_union(const Box& a, const Box& b);

// All lattice cells of `region` at L1 distance <= radius from `center`,
// sorted lexicographically. The caller is responsible for passing the region
// the ball is allowed to occupy (a fragment reservation, or the whole host
// grid). Cells outside the region are clipped away.
std::vector<GridCoord> ball(const Box& region, const GridCoord& center, int radius);

// Exact rational with canonical form (reduced, positive denominator).
// Slopes and parallelogram band offsets are always carried as Rat; floating
// point never participates in containment or rounding decisions.
struct Rat {
    i64 num = 0;
    i64 den = 1;

    Rat() = default;
    Rat(i64 n);                 // NOLINT: implicit integer promotion is wanted
    Rat(i64 n, i64 d);

    bool is_integer() const { return den == 1; }
    i64 floor() const;
    i64 ceil() const;
    Rat frac() const;           // this - floor(this), in [0, 1)

    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator-() const { return {-num, den}; }

    std::strong_ordering operator<=>(const Rat& o) const;
    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }

    double approx() const { return double(num) / double(den); }
};

std::string to_string(const Rat& r);

// Rounding of the ideal point at horizontal offset i on the line of slope m
// through `anchor`. down = on-or-below lattice point, up = the point one
// above it (even when the ideal point is itself a lattice point).
struct LineRounding {
    Rat ordinate;     // anchor.y + m * i, exact
    GridCoord down;   // (anchor.x + i, floor(ordinate))
    GridCoord up;     // down + (0, 1)
};

LineRounding line_rounding(const GridCoord& anchor, const Rat& slope, i64 i);

// Monotone staircase between u and v: one point per column,
//   y(x) = u.y + floor(m * (x - u.x)),  m = (v.y - u.y) / (v.x - u.x).
// Requires u.x < v.x and |m| <= 1. Consecutive points differ by (1,0) or
// (1,+-1); the caller inserts unit-step fillers where needed (see
// diagonal_walk).
std::vector<GridCoord> diagonal_path(const GridCoord& u, const GridCoord& v);

// Unit-step walk covering the staircase: at a (1,+-1) step the east neighbour
// is inserted first, so the walk is grid-adjacent throughout. column_index[k]
// maps column k (0-based from u) to the walk position of its staircase point.
struct DiagonalWalk {
    std::vector<GridCoord> nodes;        // unit-step walk from u to v
    std::vector<std::size_t> column_index;
};

DiagonalWalk diagonal_walk(const GridCoord& u, const GridCoord& v);

// Closed parallelogram with two vertical sides of length level+1 and two
// sides of slope `m` (theta measured from east; canonical builds keep
// 0 <= m <= 1). The lower slanted side passes through
// anchor + (0, band_offset) with band_offset in (-1, 0]; a zero offset means
// the side runs through the anchor node itself.
struct Parallelogram {
    int level = 0;
    Rat m;                 // tan(theta), exact
    GridCoord anchor;      // lexicographically minimal lattice node inside
    i64 width = 0;
    Rat band_offset;       // in (-1, 0]

    i64 height() const { return level + 1; }
    bool contains(const GridCoord& p) const;
    // All lattice nodes inside, column-major west to east, south to north.
    std::vector<GridCoord> cells() const;
};

// Shape of the level-(j+1) parallelogram obtained by pairing two congruent
// level-j parallelograms: the second copy is anchored at the down- or
// up-rounding of the ideal point at horizontal offset w_j + 2T + 2. Both
// anchor choices land inside the returned shape.
struct LevelUp {
    Parallelogram next;      // anchored at the same x as `base`
    i64 step = 0;            // horizontal anchor offset of the second copy
    GridCoord down_anchor;   // absolute second-copy anchor, lower choice
    GridCoord up_anchor;     // down_anchor + (0, 1)
};

LevelUp level_up(const Parallelogram& base, int t_radius);

// Closed-form width of the canonical level-k parallelogram: 2 (2^k - 1)(T+1).
i64 boost_width(int level, int t_radius);

// The eight lattice symmetries (rotations and reflections). Adversary-side
// constructions run in a canonical frame with rows east and columns north;
// a Dihedral maps canonical coordinates into the frame a build actually uses.
struct Dihedral {
    // (x, y) -> (a x + b y, c x + d y)
    int a = 1, b = 0, c = 0, d = 1;

    GridCoord apply(const GridCoord& p) const {
        return {a * p.x + b * p.y, c * p.x + d * p.y};
    }
    Dihedral inverse() const;
    static Dihedral identity() { return {}; }
    // Transform sending canonical east to `east` and canonical north to
    // `north`; both must be unit vectors and perpendicular.
    static Dihedral from_axes(const GridCoord& east, const GridCoord& north);
    static const std::vector<Dihedral>& all();
};

}  // namespace gridlocal
